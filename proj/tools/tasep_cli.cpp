// tasep-lab: command line front end for the TASEP laboratory.
// Exit codes: 0 success, 2 validation error, 3 numerical non-convergence.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tasep/tasep.hpp"

namespace {

using nlohmann::json;
using namespace tasep;

constexpr const char* kVersion = "0.1.0";

struct OutSink {
  std::string path;  // empty = stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open output file: " + path);
    os << text;
  }
};

// config file values act as defaults; explicitly passed flags win
template <typename T>
void from_config(const json& cfg, const char* key, CLI::Option* opt, T& target) {
  if (opt->count() == 0 && cfg.contains(key)) target = cfg.at(key).get<T>();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open config file: " + path);
  json cfg;
  try {
    is >> cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  return cfg;
}

int thread_count(int flag_value) {
  if (const char* env = std::getenv("AIRY1_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
    throw ValidationError("AIRY1_THREADS must be a positive integer");
  }
  return std::max(1, flag_value);
}

void log_run(const std::string& command, std::uint64_t seed, const json& digest_src) {
  const std::size_t digest = std::hash<std::string>{}(digest_src.dump());
  std::cerr << "tasep-lab " << kVersion << " cmd=" << command << " seed=" << seed
            << " config-digest=" << std::hex << digest << std::dec << "\n";
}

// round to the 12 significant digits the output contract promises, so JSON
// fields do not leak shortest-round-trip noise like 0.9999999999999999
double sig12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  return std::stod(io::format_sig(v));
}

std::string csv_text(const io::CsvRow& header, const std::vector<io::CsvRow>& rows) {
  std::ostringstream os;
  io::emit_csv(os, header, rows);
  return os.str();
}

EventConvention parse_convention(const std::string& s) {
  if (s == "geq") return EventConvention::GEQ_event;
  if (s == "leq") return EventConvention::LEQ_event;
  throw ValidationError("convention must be 'geq' or 'leq'");
}

// ---- subcommand bodies ----

int run_simulate(const sim::ModelParams& params, int n_particles, int samples,
                 std::uint64_t seed, std::vector<int> observe, bool guarded,
                 int threads, const OutSink& out) {
  params.validate();
  if (samples < 1) throw ValidationError("samples must be >= 1");
  if (observe.empty()) throw ValidationError("need at least one observed particle");
  std::sort(observe.begin(), observe.end());
  if (observe.front() < 1) throw ValidationError("observed particle labels are >= 1");
  if (n_particles > 0 && n_particles < observe.back())
    throw InsufficientParticles("n-particles < max(observe)");
  (void)n_particles;  // guarded systems size themselves from max(observe)
  const auto recs = sim::sample_positions(params, observe, samples, seed, guarded, threads);
  std::vector<io::CsvRow> rows;
  rows.reserve(recs.size() * observe.size());
  for (std::size_t run = 0; run < recs.size(); ++run)
    for (std::size_t k = 0; k < observe.size(); ++k)
      rows.push_back({std::to_string(run), std::to_string(observe[k]),
                      std::to_string(recs[run][k])});
  out.write(csv_text({"run_id", "particle_index", "position"}, rows));
  return 0;
}

int run_exact(const sim::ModelParams& params, const JointQuery& query, double tol,
              const OutSink& out) {
  fred::JointReport rep;
  const double prob = fred::joint_cdf(query, params, tol, &rep);
  json j{{"probability", sig12(prob)},
         {"W", rep.window},
         {"convention",
          query.convention == EventConvention::GEQ_event ? "geq" : "leq"},
         {"diagnostics",
          {{"contour_nodes", rep.nodes},
           {"imag_residual", rep.imag_residual},
           {"last_delta", rep.last_delta},
           {"clipped", rep.clipped}}}};
  out.write(j.dump(2) + "\n");
  return 0;
}

int run_exact_batch(const sim::ModelParams& params, std::vector<int> indices,
                    EventConvention conv, double tol, const std::string& batch_in,
                    const OutSink& out) {
  std::ifstream is(batch_in);
  if (!is) throw ValidationError("cannot open batch file: " + batch_in);
  std::vector<io::CsvRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    JointQuery q;
    q.indices = indices;
    q.convention = conv;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) q.thresholds.push_back(std::stoll(cell));
    if (q.thresholds.size() != indices.size())
      throw ValidationError("batch row arity does not match --indices");
    io::CsvRow row;
    for (long long a : q.thresholds) row.push_back(std::to_string(a));
    row.push_back(io::format_sig(fred::joint_cdf(q, params, tol)));
    rows.push_back(std::move(row));
  }
  io::CsvRow header;
  for (int idx : indices) header.push_back("a_" + std::to_string(idx));
  header.push_back("probability");
  out.write(csv_text(header, rows));
  return 0;
}

int run_airy1(const std::vector<double>& times, const std::vector<double>& levels,
              int nodes, double cutoff, const OutSink& out) {
  airy::Airy1Query q{times, levels, {nodes, cutoff}};
  airy::Airy1Report rep;
  const double prob = airy::joint_cdf_airy1(q, &rep);
  json j{{"probability", sig12(prob)},
         {"resolutions", {{"n_q", nodes}, {"coarse", rep.coarse}, {"fine", rep.fine}}},
         {"deltas", {{"resolution_delta", rep.delta}}}};
  out.write(j.dump(2) + "\n");
  return 0;
}

int run_f1_table(double s_min, double s_max, double s_step, int nodes, double cutoff,
                 const OutSink& out) {
  if (!(s_step > 0.0) || s_max < s_min) throw ValidationError("bad f1-table grid");
  std::vector<io::CsvRow> rows;
  for (double s = s_min; s <= s_max + 1e-12; s += s_step)
    rows.push_back({io::format_sig(s), io::format_sig(airy::f1_point(s, {nodes, cutoff}))});
  out.write(csv_text({"s", "F1_2s"}, rows));
  return 0;
}

int run_converge(const sim::ModelParams& params, const std::vector<long long>& t_list,
                 const std::vector<double>& s_list, double tol, const OutSink& out) {
  const auto frame = scale::constants(params.p, params.d);
  std::vector<io::CsvRow> rows;
  for (long long t : t_list)
    for (double s : s_list) {
      const double finite = scale::rescaled_cdf(t, {0.0}, {s}, tol, frame);
      const double limit = airy::f1_point(s);
      rows.push_back({std::to_string(t), io::format_sig(s), io::format_sig(finite),
                      io::format_sig(limit), io::format_sig(finite - limit)});
    }
  out.write(csv_text({"t", "s", "finite_cdf", "airy1_cdf", "diff"}, rows));
  return 0;
}

int run_kernel_error(const sim::ModelParams& params, const std::vector<long long>& t_list,
                     double r1, double s1, double r2, double s2, const OutSink& out) {
  const auto frame = scale::constants(params.p, params.d);
  std::vector<io::CsvRow> rows;
  for (long long t : t_list) {
    const double err = scale::kernel_limit_error(t, r1, s1, r2, s2, frame);
    rows.push_back({std::to_string(t), io::format_sig(r1), io::format_sig(s1),
                    io::format_sig(r2), io::format_sig(s2), io::format_sig(err)});
  }
  out.write(csv_text({"t", "r1", "s1", "r2", "s2", "err"}, rows));
  return 0;
}

int run_kernel_eval(const fin::KernelPoint& pt, bool conjugated, const OutSink& out) {
  fin::EvalReport rep;
  const double value = conjugated ? fin::conjugate_kernel(pt, &rep) : fin::kernel_K(pt, &rep);
  json j{{"value", sig12(value)},
         {"nodes_used", rep.nodes_used},
         {"imag_residual", rep.imag_residual}};
  out.write(j.dump(2) + "\n");
  return 0;
}

int run_selftest(bool krawtchouk_only, const OutSink& out) {
  std::ostringstream report;
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    report << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failures;
  };

  if (!krawtchouk_only) {
    const auto res = num::contour_integral([](num::cplx v) { return 1.0 / v; },
                                           {num::cplx{0, 0}, 0.5, 64}, 1e-13);
    check("contour residue 1/v", std::abs(res.value - num::cplx(0.0, 2 * std::numbers::pi)) < 1e-12);

    bool roots_ok = true;
    for (int d : {2, 3, 4}) {
      const auto rs = roots::offspring_roots(num::cplx{0.1, 0.05}, d);
      const num::cplx rhs = num::cplx{0.1, 0.05} * std::pow(num::cplx{1.1, 0.05}, d - 1);
      for (const auto& u : rs.nontrivial)
        roots_ok = roots_ok &&
                   std::abs(u * std::pow(1.0 + u, d - 1) - rhs) < 1e-10 * (1.0 + std::abs(rhs));
    }
    check("root-system residuals", roots_ok);

    bool biortho_ok = true;
    for (int d : {2, 3}) {
      const sim::ModelParams params{0.5, d, 8};
      const int n = 3;
      for (int k = 0; k < n && biortho_ok; ++k)
        for (int j = 0; j < n && biortho_ok; ++j) {
          double acc = 0.0;
          for (long long z = 0; z <= params.t + (long long)d * n; ++z) {
            const long long x = z - (long long)d * (n - 1);
            acc += fin::psi(n, k, x, params) * fin::phi(n, j, x, params);
          }
          biortho_ok = std::abs(acc - (k == j ? 1.0 : 0.0)) < 1e-10;
        }
    }
    check("Psi/Phi biorthogonality (d=2,3; n=3; t=8)", biortho_ok);

    bool d2_ok = true;
    for (auto [n1, x1, n2, x2] : {std::tuple{1, 0LL, 1, 1LL}, {2, -1LL, 3, 0LL}, {3, 2LL, 2, -2LL}}) {
      fin::KernelPoint pt{n1, x1, n2, x2, {0.5, 2, 8}};
      const double a = fin::kernel_K(pt);
      const double b = fin::kernel_K_d2(pt);
      d2_ok = d2_ok && std::abs(a - b) < 1e-10 * (1.0 + std::abs(b));
    }
    check("d=2 kernel specialization", d2_ok);

    JointQuery q{{1, 2}, {2, 0}};
    const sim::ModelParams params{0.5, 2, 3};
    const double fredholm = fred::joint_cdf(q, params, 1e-10);
    const double enumerated = sim::enumerate_exact(params, q);
    check("Fredholm vs enumeration (d=2, t=3)", std::abs(fredholm - enumerated) < 1e-9);

    check("F1(0) near 0.8319",
          std::abs(airy::f1_point(0.0) - 0.83190806620296) < 1e-6);
  }

  // Krawtchouk cross-check table
  bool psi_ok = true;
  for (int d : {2, 3})
    for (int n_part : {2, 4})
      for (int k = 0; k < n_part; ++k) {
        kraw::KrawtchoukContext ctx{0.5, n_part, d, 8};
        for (long long z = 0; z <= ctx.t + (long long)d * n_part; ++z) {
          const long long x = z - (long long)d * (n_part - 1);
          const double a = kraw::psi_kraw(k, z, ctx);
          const double b = fin::psi(n_part, k, x, {ctx.p, d, ctx.t});
          psi_ok = psi_ok && std::abs(a - b) < 1e-8;
        }
      }
  check("Krawtchouk psi_kraw vs contour psi", psi_ok);

  bool s_ok = true;
  for (int n_part : {2, 4, 6})
    for (double p : {0.3, 0.5, 0.7}) {
      kraw::KrawtchoukContext ctx{p, n_part, 2, 6};
      const auto prod = la::matmul(kraw::s_matrix(ctx), kraw::s_inverse_d2(ctx));
      for (int i = 0; i < n_part; ++i)
        for (int j = 0; j < n_part; ++j)
          s_ok = s_ok && std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10;
    }
  check("S * S^-1 = I (d=2)", s_ok);

  bool phi_ok = true;
  {
    kraw::KrawtchoukContext ctx{0.5, 4, 2, 8};
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (long long z = 0; z <= ctx.t + 2LL * 4 + 2; ++z)
          acc += kraw::psi_kraw(k, z, ctx) * kraw::phi_kraw_d2(j, z, ctx);
        phi_ok = phi_ok && std::abs(acc - (k == j ? 1.0 : 0.0)) < 1e-8;
      }
  }
  check("Krawtchouk Phi biorthogonal to Psi", phi_ok);

  report << (failures == 0 ? "selftest: all checks passed\n"
                           : "selftest: " + std::to_string(failures) + " check(s) failed\n");
  out.write(report.str());
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for discrete-time sequential-update TASEP"};
  app.require_subcommand(1);

  std::string config_path, out_path, convention = "geq", batch_in;
  double p = 0.5, tol = 1e-8, cutoff = 14.0;
  int d = 2, nodes = 60, threads = 1, n_particles = 0, samples = 1;
  long long t = 0;
  std::uint64_t seed = 1;
  bool guarded = true, conjugated = false, krawtchouk_only = false, kernel_error_mode = false;
  std::vector<int> indices, observe;
  std::vector<long long> thresholds, t_list;
  std::vector<double> times, levels, s_list;
  double s_min = -3.0, s_max = 2.0, s_step = 0.25;
  int n1 = 1, n2 = 1;
  long long x1 = 0, x2 = 0;
  double r1 = 0.0, s1 = 0.0, r2 = 0.0, s2 = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override)");
    cmd->add_option("--out", out_path, "output path (default stdout)");
    cmd->add_option("--threads", threads, "worker threads (AIRY1_THREADS env overrides)");
  };

  auto* c_sim = app.add_subcommand("simulate", "sample particle positions, CSV out");
  add_common(c_sim);
  auto* sim_p = c_sim->add_option("--p", p);
  auto* sim_d = c_sim->add_option("--d", d);
  auto* sim_t = c_sim->add_option("--t", t);
  auto* sim_n = c_sim->add_option("--n-particles", n_particles);
  auto* sim_s = c_sim->add_option("--samples", samples);
  auto* sim_seed = c_sim->add_option("--seed", seed);
  auto* sim_obs = c_sim->add_option("--observe", observe, "particle labels")->delimiter(',');
  auto* sim_g = c_sim->add_flag("--guarded,!--left-filled", guarded,
                                "include right guard particles (kernel-matched law)");

  auto* c_exact = app.add_subcommand("exact", "joint distribution via Fredholm determinant");
  add_common(c_exact);
  auto* ex_p = c_exact->add_option("--p", p);
  auto* ex_d = c_exact->add_option("--d", d);
  auto* ex_t = c_exact->add_option("--t", t);
  auto* ex_i = c_exact->add_option("--indices", indices)->delimiter(',');
  auto* ex_a = c_exact->add_option("--thresholds", thresholds)->delimiter(',');
  auto* ex_tol = c_exact->add_option("--tol", tol);
  auto* ex_conv = c_exact->add_option("--convention", convention, "geq|leq");
  c_exact->add_option("--batch-in", batch_in, "CSV of threshold tuples");

  auto* c_airy = app.add_subcommand("airy1", "multi-time Airy_1 joint distribution");
  add_common(c_airy);
  auto* ai_u = c_airy->add_option("--times", times)->delimiter(',');
  auto* ai_s = c_airy->add_option("--levels", levels)->delimiter(',');
  auto* ai_n = c_airy->add_option("--nodes", nodes);
  auto* ai_c = c_airy->add_option("--cutoff", cutoff);

  auto* c_f1 = app.add_subcommand("f1-table", "CSV table of F1(2s)");
  add_common(c_f1);
  auto* f1_min = c_f1->add_option("--s-min", s_min);
  auto* f1_max = c_f1->add_option("--s-max", s_max);
  auto* f1_step = c_f1->add_option("--s-step", s_step);
  auto* f1_n = c_f1->add_option("--nodes", nodes);
  auto* f1_c = c_f1->add_option("--cutoff", cutoff);

  auto* c_conv = app.add_subcommand("converge", "finite-time vs Airy_1 convergence sweeps");
  add_common(c_conv);
  auto* cv_p = c_conv->add_option("--p", p);
  auto* cv_d = c_conv->add_option("--d", d);
  auto* cv_t = c_conv->add_option("--t-list", t_list)->delimiter(',');
  auto* cv_s = c_conv->add_option("--s-list", s_list)->delimiter(',');
  auto* cv_tol = c_conv->add_option("--tol", tol);
  c_conv->add_flag("--kernel-error", kernel_error_mode, "emit pointwise kernel errors instead");
  c_conv->add_option("--r1", r1);
  c_conv->add_option("--s1", s1);
  c_conv->add_option("--r2", r2);
  c_conv->add_option("--s2", s2);

  auto* c_kev = app.add_subcommand("kernel-eval", "single kernel entry, JSON out");
  add_common(c_kev);
  auto* ke_p = c_kev->add_option("--p", p);
  auto* ke_d = c_kev->add_option("--d", d);
  auto* ke_t = c_kev->add_option("--t", t);
  c_kev->add_option("--n1", n1)->required();
  c_kev->add_option("--x1", x1)->required();
  c_kev->add_option("--n2", n2)->required();
  c_kev->add_option("--x2", x2)->required();
  c_kev->add_flag("--conjugated", conjugated);

  auto* c_self = app.add_subcommand("selftest", "run the invariant suites");
  add_common(c_self);
  c_self->add_flag("--krawtchouk", krawtchouk_only, "Krawtchouk cross-check table only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const json cfg = load_config(config_path);
    OutSink out{out_path.empty() && cfg.contains("out") ? cfg.at("out").get<std::string>()
                                                        : out_path};
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    if (name == "simulate") {
      from_config(cfg, "p", sim_p, p);
      from_config(cfg, "d", sim_d, d);
      from_config(cfg, "t", sim_t, t);
      from_config(cfg, "n_particles", sim_n, n_particles);
      from_config(cfg, "samples", sim_s, samples);
      from_config(cfg, "seed", sim_seed, seed);
      from_config(cfg, "observe", sim_obs, observe);
      from_config(cfg, "guarded", sim_g, guarded);
      log_run(name, seed, json{{"p", p}, {"d", d}, {"t", t}, {"samples", samples}, {"observe", observe}});
      return run_simulate({p, d, t}, n_particles, samples, seed, observe, guarded,
                          thread_count(threads), out);
    }
    if (name == "exact") {
      from_config(cfg, "p", ex_p, p);
      from_config(cfg, "d", ex_d, d);
      from_config(cfg, "t", ex_t, t);
      from_config(cfg, "indices", ex_i, indices);
      from_config(cfg, "thresholds", ex_a, thresholds);
      from_config(cfg, "tol", ex_tol, tol);
      from_config(cfg, "convention", ex_conv, convention);
      log_run(name, 0, json{{"p", p}, {"d", d}, {"t", t}, {"indices", indices}, {"thresholds", thresholds}});
      if (!batch_in.empty())
        return run_exact_batch({p, d, t}, indices, parse_convention(convention), tol,
                               batch_in, out);
      JointQuery q{indices, thresholds, parse_convention(convention)};
      return run_exact({p, d, t}, q, tol, out);
    }
    if (name == "airy1") {
      from_config(cfg, "times", ai_u, times);
      from_config(cfg, "levels", ai_s, levels);
      from_config(cfg, "nodes", ai_n, nodes);
      from_config(cfg, "cutoff", ai_c, cutoff);
      log_run(name, 0, json{{"times", times}, {"levels", levels}, {"nodes", nodes}});
      return run_airy1(times, levels, nodes, cutoff, out);
    }
    if (name == "f1-table") {
      from_config(cfg, "s_min", f1_min, s_min);
      from_config(cfg, "s_max", f1_max, s_max);
      from_config(cfg, "s_step", f1_step, s_step);
      from_config(cfg, "nodes", f1_n, nodes);
      from_config(cfg, "cutoff", f1_c, cutoff);
      log_run(name, 0, json{{"s_min", s_min}, {"s_max", s_max}, {"s_step", s_step}});
      return run_f1_table(s_min, s_max, s_step, nodes, cutoff, out);
    }
    if (name == "converge") {
      from_config(cfg, "p", cv_p, p);
      from_config(cfg, "d", cv_d, d);
      from_config(cfg, "t_list", cv_t, t_list);
      from_config(cfg, "s_list", cv_s, s_list);
      from_config(cfg, "tol", cv_tol, tol);
      log_run(name, 0, json{{"p", p}, {"d", d}, {"t_list", t_list}});
      if (kernel_error_mode)
        return run_kernel_error({p, d, 0}, t_list, r1, s1, r2, s2, out);
      if (s_list.empty())
        for (double s = -3.0; s <= 2.0 + 1e-12; s += 0.5) s_list.push_back(s);
      return run_converge({p, d, 0}, t_list, s_list, tol, out);
    }
    if (name == "kernel-eval") {
      from_config(cfg, "p", ke_p, p);
      from_config(cfg, "d", ke_d, d);
      from_config(cfg, "t", ke_t, t);
      log_run(name, 0, json{{"n1", n1}, {"x1", x1}, {"n2", n2}, {"x2", x2}});
      return run_kernel_eval({n1, x1, n2, x2, {p, d, t}}, conjugated, out);
    }
    if (name == "selftest") {
      log_run(name, 0, json{{"krawtchouk", krawtchouk_only}});
      return run_selftest(krawtchouk_only, out);
    }
    throw ValidationError("unknown subcommand");
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const TooLarge& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientParticles& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const IndexOutOfRange& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const DomainTooLarge& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NonConvergence& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const Degenerate& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const ResidualImaginary& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
