#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "tasep/csv.hpp"

using namespace tasep;

TEST_CASE("format_sig: 12 significant digits by default") {
  CHECK(io::format_sig(1.0) == "1");
  CHECK(io::format_sig(0.5) == "0.5");
  CHECK(io::format_sig(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_sig(-123456.789012345) == "-123456.789012");
  CHECK(io::format_sig(1.23456789012345e-7) == "1.23456789012e-07");
  CHECK(io::format_sig(0.0) == "0");
}

TEST_CASE("format_sig: digit override") {
  CHECK(io::format_sig(1.0 / 3.0, 3) == "0.333");
  CHECK(io::format_sig(123456.0, 3) == "1.23e+05");
}

TEST_CASE("format_sig: round trip preserves 12 digits") {
  for (double v : {0.2743, 0.83190806620296, -1.4110231573050662, 3.0e17}) {
    const double back = std::stod(io::format_sig(v));
    CHECK(back == Catch::Approx(v).epsilon(1e-11));
  }
}

TEST_CASE("emit_csv: header plus rows, newline terminated") {
  std::ostringstream os;
  io::emit_csv(os, {"a", "b"}, {{"1", "2"}, {"3", "4"}});
  CHECK(os.str() == "a,b\n1,2\n3,4\n");
}

TEST_CASE("emit_csv: empty record set leaves just the header") {
  std::ostringstream os;
  io::emit_csv(os, {"t", "s", "diff"}, {});
  CHECK(os.str() == "t,s,diff\n");
}

TEST_CASE("emit_csv: schema arity mismatch throws") {
  std::ostringstream os;
  CHECK_THROWS_AS(io::emit_csv(os, {"a", "b"}, {{"1"}}), ValidationError);
  CHECK_THROWS_AS(io::emit_csv(os, {"a"}, {{"1", "2"}}), ValidationError);
}
