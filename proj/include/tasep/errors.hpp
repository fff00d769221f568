#pragma once

#include <stdexcept>
#include <string>

namespace tasep {

// Numerical failure: a doubling loop hit its cap before meeting tolerance.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Root system evaluated at (or too close to) a branch collision point.
struct Degenerate : std::runtime_error {
  explicit Degenerate(const std::string& what) : std::runtime_error(what) {}
};

// Kernel value came back with a non-negligible imaginary part.
struct ResidualImaginary : std::runtime_error {
  explicit ResidualImaginary(const std::string& what) : std::runtime_error(what) {}
};

struct TooLarge : std::runtime_error {
  explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientParticles : std::runtime_error {
  explicit InsufficientParticles(const std::string& what) : std::runtime_error(what) {}
};

struct WindowUncovered : std::runtime_error {
  explicit WindowUncovered(const std::string& what) : std::runtime_error(what) {}
};

struct IndexOutOfRange : std::runtime_error {
  explicit IndexOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct DomainTooLarge : std::runtime_error {
  explicit DomainTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input (CLI exit code 2).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tasep
