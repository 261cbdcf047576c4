#pragma once

#include <stdexcept>
#include <string>

namespace logfield {

// Adaptive quadrature ran out of subdivisions before reaching tolerance.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The assumed |f(k)| <= C/k^p tail decay failed numerically.
struct TailBoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Covariance matrix not positive semidefinite beyond jitter tolerance.
struct NotPsd : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Laplacian nullspace is not exactly span{(1,...,1)}.
struct RankDeficiency : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DisconnectedGraph : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, long line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  long line_number;
};

// Modulus vanishes at a separation the Lipschitz statistic must test.
struct DegenerateModulus : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace logfield
