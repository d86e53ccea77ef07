#pragma once

#include <stdexcept>
#include <string>

namespace cicb {

// Base class for every error the library raises on purpose.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed caller input: bad sizes, out-of-range values, inconsistent fields.
struct invalid_input_error : error {
  using error::error;
};

// Text input that does not match the documented file grammar.
// Messages carry "line N:" prefixes where a location is known.
struct parse_error : error {
  using error::error;
};

// An internal consistency condition failed; indicates a bug or numerically
// impossible state, not bad user input.
struct invariant_error : error {
  using error::error;
};

// A covariance or entropy computation left the numerically meaningful range
// (for example a conditional covariance with a negative eigenvalue beyond
// tolerance).
struct degenerate_error : error {
  using error::error;
};

// Linear program has no feasible point.
struct infeasible_error : error {
  using error::error;
};

// Linear program objective is unbounded in the requested direction.
struct unbounded_error : error {
  using error::error;
};

// A documented precondition of the called operation does not hold.
struct precondition_error : error {
  using error::error;
};

// A configured resource cap (row counts, iteration limits) was exceeded.
struct resource_limit_error : error {
  using error::error;
};

}  // namespace cicb
