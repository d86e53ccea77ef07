#pragma once

#include <span>
#include <string>
#include <vector>

#include "cicb/constraints.hpp"
#include "cicb/errors.hpp"
#include "cicb/polytope.hpp"

namespace cicb {

// Names of the rows the point fails, in system order; tol widens every row.
inline std::vector<std::string> violated_rows(const HalfspaceSystem& hs,
                                              const std::vector<double>& point,
                                              double tol = 1e-9) {
  if (point.size() != hs.dims.size())
    throw invalid_input_error("point dimension does not match the system");
  std::vector<std::string> out;
  for (const auto& row : hs.rows) {
    double lhs = 0.0;
    for (size_t j = 0; j < row.a.size(); ++j) lhs += row.a[j] * point[j];
    const bool ok = row.sense == Sense::le ? lhs <= row.rhs + tol : lhs >= row.rhs - tol;
    if (!ok) out.push_back(row.name);
  }
  return out;
}

// Region membership honoring the system's form. The projected form checks
// every rate row plus the per-user totals. The conditional form enforces a
// rate row only while its guard sum stays positive beyond tol, then requires
// every component nonnegative.
inline std::vector<std::string> violated_rows(const ConstraintSystem& cons,
                                              const std::vector<double>& values,
                                              const std::vector<double>& point,
                                              double tol = 1e-9) {
  if (static_cast<int>(point.size()) != cons.dim())
    throw invalid_input_error("point dimension does not match the system");
  if (cons.form == RegionForm::projected)
    return violated_rows(make_halfspaces(cons, values), point, tol);
  if (values.size() != cons.rows.size())
    throw invalid_input_error("one bound per constraint row required");
  std::vector<std::string> out;
  for (size_t r = 0; r < cons.rows.size(); ++r) {
    double guard = 0.0;
    for (const auto& c : cons.rows[r].guard) guard += point[cons.comp_index(c)];
    if (guard <= tol) continue;
    double lhs = 0.0;
    for (const auto& c : cons.rows[r].lhs) lhs += point[cons.comp_index(c)];
    if (lhs > values[r] + tol) out.push_back(cons.rows[r].tag);
  }
  for (int j = 0; j < cons.dim(); ++j)
    if (point[static_cast<size_t>(j)] < -tol)
      out.push_back(comp_name(cons.comp_at(j)) + ".nonneg");
  return out;
}

namespace detail {

// Zeroes negative levels from the outermost layer inward, each time folding
// the deficit into the next layer toward the private one.
inline void absorb_inward(std::span<double> levels) {
  for (size_t l = levels.size() - 1; l >= 1; --l) {
    if (levels[l] < 0.0) {
      levels[l - 1] += levels[l];
      levels[l] = 0.0;
    }
  }
}

// Zeroes any remaining negative levels from the private layer outward.
inline void spread_outward(std::span<double> levels) {
  for (size_t l = 0; l + 1 < levels.size(); ++l) {
    if (levels[l] < 0.0) {
      levels[l + 1] += levels[l];
      levels[l] = 0.0;
    }
  }
}

}  // namespace detail

// Moves a feasible split-rate point whose per-level entries may be negative
// to a componentwise nonnegative feasible point with the same per-user
// totals. The input must satisfy every rate row and both per-user total
// nonnegativity rows; the two sweeps per user then keep all rows satisfied
// while clearing the negative entries.
inline std::vector<double> rebalance(const ConstraintSystem& cons,
                                     const std::vector<double>& values,
                                     const std::vector<double>& point) {
  if (static_cast<int>(point.size()) != cons.dim())
    throw invalid_input_error("point dimension does not match the system");
  auto relaxed = cons;
  relaxed.form = RegionForm::projected;
  const auto bad = violated_rows(make_halfspaces(relaxed, values), point, 1e-9);
  if (!bad.empty())
    throw precondition_error("point outside the feasible region at row " + bad.front());

  std::vector<double> out = point;
  const int width = cons.n_states + 1;
  for (int user = 0; user < 2; ++user) {
    std::span<double> levels(out.data() + user * width, static_cast<size_t>(width));
    detail::absorb_inward(levels);
    detail::spread_outward(levels);
  }
  return out;
}

}  // namespace cicb
