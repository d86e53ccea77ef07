#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "cicb/errors.hpp"

namespace cicb {

struct LpResult {
  double value = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

namespace detail {

constexpr double kPivotEps = 1e-11;
constexpr double kFeasEps = 1e-9;
constexpr int kMaxIterations = 200000;

// Dense two-phase primal simplex in standard form:
//   min c.z  subject to  a.z = b, z >= 0.
// Bland's rule (lowest eligible index, lowest basic index on ratio ties)
// everywhere, so the walk is finite and deterministic.
class StandardSimplex {
 public:
  StandardSimplex(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double> c)
      : n_(c.size()), c_(std::move(c)) {
    if (a.size() != b.size()) throw invalid_input_error("row count mismatch");
    for (auto& row : a)
      if (row.size() != n_) throw invalid_input_error("row width mismatch");
    m_ = a.size();
    // Flip rows so every right-hand side is nonnegative.
    for (size_t i = 0; i < m_; ++i)
      if (b[i] < 0.0) {
        b[i] = -b[i];
        for (auto& v : a[i]) v = -v;
      }
    // Tableau columns: structural z, one artificial per row, rhs.
    width_ = n_ + m_ + 1;
    tab_.assign(m_, std::vector<double>(width_, 0.0));
    basis_.resize(m_);
    for (size_t i = 0; i < m_; ++i) {
      for (size_t j = 0; j < n_; ++j) tab_[i][j] = a[i][j];
      tab_[i][n_ + i] = 1.0;
      tab_[i][width_ - 1] = b[i];
      basis_[i] = n_ + i;
    }
  }

  LpResult solve() {
    LpResult out;
    if (m_ > 0) {
      phase_one();
      drop_artificial_rows();
    }
    phase_two();
    out.value = objective_value();
    out.x.assign(n_, 0.0);
    for (size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.x[basis_[i]] = tab_[i][width_ - 1];
    out.iterations = iterations_;
    return out;
  }

 private:
  void phase_one() {
    // Reduced costs for min(sum of artificials) with the artificials basic.
    obj_.assign(width_, 0.0);
    for (size_t i = 0; i < m_; ++i)
      for (size_t j = 0; j < width_; ++j)
        if (j < n_ || j == width_ - 1) obj_[j] -= tab_[i][j];
    iterate(/*allow_artificial=*/false);
    if (-obj_[width_ - 1] > kFeasEps)
      throw infeasible_error("phase one ended with positive infeasibility");
  }

  // After phase one an artificial can linger in the basis at level zero.
  // Pivot it out on any structural column; rows with no such column are
  // redundant and get removed.
  void drop_artificial_rows() {
    for (size_t i = 0; i < m_;) {
      if (basis_[i] < n_) {
        ++i;
        continue;
      }
      size_t pivot_col = n_;
      for (size_t j = 0; j < n_; ++j)
        if (std::fabs(tab_[i][j]) > kPivotEps) {
          pivot_col = j;
          break;
        }
      if (pivot_col < n_) {
        pivot(i, pivot_col);
        ++i;
      } else {
        tab_.erase(tab_.begin() + i);
        basis_.erase(basis_.begin() + i);
        --m_;
      }
    }
  }

  void phase_two() {
    obj_.assign(width_, 0.0);
    for (size_t j = 0; j < n_; ++j) obj_[j] = c_[j];
    for (size_t i = 0; i < m_; ++i) {
      const double cb = basis_[i] < n_ ? c_[basis_[i]] : 0.0;
      if (cb != 0.0)
        for (size_t j = 0; j < width_; ++j) obj_[j] -= cb * tab_[i][j];
    }
    iterate(/*allow_artificial=*/false);
  }

  void iterate(bool allow_artificial) {
    const size_t col_limit = allow_artificial ? n_ + m_ : n_;
    for (;;) {
      if (++iterations_ > kMaxIterations)
        throw resource_limit_error("simplex iteration limit exceeded");
      size_t enter = col_limit;
      for (size_t j = 0; j < col_limit; ++j)
        if (obj_[j] < -kPivotEps) {
          enter = j;
          break;
        }
      if (enter == col_limit) return;
      size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < m_; ++i) {
        const double coeff = tab_[i][enter];
        if (coeff <= kPivotEps) continue;
        const double ratio = std::max(tab_[i][width_ - 1], 0.0) / coeff;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave == m_ || basis_[i] < basis_[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == m_) throw unbounded_error("objective unbounded along a column");
      pivot(leave, enter);
    }
  }

  void pivot(size_t row, size_t col) {
    const double p = tab_[row][col];
    for (size_t j = 0; j < width_; ++j) tab_[row][j] /= p;
    tab_[row][col] = 1.0;
    for (size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = tab_[i][col];
      if (f == 0.0) continue;
      for (size_t j = 0; j < width_; ++j) tab_[i][j] -= f * tab_[row][j];
      tab_[i][col] = 0.0;
    }
    const double f = obj_[col];
    if (f != 0.0) {
      for (size_t j = 0; j < width_; ++j) obj_[j] -= f * tab_[row][j];
      obj_[col] = 0.0;
    }
    basis_[row] = col;
  }

  double objective_value() const {
    double v = 0.0;
    for (size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) v += c_[basis_[i]] * tab_[i][width_ - 1];
    return v;
  }

  size_t n_ = 0;
  size_t m_ = 0;
  size_t width_ = 0;
  std::vector<double> c_;
  std::vector<std::vector<double>> tab_;
  std::vector<double> obj_;
  std::vector<size_t> basis_;
  int iterations_ = 0;
};

}  // namespace detail

// max c.x subject to a.x <= b with x unrestricted in sign. Solved in standard
// form by splitting x into positive and negative parts and adding slacks.
// Throws infeasible_error or unbounded_error accordingly.
inline LpResult lp_max_free(const std::vector<std::vector<double>>& a,
                            const std::vector<double>& b, const std::vector<double>& c) {
  const size_t n = c.size();
  const size_t m = a.size();
  if (b.size() != m) throw invalid_input_error("row count mismatch");
  std::vector<std::vector<double>> sa(m, std::vector<double>(2 * n + m, 0.0));
  for (size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw invalid_input_error("row width mismatch");
    for (size_t j = 0; j < n; ++j) {
      sa[i][j] = a[i][j];
      sa[i][n + j] = -a[i][j];
    }
    sa[i][2 * n + i] = 1.0;
  }
  std::vector<double> sc(2 * n + m, 0.0);
  for (size_t j = 0; j < n; ++j) {
    sc[j] = -c[j];
    sc[n + j] = c[j];
  }
  auto r = detail::StandardSimplex(std::move(sa), b, std::move(sc)).solve();
  LpResult out;
  out.value = -r.value;
  out.iterations = r.iterations;
  out.x.resize(n);
  for (size_t j = 0; j < n; ++j) out.x[j] = r.x[j] - r.x[n + j];
  return out;
}

// min c.x subject to a_eq.x = b_eq, a_le.x <= b_le, x >= 0.
inline LpResult lp_min_nonneg(const std::vector<std::vector<double>>& a_eq,
                              const std::vector<double>& b_eq,
                              const std::vector<std::vector<double>>& a_le,
                              const std::vector<double>& b_le,
                              const std::vector<double>& c) {
  const size_t n = c.size();
  const size_t me = a_eq.size(), ml = a_le.size();
  if (b_eq.size() != me || b_le.size() != ml)
    throw invalid_input_error("row count mismatch");
  std::vector<std::vector<double>> sa(me + ml, std::vector<double>(n + ml, 0.0));
  std::vector<double> sb(me + ml, 0.0);
  for (size_t i = 0; i < me; ++i) {
    if (a_eq[i].size() != n) throw invalid_input_error("row width mismatch");
    for (size_t j = 0; j < n; ++j) sa[i][j] = a_eq[i][j];
    sb[i] = b_eq[i];
  }
  for (size_t i = 0; i < ml; ++i) {
    if (a_le[i].size() != n) throw invalid_input_error("row width mismatch");
    for (size_t j = 0; j < n; ++j) sa[me + i][j] = a_le[i][j];
    sa[me + i][n + i] = 1.0;
    sb[me + i] = b_le[i];
  }
  std::vector<double> sc(n + ml, 0.0);
  for (size_t j = 0; j < n; ++j) sc[j] = c[j];
  auto r = detail::StandardSimplex(std::move(sa), std::move(sb), std::move(sc)).solve();
  r.x.resize(n);
  return r;
}

}  // namespace cicb
