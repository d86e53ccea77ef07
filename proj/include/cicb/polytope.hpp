#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cicb/constraints.hpp"
#include "cicb/errors.hpp"
#include "cicb/simplex.hpp"

namespace cicb {

enum class Sense { le, ge };

struct HsRow {
  std::vector<double> a;
  double rhs = 0.0;
  Sense sense = Sense::le;
  std::string name;
};

struct HalfspaceSystem {
  std::vector<std::string> dims;
  std::vector<HsRow> rows;

  size_t dim_index(const std::string& name) const {
    for (size_t i = 0; i < dims.size(); ++i)
      if (dims[i] == name) return i;
    throw invalid_input_error("unknown dimension " + name);
  }
};

// Rate polytope of a constraint system in component space. Rate rows become
// upper bounds; the nonnegativity rows depend on the region form: projected
// keeps only the per-user totals nonnegative, conditional keeps every
// component nonnegative. Guard activation is not representable as a fixed
// halfspace and is handled where the conditional form is consumed.
inline HalfspaceSystem make_halfspaces(const ConstraintSystem& sys,
                                       const std::vector<double>& values) {
  if (values.size() != sys.rows.size())
    throw invalid_input_error("one bound per constraint row required");
  HalfspaceSystem hs;
  const int dim = sys.dim();
  hs.dims.reserve(dim);
  for (int j = 0; j < dim; ++j) hs.dims.push_back(comp_name(sys.comp_at(j)));
  for (size_t r = 0; r < sys.rows.size(); ++r) {
    HsRow row;
    row.a.assign(dim, 0.0);
    for (const auto& c : sys.rows[r].lhs) row.a[sys.comp_index(c)] = 1.0;
    row.rhs = values[r];
    row.sense = Sense::le;
    row.name = sys.rows[r].tag;
    hs.rows.push_back(std::move(row));
  }
  if (sys.form == RegionForm::projected) {
    for (int user = 1; user <= 2; ++user) {
      HsRow row;
      row.a.assign(dim, 0.0);
      for (int l = 0; l <= sys.n_states; ++l) row.a[sys.comp_index({user, l})] = 1.0;
      row.sense = Sense::ge;
      row.name = "R" + std::to_string(user) + ".nonneg";
      hs.rows.push_back(std::move(row));
    }
  } else {
    for (int j = 0; j < dim; ++j) {
      HsRow row;
      row.a.assign(dim, 0.0);
      row.a[j] = 1.0;
      row.sense = Sense::ge;
      row.name = hs.dims[j] + ".nonneg";
      hs.rows.push_back(std::move(row));
    }
  }
  return hs;
}

namespace detail {

// All rows rewritten as a.x <= rhs.
inline std::pair<std::vector<std::vector<double>>, std::vector<double>> le_rows(
    const HalfspaceSystem& hs) {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (const auto& row : hs.rows) {
    if (row.a.size() != hs.dims.size())
      throw invalid_input_error("row width does not match the dimension list");
    if (row.sense == Sense::le) {
      a.push_back(row.a);
      b.push_back(row.rhs);
    } else {
      std::vector<double> neg(row.a.size());
      for (size_t j = 0; j < row.a.size(); ++j) neg[j] = -row.a[j];
      a.push_back(std::move(neg));
      b.push_back(-row.rhs);
    }
  }
  return {std::move(a), std::move(b)};
}

}  // namespace detail

inline double support_value(const HalfspaceSystem& hs, const std::vector<double>& objective) {
  if (objective.size() != hs.dims.size())
    throw invalid_input_error("objective width does not match the dimension list");
  auto [a, b] = detail::le_rows(hs);
  return lp_max_free(a, b, objective).value;
}

// Support of the projection onto (R1, R2), where each user's rate is the sum
// of the dimensions carrying that user's prefix.
inline double support_value(const HalfspaceSystem& hs, double a, double b) {
  std::vector<double> objective(hs.dims.size(), 0.0);
  for (size_t j = 0; j < hs.dims.size(); ++j) {
    if (hs.dims[j].rfind("R1", 0) == 0)
      objective[j] = a;
    else if (hs.dims[j].rfind("R2", 0) == 0)
      objective[j] = b;
    else
      throw invalid_input_error("dimension " + hs.dims[j] + " belongs to neither user");
  }
  return support_value(hs, objective);
}

// Nonnegative row multipliers certifying an upper bound on a.R1 + b.R2 over
// the projected region. For every rate component the weights of the rows
// containing it, minus the matching user's slack multiplier, add up to that
// user's direction coefficient.
struct DualCertificate {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> w;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double value = 0.0;
};

// Defaults minimize over the full multiplier family, then prefer zero slack
// via a secondary objective, so the returned value always equals the support
// and the certificate is slack-free whenever a slack-free optimum exists.
// Pinning allow_omega false restricts the search to the slack-free family,
// whose minimum can exceed the support near the axes.
struct DualOptions {
  bool allow_omega = true;
  bool minimize_omega = true;
};

inline DualCertificate dual_min(const ConstraintSystem& sys,
                                const std::vector<double>& row_costs, double a, double b,
                                const DualOptions& opts = {}) {
  const size_t nrows = sys.rows.size();
  if (row_costs.size() != nrows)
    throw invalid_input_error("one cost per constraint row required");
  const int dim = sys.dim();
  const size_t nvars = nrows + (opts.allow_omega ? 2 : 0);
  std::vector<std::vector<double>> eq(dim, std::vector<double>(nvars, 0.0));
  std::vector<double> eq_rhs(dim, 0.0);
  for (int j = 0; j < dim; ++j) {
    const RateComponent comp = sys.comp_at(j);
    for (size_t r = 0; r < nrows; ++r) {
      const auto& lhs = sys.rows[r].lhs;
      if (std::find(lhs.begin(), lhs.end(), comp) != lhs.end()) eq[j][r] = 1.0;
    }
    if (opts.allow_omega) eq[j][nrows + (comp.user - 1)] = -1.0;
    eq_rhs[j] = comp.user == 1 ? a : b;
  }
  std::vector<double> cost(nvars, 0.0);
  for (size_t r = 0; r < nrows; ++r) cost[r] = row_costs[r];
  auto sol = lp_min_nonneg(eq, eq_rhs, {}, {}, cost);
  if (opts.allow_omega && opts.minimize_omega) {
    std::vector<double> slack_cost(nvars, 0.0);
    slack_cost[nrows] = 1.0;
    slack_cost[nrows + 1] = 1.0;
    auto sol2 = lp_min_nonneg(eq, eq_rhs, {cost}, {sol.value + 1e-9}, slack_cost);
    sol.x = sol2.x;
    sol.value = 0.0;
    for (size_t r = 0; r < nrows; ++r) sol.value += row_costs[r] * sol2.x[r];
  }
  DualCertificate cert;
  cert.a = a;
  cert.b = b;
  cert.w.assign(sol.x.begin(), sol.x.begin() + nrows);
  if (opts.allow_omega) {
    cert.omega1 = sol.x[nrows];
    cert.omega2 = sol.x[nrows + 1];
  }
  cert.value = sol.value;
  return cert;
}

// Per-user, per-level balance of an optimal certificate with zero slack
// multipliers: the weight entering a chain level must equal the weight
// entering the next one. Returns the 2N signed residuals, user 1 first.
inline std::vector<double> check_prop1(const ConstraintSystem& sys,
                                       const DualCertificate& cert) {
  if (cert.w.size() != sys.rows.size())
    throw invalid_input_error("certificate width does not match the system");
  if (std::fabs(cert.omega1) > 1e-9 || std::fabs(cert.omega2) > 1e-9)
    throw precondition_error("balance check requires zero slack multipliers");
  std::vector<double> out;
  for (int user = 1; user <= 2; ++user) {
    for (int level = 0; level < sys.n_states; ++level) {
      const RateComponent lo{user, level};
      const RateComponent hi{user, level + 1};
      double res = 0.0;
      for (size_t r = 0; r < sys.rows.size(); ++r) {
        const auto& lhs = sys.rows[r].lhs;
        const bool has_lo = std::find(lhs.begin(), lhs.end(), lo) != lhs.end();
        const bool has_hi = std::find(lhs.begin(), lhs.end(), hi) != lhs.end();
        if (has_lo && !has_hi) res += cert.w[r];
        if (has_hi && !has_lo) res -= cert.w[r];
      }
      out.push_back(res);
    }
  }
  return out;
}

namespace detail {

inline void normalize_row(HsRow& row) {
  double scale = 0.0;
  for (double v : row.a) scale = std::max(scale, std::fabs(v));
  if (scale <= 0.0) return;
  for (double& v : row.a) v /= scale;
  row.rhs /= scale;
}

// Drop rows whose halfspace already contains the intersection of the others.
inline void lp_prune(std::vector<HsRow>& rows) {
  for (size_t i = 0; i < rows.size();) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (size_t j = 0; j < rows.size(); ++j) {
      if (j == i) continue;
      a.push_back(rows[j].a);
      b.push_back(rows[j].rhs);
    }
    bool redundant = false;
    try {
      redundant = lp_max_free(a, b, rows[i].a).value <= rows[i].rhs + 1e-9;
    } catch (const unbounded_error&) {
    } catch (const infeasible_error&) {
    }
    if (redundant)
      rows.erase(rows.begin() + i);
    else
      ++i;
  }
}

}  // namespace detail

// One Fourier-Motzkin elimination step. The returned system drops the named
// dimension; rows are normalized, deduplicated, and pruned by a redundancy
// test so repeated elimination cannot blow up.
inline HalfspaceSystem fm_eliminate(const HalfspaceSystem& hs, const std::string& dim) {
  const size_t d = hs.dim_index(dim);
  constexpr double kCoefEps = 1e-12;
  std::vector<HsRow> pos, neg, zero;
  for (const auto& orig : hs.rows) {
    if (orig.a.size() != hs.dims.size())
      throw invalid_input_error("row width does not match the dimension list");
    HsRow row = orig;
    if (row.sense == Sense::ge) {
      for (double& v : row.a) v = -v;
      row.rhs = -row.rhs;
      row.sense = Sense::le;
    }
    if (row.a[d] > kCoefEps)
      pos.push_back(std::move(row));
    else if (row.a[d] < -kCoefEps)
      neg.push_back(std::move(row));
    else
      zero.push_back(std::move(row));
  }
  HalfspaceSystem out;
  for (size_t j = 0; j < hs.dims.size(); ++j)
    if (j != d) out.dims.push_back(hs.dims[j]);
  auto strip = [&](const std::vector<double>& a) {
    std::vector<double> v;
    v.reserve(a.size() - 1);
    for (size_t j = 0; j < a.size(); ++j)
      if (j != d) v.push_back(a[j]);
    return v;
  };
  for (auto& row : zero) {
    row.a = strip(row.a);
    out.rows.push_back(std::move(row));
  }
  int counter = 0;
  for (const auto& p : pos) {
    for (const auto& n : neg) {
      HsRow row;
      row.a.resize(hs.dims.size());
      const double wp = -n.a[d];
      const double wn = p.a[d];
      for (size_t j = 0; j < hs.dims.size(); ++j) row.a[j] = wp * p.a[j] + wn * n.a[j];
      row.rhs = wp * p.rhs + wn * n.rhs;
      row.a = strip(row.a);
      row.sense = Sense::le;
      row.name = "fm" + std::to_string(counter++);
      out.rows.push_back(std::move(row));
      if (out.rows.size() > 1000000)
        throw resource_limit_error("elimination exceeded the row budget");
    }
  }
  // Normalize, drop vacuous rows, catch contradictions.
  std::vector<HsRow> kept;
  for (auto& row : out.rows) {
    detail::normalize_row(row);
    double scale = 0.0;
    for (double v : row.a) scale = std::max(scale, std::fabs(v));
    if (scale <= kCoefEps) {
      if (row.rhs < -1e-9)
        throw infeasible_error("elimination produced an unsatisfiable row");
      continue;
    }
    kept.push_back(std::move(row));
  }
  // Deduplicate by rounded coefficients, keeping the tightest bound.
  std::map<std::vector<int64_t>, size_t> seen;
  std::vector<HsRow> unique;
  for (auto& row : kept) {
    std::vector<int64_t> key;
    key.reserve(row.a.size());
    for (double v : row.a) key.push_back(static_cast<int64_t>(std::llround(v * 1e12)));
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(std::move(key), unique.size());
      unique.push_back(std::move(row));
    } else if (row.rhs < unique[it->second].rhs) {
      unique[it->second] = std::move(row);
    }
  }
  detail::lp_prune(unique);
  out.rows = std::move(unique);
  return out;
}

// Project a component-space system onto total rates. The outermost level of
// each user is rewritten as the user total minus the remaining components,
// which are then eliminated, leaving dims {R1, R2}.
inline HalfspaceSystem project_rates(const HalfspaceSystem& hs) {
  if (hs.dims.size() < 4 || hs.dims.size() % 2 != 0)
    throw invalid_input_error("component system expected");
  const int levels = static_cast<int>(hs.dims.size()) / 2;
  const int n = levels - 1;
  for (int user = 1; user <= 2; ++user) {
    const std::string prefix = "R" + std::to_string(user);
    if (hs.dims[(user - 1) * levels] != prefix + "p")
      throw invalid_input_error("component system expected");
    for (int l = 1; l <= n; ++l)
      if (hs.dims[(user - 1) * levels + l] != prefix + "s" + std::to_string(l))
        throw invalid_input_error("component system expected");
  }
  HalfspaceSystem sub;
  sub.dims = hs.dims;
  sub.dims[levels - 1] = "R1";
  sub.dims[2 * levels - 1] = "R2";
  for (const auto& orig : hs.rows) {
    HsRow row = orig;
    for (int user = 0; user < 2; ++user) {
      const size_t outer = static_cast<size_t>(user * levels + levels - 1);
      const double c = row.a[outer];
      if (c == 0.0) continue;
      for (int l = 0; l < n; ++l) row.a[static_cast<size_t>(user * levels + l)] -= c;
    }
    sub.rows.push_back(std::move(row));
  }
  for (int user = 1; user <= 2; ++user) {
    const std::string prefix = "R" + std::to_string(user);
    sub = fm_eliminate(sub, prefix + "p");
    for (int l = 1; l <= n - 1; ++l) sub = fm_eliminate(sub, prefix + "s" + std::to_string(l));
  }
  return sub;
}

inline std::vector<std::array<double, 2>> polygon_from_halfspaces(const HalfspaceSystem& hs);

struct SweepOptions {
  bool refine = true;
  int max_extra = 2048;
  double viol_tol = 1e-9;
  double merge_tol = 1e-8;
};

struct Region2D {
  std::vector<double> angles;
  std::vector<std::array<double, 2>> dirs;
  std::vector<double> support;
  std::vector<std::array<double, 2>> vertices;
};

// Trace a convex region from its support function over the full circle of
// directions. With refinement on, a gap between adjacent directions is
// bisected whenever their tangent-line vertex pokes past the support value
// at the bisecting direction, so polygon edges are discovered adaptively.
inline Region2D sweep_region(const std::function<double(double, double)>& support_fn,
                             int n_dirs, const SweepOptions& opts = {}) {
  if (n_dirs < 3) throw invalid_input_error("at least three directions required");
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::map<double, double> samples;
  auto eval = [&](double t) { return support_fn(std::cos(t), std::sin(t)); };
  for (int i = 0; i < n_dirs; ++i) {
    const double t = kTwoPi * i / n_dirs;
    samples.emplace(t, eval(t));
  }
  if (opts.refine) {
    struct Gap {
      double t1, s1, t2, s2;
    };
    std::deque<Gap> queue;
    auto push_gaps = [&] {
      queue.clear();
      auto it = samples.begin();
      for (; it != samples.end(); ++it) {
        auto next = std::next(it);
        if (next == samples.end())
          queue.push_back({it->first, it->second, samples.begin()->first + kTwoPi,
                           samples.begin()->second});
        else
          queue.push_back({it->first, it->second, next->first, next->second});
      }
    };
    push_gaps();
    int extra = 0;
    while (!queue.empty() && extra < opts.max_extra) {
      Gap g = queue.front();
      queue.pop_front();
      const double span = g.t2 - g.t1;
      if (span < 1e-7) continue;
      const double det = std::sin(span);
      if (det < 1e-12) continue;
      // Tangent-line intersection for the pair of directions.
      const double c1 = std::cos(g.t1), s1 = std::sin(g.t1);
      const double c2 = std::cos(g.t2), s2 = std::sin(g.t2);
      const double vx = (g.s1 * s2 - g.s2 * s1) / det;
      const double vy = (g.s2 * c1 - g.s1 * c2) / det;
      const double tm = 0.5 * (g.t1 + g.t2);
      const double sm = eval(tm);
      const double viol = std::cos(tm) * vx + std::sin(tm) * vy - sm;
      if (viol <= opts.viol_tol) continue;
      const double key = tm >= kTwoPi ? tm - kTwoPi : tm;
      if (!samples.emplace(key, sm).second) continue;
      ++extra;
      queue.push_back({g.t1, g.s1, tm, sm});
      queue.push_back({tm, sm, g.t2, g.s2});
    }
  }
  Region2D out;
  HalfspaceSystem hs;
  hs.dims = {"R1", "R2"};
  for (const auto& [t, s] : samples) {
    out.angles.push_back(t);
    out.dirs.push_back({std::cos(t), std::sin(t)});
    out.support.push_back(s);
    hs.rows.push_back({{std::cos(t), std::sin(t)}, s, Sense::le, ""});
  }
  auto poly = polygon_from_halfspaces(hs);
  // Merge vertices closer than the tolerance along the hull.
  std::vector<std::array<double, 2>> merged;
  for (const auto& v : poly) {
    if (!merged.empty() && std::hypot(v[0] - merged.back()[0], v[1] - merged.back()[1]) <=
                               opts.merge_tol)
      continue;
    merged.push_back(v);
  }
  if (merged.size() > 1 &&
      std::hypot(merged.front()[0] - merged.back()[0],
                 merged.front()[1] - merged.back()[1]) <= opts.merge_tol)
    merged.pop_back();
  out.vertices = std::move(merged);
  return out;
}

// Vertices of the polygon cut out by a two-dimensional halfspace system,
// found by pairwise line intersection, filtering, and a convex hull pass.
// Returned in counterclockwise order.
inline std::vector<std::array<double, 2>> polygon_from_halfspaces(
    const HalfspaceSystem& hs) {
  if (hs.dims.size() != 2) throw invalid_input_error("two dimensions required");
  auto [a, b] = detail::le_rows(hs);
  std::vector<std::array<double, 2>> pts;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = i + 1; j < a.size(); ++j) {
      const double det = a[i][0] * a[j][1] - a[i][1] * a[j][0];
      if (std::fabs(det) < 1e-12) continue;
      const double x = (b[i] * a[j][1] - b[j] * a[i][1]) / det;
      const double y = (b[j] * a[i][0] - b[i] * a[j][0]) / det;
      bool ok = true;
      for (size_t k = 0; k < a.size() && ok; ++k)
        ok = a[k][0] * x + a[k][1] * y <= b[k] + 1e-7 * std::max(1.0, std::fabs(b[k]));
      if (ok) pts.push_back({x, y});
    }
  }
  // Merge duplicates.
  std::vector<std::array<double, 2>> uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : uniq)
      if (std::hypot(p[0] - q[0], p[1] - q[1]) <= 1e-9) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() < 3) return uniq;
  std::sort(uniq.begin(), uniq.end());
  auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& p,
                  const std::array<double, 2>& q) {
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
  };
  std::vector<std::array<double, 2>> hull(2 * uniq.size());
  size_t k = 0;
  for (const auto& p : uniq) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 1e-12) --k;
    hull[k++] = p;
  }
  const size_t lower = k + 1;
  for (auto it = uniq.rbegin() + 1; it != uniq.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 1e-12) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

namespace detail {

inline double point_segment_dist(const std::array<double, 2>& p,
                                 const std::array<double, 2>& a,
                                 const std::array<double, 2>& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2, 0.0, 1.0);
  return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

inline double point_polygon_dist(const std::array<double, 2>& p,
                                 const std::vector<std::array<double, 2>>& poly) {
  if (poly.empty()) throw invalid_input_error("empty polygon");
  if (poly.size() == 1) return std::hypot(p[0] - poly[0][0], p[1] - poly[0][1]);
  bool inside = poly.size() >= 3;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    if (inside) {
      const double cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
      if (cr < -1e-12) inside = false;
    }
    best = std::min(best, point_segment_dist(p, a, b));
  }
  return inside ? 0.0 : best;
}

}  // namespace detail

// Hausdorff distance between two convex polygons given as vertex lists.
// Inputs are rebuilt as hulls first, so vertex order does not matter.
inline double hausdorff(const std::vector<std::array<double, 2>>& p,
                        const std::vector<std::array<double, 2>>& q) {
  auto hull_of = [](std::vector<std::array<double, 2>> pts) {
    if (pts.size() < 3) return pts;
    std::sort(pts.begin(), pts.end());
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> hull(2 * pts.size());
    size_t k = 0;
    for (const auto& pt : pts) {
      while (k >= 2 && cross(hull[k - 2], hull[k - 1], pt) <= 0.0) --k;
      hull[k++] = pt;
    }
    const size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
      while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
      hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
  };
  const auto hp = hull_of(p);
  const auto hq = hull_of(q);
  double best = 0.0;
  for (const auto& v : hp) best = std::max(best, detail::point_polygon_dist(v, hq));
  for (const auto& v : hq) best = std::max(best, detail::point_polygon_dist(v, hp));
  return best;
}

}  // namespace cicb
