#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cicb/bounds.hpp"
#include "cicb/channel.hpp"
#include "cicb/constraints.hpp"
#include "cicb/errors.hpp"
#include "cicb/gaussian.hpp"
#include "cicb/polytope.hpp"

namespace cicb {

// Worst-case rate loss of one layered level whose interference power is g,
// log2((2g+1)/(g+1)). Increasing in g and always below one bit.
inline double level_gap(double g) {
  if (!(g >= 0.0)) throw invalid_input_error("interference power must be nonnegative");
  return std::log2((2.0 * g + 1.0) / (g + 1.0));
}

struct DeltaPair {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

// Per-receiver shrink constants: the largest information a sender's input
// carries about its interference chain beyond the decoded layer copy, taken
// over the receiver's states.
inline DeltaPair compute_delta(const GaussianSystem& sys) {
  const auto& chain = sys.chain();
  DeltaPair d;
  for (int s = 1; s <= chain.n_states; ++s) {
    d.delta1 = std::max(d.delta1, cond_mi(sys, {{x2()}, {s2(s)}, {u2(s)}}));
    d.delta2 = std::max(d.delta2, cond_mi(sys, {{x1()}, {s1(s)}, {u1(s)}}));
  }
  return d;
}

struct GapReport {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double per_direction_max_gap = 0.0;
  bool certified = false;
};

// Builds both bounds and checks the shrink guarantee: the gap between the
// two region supports in every first-quadrant direction stays below the
// larger shrink constant, and every outer-region vertex moved in by
// (delta1, delta2) and clipped at zero still satisfies the sampled inner
// support inequalities. The outer support is read off the swept polygon
// rather than a single certificate, because one slack-free certificate is
// only an upper bound on the outer region near the axes; the swept
// intersection carries the tilted cuts that make it tight.
inline GapReport certify(const CompoundChannel& ch, int resolution = 121) {
  if (resolution < 3) throw invalid_input_error("resolution must be at least 3");
  const auto chain = build_degraded_chain(canonicalize(ch));
  const auto sys = build_system(chain);
  const auto cons = gen_nstate(chain.n_states, RegionForm::projected);
  const auto values = evaluate_mi(cons, sys);
  const auto coeffs = outer_coeffs(cons, sys);
  const auto hs = make_halfspaces(cons, values);
  const auto d = compute_delta(sys);

  GapReport report;
  report.delta1 = d.delta1;
  report.delta2 = d.delta2;
  bool ok = d.delta1 < 1.0 && d.delta2 < 1.0;
  const double bound = std::max(d.delta1, d.delta2);

  const auto outer_region = region_outer(cons, coeffs, resolution);
  auto outer_support = [&](double a, double b) {
    double best = 0.0;
    for (const auto& vtx : outer_region.vertices)
      best = std::max(best, a * vtx[0] + b * vtx[1]);
    return best;
  };

  const double pi_v = 3.14159265358979323846;
  std::vector<double> dir_a(resolution), dir_b(resolution), inner(resolution);
  for (int i = 0; i < resolution; ++i) {
    const double t = 0.5 * pi_v * i / (resolution - 1);
    dir_a[i] = std::max(std::cos(t), 0.0);
    dir_b[i] = std::max(std::sin(t), 0.0);
    inner[i] = support_value(hs, dir_a[i], dir_b[i]);
    const double gap = (outer_support(dir_a[i], dir_b[i]) - inner[i]) / (dir_a[i] + dir_b[i]);
    report.per_direction_max_gap = std::max(report.per_direction_max_gap, gap);
    if (gap > bound + 1e-7) ok = false;
  }

  for (const auto& vtx : outer_region.vertices) {
    const double r1 = std::max(vtx[0] - d.delta1, 0.0);
    const double r2 = std::max(vtx[1] - d.delta2, 0.0);
    for (int i = 0; i < resolution; ++i)
      if (dir_a[i] * r1 + dir_b[i] * r2 > inner[i] + 1e-6) ok = false;
  }

  report.certified = ok;
  return report;
}

}  // namespace cicb
