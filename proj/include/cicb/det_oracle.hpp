#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cicb/constraints.hpp"
#include "cicb/errors.hpp"
#include "cicb/gap.hpp"
#include "cicb/gaussian.hpp"
#include "cicb/polytope.hpp"

namespace cicb {

// Finite-alphabet two-user channel with deterministic interference chains.
// Stage 1 is the strongest interference observation, each later stage is a
// fixed function of the previous one, and every output table is invertible
// in the interference symbol once the own input is fixed.
struct DetChannel {
  int n_states = 0;
  int nx1 = 0, nx2 = 0;
  int ns1 = 0, ns2 = 0;
  int ny1 = 0, ny2 = 0;
  std::vector<int> s1_of_x1;
  std::vector<int> s2_of_x2;
  std::vector<std::vector<int>> s1_degrade;
  std::vector<std::vector<int>> s2_degrade;
  std::vector<std::vector<std::vector<int>>> y1;
  std::vector<std::vector<std::vector<int>>> y2;
};

// Independent per-user input distributions.
struct DiscreteDist {
  std::vector<double> p1;
  std::vector<double> p2;
};

struct DetFixture {
  std::string name;
  DetChannel channel;
};

namespace detail {

inline void check_table(const std::vector<int>& t, int len, int range,
                        const std::string& what) {
  if (static_cast<int>(t.size()) != len)
    throw invalid_input_error(what + " has the wrong length");
  for (int v : t)
    if (v < 0 || v >= range) throw invalid_input_error(what + " entry out of range");
}

// Symbol sets the chain can take at each stage, starting from the base map
// image and folding through the degradation tables.
inline std::vector<std::vector<int>> reachable_stages(
    const std::vector<int>& base, const std::vector<std::vector<int>>& degrade) {
  std::vector<std::vector<int>> stages;
  std::set<int> cur(base.begin(), base.end());
  stages.emplace_back(cur.begin(), cur.end());
  for (const auto& map : degrade) {
    std::set<int> next;
    for (int v : stages.back()) next.insert(map[v]);
    stages.emplace_back(next.begin(), next.end());
  }
  return stages;
}

inline void check_outputs(const std::vector<std::vector<std::vector<int>>>& y,
                          int n_states, int nx, int ns, int ny,
                          const std::vector<std::vector<int>>& reach,
                          const std::string& what) {
  if (static_cast<int>(y.size()) != n_states)
    throw invalid_input_error(what + " needs one table per state");
  for (int n = 0; n < n_states; ++n) {
    if (static_cast<int>(y[n].size()) != nx)
      throw invalid_input_error(what + " table has the wrong input count");
    for (int x = 0; x < nx; ++x) {
      check_table(y[n][x], ns, ny, what + " table row");
      std::set<int> seen;
      for (int s : reach[n])
        if (!seen.insert(y[n][x][s]).second)
          throw invalid_input_error(what +
                                    " is not invertible in the interference symbol");
    }
  }
}

}  // namespace detail

inline void validate(const DetChannel& ch) {
  if (ch.n_states < 1) throw invalid_input_error("channel needs at least one state");
  for (int n : {ch.nx1, ch.nx2, ch.ns1, ch.ns2, ch.ny1, ch.ny2})
    if (n < 1) throw invalid_input_error("alphabet sizes must be positive");
  detail::check_table(ch.s1_of_x1, ch.nx1, ch.ns1, "s1 base map");
  detail::check_table(ch.s2_of_x2, ch.nx2, ch.ns2, "s2 base map");
  if (static_cast<int>(ch.s1_degrade.size()) != ch.n_states - 1 ||
      static_cast<int>(ch.s2_degrade.size()) != ch.n_states - 1)
    throw invalid_input_error("degradation maps must cover stages 2 through N");
  for (const auto& m : ch.s1_degrade)
    detail::check_table(m, ch.ns1, ch.ns1, "s1 degradation map");
  for (const auto& m : ch.s2_degrade)
    detail::check_table(m, ch.ns2, ch.ns2, "s2 degradation map");
  const auto reach1 = detail::reachable_stages(ch.s1_of_x1, ch.s1_degrade);
  const auto reach2 = detail::reachable_stages(ch.s2_of_x2, ch.s2_degrade);
  detail::check_outputs(ch.y1, ch.n_states, ch.nx1, ch.ns2, ch.ny1, reach2, "y1");
  detail::check_outputs(ch.y2, ch.n_states, ch.nx2, ch.ns1, ch.ny2, reach1, "y2");
}

namespace detail {

inline void check_dist(const DetChannel& ch, const DiscreteDist& dist) {
  if (static_cast<int>(dist.p1.size()) != ch.nx1 ||
      static_cast<int>(dist.p2.size()) != ch.nx2)
    throw invalid_input_error("distribution length does not match the alphabets");
  for (const auto* side : {&dist.p1, &dist.p2}) {
    double total = 0.0;
    for (double p : *side) {
      if (p < 0.0) throw invalid_input_error("probabilities must be nonnegative");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9)
      throw invalid_input_error("probabilities must sum to one");
  }
}

inline int chain_value(const std::vector<int>& base,
                       const std::vector<std::vector<int>>& degrade, int x, int stage) {
  int v = base[x];
  for (int i = 0; i < stage - 1; ++i) v = degrade[i][v];
  return v;
}

// Every model variable is a fixed function of the input pair: the side
// copies coincide with the chains because an independent copy of a
// deterministic map given the input is the map itself.
inline int det_value(const DetChannel& ch, VarId id, int a, int b) {
  const bool chain_var = id.kind != Var::X1 && id.kind != Var::X2;
  if (chain_var && (id.state < 1 || id.state > ch.n_states))
    throw invalid_input_error("variable state outside the channel");
  switch (id.kind) {
    case Var::X1:
      return a;
    case Var::X2:
      return b;
    case Var::U1:
    case Var::S1:
      return chain_value(ch.s1_of_x1, ch.s1_degrade, a, id.state);
    case Var::U2:
    case Var::S2:
      return chain_value(ch.s2_of_x2, ch.s2_degrade, b, id.state);
    case Var::Y1:
      return ch.y1[id.state - 1][a][chain_value(ch.s2_of_x2, ch.s2_degrade, b, id.state)];
    case Var::Y2:
      return ch.y2[id.state - 1][b][chain_value(ch.s1_of_x1, ch.s1_degrade, a, id.state)];
  }
  throw invalid_input_error("unknown variable kind");
}

}  // namespace detail

// Exact joint entropy of the listed variables under independent inputs,
// by enumerating the input pair table.
inline double det_entropy(const DetChannel& ch, const DiscreteDist& dist,
                          const std::vector<VarId>& vars) {
  validate(ch);
  detail::check_dist(ch, dist);
  if (static_cast<double>(ch.nx1) * static_cast<double>(ch.nx2) > 1e7)
    throw resource_limit_error("joint input table exceeds the enumeration budget");

  std::map<std::vector<int>, double> table;
  std::vector<int> key(vars.size());
  for (int a = 0; a < ch.nx1; ++a) {
    if (dist.p1[a] == 0.0) continue;
    for (int b = 0; b < ch.nx2; ++b) {
      const double p = dist.p1[a] * dist.p2[b];
      if (p == 0.0) continue;
      for (size_t j = 0; j < vars.size(); ++j) key[j] = detail::det_value(ch, vars[j], a, b);
      table[key] += p;
    }
  }
  double h = 0.0;
  for (const auto& [k, p] : table)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

// I(subjects ; targets | given) from four joint entropies. The tuple orders
// keep duplicated deterministic coordinates aligned, so chain-versus-copy
// terms cancel without rounding residue.
inline double det_mi(const DetChannel& ch, const DiscreteDist& dist, const MISpec& spec) {
  auto cat = [](std::vector<VarId> a, const std::vector<VarId>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const auto tg = cat(spec.targets, spec.given);
  const double value = (det_entropy(ch, dist, tg) - det_entropy(ch, dist, spec.given)) -
                       (det_entropy(ch, dist, cat(tg, spec.subjects)) -
                        det_entropy(ch, dist, cat(spec.given, spec.subjects)));
  if (value < 0.0 && value >= -1e-9) return 0.0;
  if (value < 0.0)
    throw invariant_error("mutual information came out negative");
  return value;
}

inline std::vector<double> det_evaluate_mi(const DetChannel& ch, const DiscreteDist& dist,
                                           const ConstraintSystem& cons) {
  if (cons.n_states != ch.n_states)
    throw invalid_input_error("constraint system does not match the channel");
  std::vector<double> out;
  out.reserve(cons.rows.size());
  for (const auto& row : cons.rows) out.push_back(det_mi(ch, dist, row.mi));
  return out;
}

// Converse row costs: the output entropy term minus the interference
// entropy given the interferer's input, which is zero for deterministic
// maps. Each cost then equals the achievability value of the same row.
inline std::vector<double> det_outer_coeffs(const DetChannel& ch, const DiscreteDist& dist,
                                            const ConstraintSystem& cons) {
  if (cons.n_states != ch.n_states)
    throw invalid_input_error("constraint system does not match the channel");
  std::vector<double> out;
  out.reserve(cons.rows.size());
  for (const auto& row : cons.rows) {
    const VarId x_var = row.rx_user == 1 ? x2() : x1();
    const VarId s_var = row.rx_user == 1 ? s2(row.rx_state) : s1(row.rx_state);
    auto tg = row.mi.targets;
    tg.insert(tg.end(), row.mi.given.begin(), row.mi.given.end());
    const double lead = det_entropy(ch, dist, tg) - det_entropy(ch, dist, row.mi.given);
    const double floor_h =
        det_entropy(ch, dist, {x_var, s_var}) - det_entropy(ch, dist, {x_var});
    out.push_back(lead - floor_h);
  }
  return out;
}

// Builds both bounds from the exact table values and checks that they agree
// in every direction with vanishing shrink constants.
inline GapReport det_certify(const DetChannel& ch, const DiscreteDist& dist,
                             int resolution = 121) {
  if (resolution < 3) throw invalid_input_error("resolution must be at least 3");
  const auto cons = gen_nstate(ch.n_states, RegionForm::projected);
  const auto values = det_evaluate_mi(ch, dist, cons);
  const auto coeffs = det_outer_coeffs(ch, dist, cons);
  const auto hs = make_halfspaces(cons, values);

  GapReport report;
  for (int n = 1; n <= ch.n_states; ++n) {
    report.delta1 = std::max(report.delta1, det_mi(ch, dist, {{x2()}, {s2(n)}, {u2(n)}}));
    report.delta2 = std::max(report.delta2, det_mi(ch, dist, {{x1()}, {s1(n)}, {u1(n)}}));
  }
  bool ok = report.delta1 == 0.0 && report.delta2 == 0.0;

  const double pi_v = 3.14159265358979323846;
  for (int i = 0; i < resolution; ++i) {
    const double t = 0.5 * pi_v * i / (resolution - 1);
    const double a = std::max(std::cos(t), 0.0);
    const double b = std::max(std::sin(t), 0.0);
    const double inner = support_value(hs, a, b);
    const double outer =
        dual_min(cons, coeffs, a, b, {.allow_omega = false, .minimize_omega = false}).value;
    report.per_direction_max_gap =
        std::max(report.per_direction_max_gap, std::fabs(outer - inner) / (a + b));
    if (std::fabs(outer - inner) > 1e-9) ok = false;
  }
  report.certified = ok;
  return report;
}

inline std::vector<DetFixture> builtin_det_fixtures() {
  std::vector<DetFixture> out;

  {
    DetChannel ch;
    ch.n_states = 1;
    ch.nx1 = ch.nx2 = ch.ns1 = ch.ns2 = ch.ny1 = ch.ny2 = 2;
    ch.s1_of_x1 = {0, 1};
    ch.s2_of_x2 = {0, 1};
    ch.y1 = {{{0, 1}, {1, 0}}};
    ch.y2 = {{{0, 1}, {1, 0}}};
    out.push_back({"xor", ch});
  }

  {
    DetChannel ch;
    ch.n_states = 2;
    ch.nx1 = ch.nx2 = ch.ns1 = ch.ns2 = ch.ny1 = ch.ny2 = 4;
    ch.s1_of_x1 = {0, 1, 2, 3};
    ch.s2_of_x2 = {0, 1, 2, 3};
    ch.s1_degrade = {{0, 1, 0, 1}};
    ch.s2_degrade = {{0, 1, 0, 1}};
    std::vector<std::vector<int>> add(4, std::vector<int>(4));
    for (int x = 0; x < 4; ++x)
      for (int s = 0; s < 4; ++s) add[x][s] = (x + s) % 4;
    ch.y1 = {add, add};
    ch.y2 = {add, add};
    out.push_back({"mod4-chain", ch});
  }

  {
    DetChannel ch;
    ch.n_states = 1;
    ch.nx1 = ch.nx2 = 3;
    ch.ns1 = ch.ns2 = 2;
    ch.ny1 = ch.ny2 = 6;
    ch.s1_of_x1 = {0, 1, 0};
    ch.s2_of_x2 = {0, 1, 0};
    std::vector<std::vector<int>> pair(3, std::vector<int>(2));
    for (int x = 0; x < 3; ++x)
      for (int s = 0; s < 2; ++s) pair[x][s] = 2 * x + s;
    ch.y1 = {pair};
    ch.y2 = {pair};
    out.push_back({"pair-code", ch});
  }

  {
    DetChannel ch;
    ch.n_states = 1;
    ch.nx1 = 4;
    ch.nx2 = 2;
    ch.ns1 = ch.ns2 = 1;
    ch.ny1 = 4;
    ch.ny2 = 2;
    ch.s1_of_x1 = {0, 0, 0, 0};
    ch.s2_of_x2 = {0, 0};
    ch.y1 = {{{0}, {1}, {2}, {3}}};
    ch.y2 = {{{0}, {1}}};
    out.push_back({"clean", ch});
  }

  {
    DetChannel ch;
    ch.n_states = 2;
    ch.nx1 = 2;
    ch.nx2 = 3;
    ch.ns1 = 2;
    ch.ns2 = 3;
    ch.ny1 = 6;
    ch.ny2 = 3;
    ch.s1_of_x1 = {0, 1};
    ch.s2_of_x2 = {0, 1, 2};
    ch.s1_degrade = {{0, 0}};
    ch.s2_degrade = {{0, 1, 0}};
    std::vector<std::vector<int>> pair(2, std::vector<int>(3));
    for (int x = 0; x < 2; ++x)
      for (int s = 0; s < 3; ++s) pair[x][s] = 3 * x + s;
    std::vector<std::vector<int>> mod3(3, std::vector<int>(2));
    for (int x = 0; x < 3; ++x)
      for (int s = 0; s < 2; ++s) mod3[x][s] = (x + s) % 3;
    ch.y1 = {pair, pair};
    ch.y2 = {mod3, mod3};
    out.push_back({"mixed-alphabets", ch});
  }

  for (const auto& fx : out) validate(fx.channel);
  return out;
}

}  // namespace cicb
