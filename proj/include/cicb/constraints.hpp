#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "cicb/errors.hpp"
#include "cicb/gaussian.hpp"

namespace cicb {

// One additive rate component. level 0 is the private layer; levels 1..N are
// the common layers aimed at states 1 (strongest interference) through N
// (weakest). user is 1 or 2.
struct RateComponent {
  int user = 1;
  int level = 0;
  auto operator<=>(const RateComponent&) const = default;
};

// Which nonnegativity convention a constraint system carries. projected keeps
// only the per-user totals nonnegative (individual components may be
// negative); conditional requires every component nonnegative and activates
// each rate row only when its guard sum is positive.
enum class RegionForm { projected, conditional };

// A single rate inequality: sum of the lhs components bounded by the mutual
// information described by mi, attributed to one receiver state. guard lists
// the own-user components whose sum must be positive for the row to bind in
// the conditional form.
struct ConstraintSpec {
  std::string tag;
  int rx_user = 1;
  int rx_state = 1;
  std::vector<RateComponent> lhs;
  MISpec mi;
  std::vector<RateComponent> guard;
};

struct ConstraintSystem {
  int n_states = 0;
  RegionForm form = RegionForm::projected;
  std::vector<ConstraintSpec> rows;

  int dim() const { return 2 * (n_states + 1); }

  // Component order: user 1 levels 0..N, then user 2 levels 0..N.
  int comp_index(RateComponent c) const {
    if (c.user < 1 || c.user > 2 || c.level < 0 || c.level > n_states)
      throw invalid_input_error("rate component outside the system");
    return (c.user - 1) * (n_states + 1) + c.level;
  }

  RateComponent comp_at(int idx) const {
    if (idx < 0 || idx >= dim())
      throw invalid_input_error("rate component index out of range");
    return {idx / (n_states + 1) + 1, idx % (n_states + 1)};
  }
};

inline std::string comp_name(RateComponent c) {
  return "R" + std::to_string(c.user) +
         (c.level == 0 ? std::string("p") : "s" + std::to_string(c.level));
}

// Human-readable rendering of one constraint, e.g.
// "R1p + R2s2 <= I(Y1s2 ; X1, U2s2 | U1s1)".
inline std::string describe(const ConstraintSpec& row) {
  auto lhs = row.lhs;
  std::sort(lhs.begin(), lhs.end());
  std::string out;
  for (size_t i = 0; i < lhs.size(); ++i) {
    if (i) out += " + ";
    out += comp_name(lhs[i]);
  }
  out += " <= I(";
  for (size_t i = 0; i < row.mi.targets.size(); ++i) {
    if (i) out += ", ";
    out += var_name(row.mi.targets[i]);
  }
  out += " ; ";
  for (size_t i = 0; i < row.mi.subjects.size(); ++i) {
    if (i) out += ", ";
    out += var_name(row.mi.subjects[i]);
  }
  if (!row.mi.given.empty()) {
    out += " | ";
    for (size_t i = 0; i < row.mi.given.size(); ++i) {
      if (i) out += ", ";
      out += var_name(row.mi.given[i]);
    }
  }
  out += ")";
  return out;
}

namespace detail {

inline ConstraintSpec make_row(std::string tag, int user, int state,
                               std::vector<RateComponent> lhs, std::vector<VarId> targets,
                               std::vector<VarId> subjects, std::vector<VarId> given,
                               std::vector<RateComponent> guard) {
  ConstraintSpec row;
  row.tag = std::move(tag);
  row.rx_user = user;
  row.rx_state = state;
  row.lhs = std::move(lhs);
  row.mi.targets = std::move(targets);
  row.mi.subjects = std::move(subjects);
  row.mi.given = std::move(given);
  row.guard = std::move(guard);
  return row;
}

}  // namespace detail

// Generates the rate constraint system for N receiver states per user.
//
// At receiver (k, n) a decoding error can involve any prefix of the own-user
// layers (private only, or private plus common layers 1..j) and optionally a
// run of the interferer's common layers starting at level n and ending at any
// m in n..N. Each combination yields one row:
//   - left side: the erred components,
//   - information bound: the receiver output against the own input (plus the
//     interferer's level-n copy when interferer layers err), conditioned on
//     the first own layer not in error and the first interferer layer past
//     the run (or the interferer's level-n copy when no interferer layer
//     errs),
//   - guard: the own-user components on the left side.
// Rows are emitted user 1 first, states from weakest (n = N) down to
// strongest (n = 1), own prefix growing outward, interferer run shortest
// first.
inline ConstraintSystem gen_nstate(int n_states, RegionForm form = RegionForm::projected) {
  if (n_states < 1) throw invalid_input_error("state count must be at least 1");
  const int n = n_states;
  ConstraintSystem sys;
  sys.n_states = n;
  sys.form = form;

  auto u_of = [](int user, int state) {
    return user == 1 ? u1(state) : u2(state);
  };
  auto y_of = [](int user, int state) {
    return user == 1 ? y1(state) : y2(state);
  };
  auto x_of = [](int user) { return user == 1 ? x1() : x2(); };

  for (int k = 1; k <= 2; ++k) {
    const int ko = 3 - k;
    for (int state = n; state >= 1; --state) {
      for (int j = 0; j <= n; ++j) {
        for (int m = state - 1; m <= n; ++m) {
          // m == state-1 encodes "no interferer layer in error".
          const bool intf = m >= state;
          ConstraintSpec row;
          row.tag = "rx" + std::to_string(k) + ".s" + std::to_string(state) + ".o" +
                    std::to_string(j) + ".e" + std::to_string(intf ? m : 0);
          row.rx_user = k;
          row.rx_state = state;
          for (int l = 0; l <= j; ++l) {
            row.lhs.push_back({k, l});
            row.guard.push_back({k, l});
          }
          if (intf)
            for (int l = state; l <= m; ++l) row.lhs.push_back({ko, l});
          row.mi.targets = {y_of(k, state)};
          row.mi.subjects = {x_of(k)};
          if (intf) row.mi.subjects.push_back(u_of(ko, state));
          if (j < n) row.mi.given.push_back(u_of(k, j + 1));
          if (intf) {
            if (m < n) row.mi.given.push_back(u_of(ko, m + 1));
          } else {
            row.mi.given.push_back(u_of(ko, state));
          }
          sys.rows.push_back(std::move(row));
        }
      }
    }
  }
  return sys;
}

// The two-state constraint system written out literally, row by row. Kept
// independent of gen_nstate so the two can be checked against each other.
inline ConstraintSystem gen_2state(RegionForm form = RegionForm::projected) {
  using detail::make_row;
  ConstraintSystem sys;
  sys.n_states = 2;
  sys.form = form;
  const RateComponent r1p{1, 0}, r1a{1, 1}, r1b{1, 2};
  const RateComponent r2p{2, 0}, r2a{2, 1}, r2b{2, 2};
  auto& r = sys.rows;

  // receiver 1, weak state (six rows)
  r.push_back(make_row("rx1.s2.o0.e0", 1, 2, {r1p}, {y1(2)}, {x1()}, {u1(1), u2(2)}, {r1p}));
  r.push_back(make_row("rx1.s2.o0.e2", 1, 2, {r1p, r2b}, {y1(2)}, {x1(), u2(2)}, {u1(1)}, {r1p}));
  r.push_back(make_row("rx1.s2.o1.e0", 1, 2, {r1p, r1a}, {y1(2)}, {x1()}, {u1(2), u2(2)}, {r1p, r1a}));
  r.push_back(make_row("rx1.s2.o1.e2", 1, 2, {r1p, r1a, r2b}, {y1(2)}, {x1(), u2(2)}, {u1(2)}, {r1p, r1a}));
  r.push_back(make_row("rx1.s2.o2.e0", 1, 2, {r1p, r1a, r1b}, {y1(2)}, {x1()}, {u2(2)}, {r1p, r1a, r1b}));
  r.push_back(make_row("rx1.s2.o2.e2", 1, 2, {r1p, r1a, r1b, r2b}, {y1(2)}, {x1(), u2(2)}, {}, {r1p, r1a, r1b}));

  // receiver 1, strong state (nine rows)
  r.push_back(make_row("rx1.s1.o0.e0", 1, 1, {r1p}, {y1(1)}, {x1()}, {u1(1), u2(1)}, {r1p}));
  r.push_back(make_row("rx1.s1.o0.e1", 1, 1, {r1p, r2a}, {y1(1)}, {x1(), u2(1)}, {u1(1), u2(2)}, {r1p}));
  r.push_back(make_row("rx1.s1.o0.e2", 1, 1, {r1p, r2a, r2b}, {y1(1)}, {x1(), u2(1)}, {u1(1)}, {r1p}));
  r.push_back(make_row("rx1.s1.o1.e0", 1, 1, {r1p, r1a}, {y1(1)}, {x1()}, {u1(2), u2(1)}, {r1p, r1a}));
  r.push_back(make_row("rx1.s1.o1.e1", 1, 1, {r1p, r1a, r2a}, {y1(1)}, {x1(), u2(1)}, {u1(2), u2(2)}, {r1p, r1a}));
  r.push_back(make_row("rx1.s1.o1.e2", 1, 1, {r1p, r1a, r2a, r2b}, {y1(1)}, {x1(), u2(1)}, {u1(2)}, {r1p, r1a}));
  r.push_back(make_row("rx1.s1.o2.e0", 1, 1, {r1p, r1a, r1b}, {y1(1)}, {x1()}, {u2(1)}, {r1p, r1a, r1b}));
  r.push_back(make_row("rx1.s1.o2.e1", 1, 1, {r1p, r1a, r1b, r2a}, {y1(1)}, {x1(), u2(1)}, {u2(2)}, {r1p, r1a, r1b}));
  r.push_back(make_row("rx1.s1.o2.e2", 1, 1, {r1p, r1a, r1b, r2a, r2b}, {y1(1)}, {x1(), u2(1)}, {}, {r1p, r1a, r1b}));

  // receiver 2, weak state
  r.push_back(make_row("rx2.s2.o0.e0", 2, 2, {r2p}, {y2(2)}, {x2()}, {u2(1), u1(2)}, {r2p}));
  r.push_back(make_row("rx2.s2.o0.e2", 2, 2, {r2p, r1b}, {y2(2)}, {x2(), u1(2)}, {u2(1)}, {r2p}));
  r.push_back(make_row("rx2.s2.o1.e0", 2, 2, {r2p, r2a}, {y2(2)}, {x2()}, {u2(2), u1(2)}, {r2p, r2a}));
  r.push_back(make_row("rx2.s2.o1.e2", 2, 2, {r2p, r2a, r1b}, {y2(2)}, {x2(), u1(2)}, {u2(2)}, {r2p, r2a}));
  r.push_back(make_row("rx2.s2.o2.e0", 2, 2, {r2p, r2a, r2b}, {y2(2)}, {x2()}, {u1(2)}, {r2p, r2a, r2b}));
  r.push_back(make_row("rx2.s2.o2.e2", 2, 2, {r2p, r2a, r2b, r1b}, {y2(2)}, {x2(), u1(2)}, {}, {r2p, r2a, r2b}));

  // receiver 2, strong state
  r.push_back(make_row("rx2.s1.o0.e0", 2, 1, {r2p}, {y2(1)}, {x2()}, {u2(1), u1(1)}, {r2p}));
  r.push_back(make_row("rx2.s1.o0.e1", 2, 1, {r2p, r1a}, {y2(1)}, {x2(), u1(1)}, {u2(1), u1(2)}, {r2p}));
  r.push_back(make_row("rx2.s1.o0.e2", 2, 1, {r2p, r1a, r1b}, {y2(1)}, {x2(), u1(1)}, {u2(1)}, {r2p}));
  r.push_back(make_row("rx2.s1.o1.e0", 2, 1, {r2p, r2a}, {y2(1)}, {x2()}, {u2(2), u1(1)}, {r2p, r2a}));
  r.push_back(make_row("rx2.s1.o1.e1", 2, 1, {r2p, r2a, r1a}, {y2(1)}, {x2(), u1(1)}, {u2(2), u1(2)}, {r2p, r2a}));
  r.push_back(make_row("rx2.s1.o1.e2", 2, 1, {r2p, r2a, r1a, r1b}, {y2(1)}, {x2(), u1(1)}, {u2(2)}, {r2p, r2a}));
  r.push_back(make_row("rx2.s1.o2.e0", 2, 1, {r2p, r2a, r2b}, {y2(1)}, {x2()}, {u1(1)}, {r2p, r2a, r2b}));
  r.push_back(make_row("rx2.s1.o2.e1", 2, 1, {r2p, r2a, r2b, r1a}, {y2(1)}, {x2(), u1(1)}, {u1(2)}, {r2p, r2a, r2b}));
  r.push_back(make_row("rx2.s1.o2.e2", 2, 1, {r2p, r2a, r2b, r1a, r1b}, {y2(1)}, {x2(), u1(1)}, {}, {r2p, r2a, r2b}));

  return sys;
}

// Side-information sets, one per row: the auxiliaries handed to the receiver
// when bounding that row from above. They coincide with the row's
// conditioning set.
inline std::vector<std::vector<VarId>> genie_table(const ConstraintSystem& sys) {
  std::vector<std::vector<VarId>> out;
  out.reserve(sys.rows.size());
  for (const auto& row : sys.rows) out.push_back(row.mi.given);
  return out;
}

// Field-wise equality of two systems up to row naming and within-set
// ordering. Row order itself must match.
inline bool structurally_equal(const ConstraintSystem& a, const ConstraintSystem& b) {
  if (a.n_states != b.n_states || a.form != b.form || a.rows.size() != b.rows.size())
    return false;
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  for (size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rb = b.rows[i];
    if (ra.rx_user != rb.rx_user || ra.rx_state != rb.rx_state) return false;
    if (sorted(ra.lhs) != sorted(rb.lhs)) return false;
    if (sorted(ra.guard) != sorted(rb.guard)) return false;
    if (sorted(ra.mi.targets) != sorted(rb.mi.targets)) return false;
    if (sorted(ra.mi.subjects) != sorted(rb.mi.subjects)) return false;
    if (sorted(ra.mi.given) != sorted(rb.mi.given)) return false;
  }
  return true;
}

}  // namespace cicb
