#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cicb/errors.hpp"

namespace cicb {

// One receiver state: the gain from the intended transmitter (direct) and the
// gain from the other transmitter (cross). Receiver 1 states pair the gains
// (tx1 -> rx1, tx2 -> rx1); receiver 2 states pair (tx2 -> rx2, tx1 -> rx2).
struct ReceiverState {
  std::complex<double> direct{0.0, 0.0};
  std::complex<double> cross{0.0, 0.0};
};

// A jointly specified channel state: all four gains at once.
// h11: tx1 -> rx1, h21: tx2 -> rx1, h12: tx1 -> rx2, h22: tx2 -> rx2.
struct GainState {
  std::complex<double> h11, h21, h12, h22;
};

// Two-user compound channel: a finite set of states per receiver plus the two
// transmit power constraints. Only the per-receiver marginal state sets enter
// any capacity computation, so joint state lists are reduced to marginals on
// input (see from_joint).
struct CompoundChannel {
  std::vector<ReceiverState> rx1;
  std::vector<ReceiverState> rx2;
  double p1 = 0.0;
  double p2 = 0.0;
};

namespace detail {

inline bool finite(std::complex<double> z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Sort key: strongest cross gain first; ties broken by descending direct
// magnitude, then ascending cross phase, then ascending direct phase so the
// order is total and deterministic.
inline bool state_before(const ReceiverState& a, const ReceiverState& b) {
  const double ca = std::abs(a.cross), cb = std::abs(b.cross);
  if (ca != cb) return ca > cb;
  const double da = std::abs(a.direct), db = std::abs(b.direct);
  if (da != db) return da > db;
  const double pa = std::arg(a.cross), pb = std::arg(b.cross);
  if (pa != pb) return pa < pb;
  return std::arg(a.direct) < std::arg(b.direct);
}

inline bool states_equal(const ReceiverState& a, const ReceiverState& b) {
  return a.direct == b.direct && a.cross == b.cross;
}

}  // namespace detail

// Validates powers and gain values; throws invalid_input_error on violation.
inline void validate_channel(const CompoundChannel& ch) {
  if (!(std::isfinite(ch.p1) && ch.p1 >= 0.0) || !(std::isfinite(ch.p2) && ch.p2 >= 0.0))
    throw invalid_input_error("transmit powers must be finite and nonnegative");
  if (ch.rx1.empty() || ch.rx2.empty())
    throw invalid_input_error("each receiver needs at least one state");
  for (const auto* list : {&ch.rx1, &ch.rx2})
    for (const auto& st : *list)
      if (!detail::finite(st.direct) || !detail::finite(st.cross))
        throw invalid_input_error("channel gains must be finite");
}

// Builds the per-receiver channel from a jointly specified state list.
// Marginal state pairs are extracted per receiver; exact duplicates are
// dropped (first occurrence kept). The result is not yet canonical.
inline CompoundChannel from_joint(const std::vector<GainState>& joint, double p1, double p2) {
  if (joint.empty()) throw invalid_input_error("joint state list is empty");
  CompoundChannel ch;
  ch.p1 = p1;
  ch.p2 = p2;
  auto push_unique = [](std::vector<ReceiverState>& list, ReceiverState st) {
    for (const auto& have : list)
      if (detail::states_equal(have, st)) return;
    list.push_back(st);
  };
  for (const auto& g : joint) {
    push_unique(ch.rx1, {g.h11, g.h21});
    push_unique(ch.rx2, {g.h22, g.h12});
  }
  validate_channel(ch);
  return ch;
}

// True when both lists are sorted in canonical order and have equal length.
inline bool is_canonical(const CompoundChannel& ch) {
  if (ch.rx1.size() != ch.rx2.size()) return false;
  auto sorted = [](const std::vector<ReceiverState>& v) {
    for (size_t i = 1; i < v.size(); ++i)
      if (detail::state_before(v[i], v[i - 1])) return false;
    return true;
  };
  return sorted(ch.rx1) && sorted(ch.rx2);
}

// Canonical form: each receiver's states sorted strongest-cross first and the
// shorter list padded by duplicating its weakest (last) state until both
// receivers carry the same number of states. Duplicated states are harmless:
// they add fully degenerate degradation stages. Idempotent.
inline CompoundChannel canonicalize(CompoundChannel ch) {
  validate_channel(ch);
  std::stable_sort(ch.rx1.begin(), ch.rx1.end(), detail::state_before);
  std::stable_sort(ch.rx2.begin(), ch.rx2.end(), detail::state_before);
  while (ch.rx1.size() < ch.rx2.size()) ch.rx1.push_back(ch.rx1.back());
  while (ch.rx2.size() < ch.rx1.size()) ch.rx2.push_back(ch.rx2.back());
  return ch;
}

// One stage of a degradation chain at a receiver. Stage n (0-based) reproduces
// stage n-1 scaled by ratio plus fresh noise of standard deviation residual,
// which keeps the additive noise at unit variance in every stage:
//   interference_n = cross_n * X_interferer + W_n,
//   W_n = ratio_n * W_{n-1} + residual_n * Z_n,  |ratio|^2 + residual^2 = 1.
// Stage 0 has ratio 0 and residual 1 by convention.
struct ChainStage {
  std::complex<double> direct{0.0, 0.0};
  std::complex<double> cross{0.0, 0.0};
  std::complex<double> ratio{0.0, 0.0};
  double residual = 1.0;
};

// Degradation chains for both receivers of a canonical channel, plus the
// powers. rx1 stages describe the interference from user 2 as seen across
// receiver 1's states; rx2 stages mirror this for user 1's interference.
struct DegradedChain {
  int n_states = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  std::vector<ChainStage> rx1;
  std::vector<ChainStage> rx2;
};

namespace detail {

inline std::vector<ChainStage> build_stages(const std::vector<ReceiverState>& states) {
  std::vector<ChainStage> out(states.size());
  for (size_t n = 0; n < states.size(); ++n) {
    out[n].direct = states[n].direct;
    out[n].cross = states[n].cross;
    if (n == 0) {
      out[n].ratio = {0.0, 0.0};
      out[n].residual = 1.0;
      continue;
    }
    const std::complex<double> prev = states[n - 1].cross;
    if (prev == std::complex<double>(0.0, 0.0)) {
      // Sorted order forces the current cross gain to be zero as well; the
      // stage is fresh unit noise.
      out[n].ratio = {0.0, 0.0};
      out[n].residual = 1.0;
      continue;
    }
    const std::complex<double> r = states[n].cross / prev;
    const double mag2 = std::norm(r);
    if (mag2 > 1.0 + 1e-12)
      throw invariant_error("degradation ratio exceeds unit magnitude");
    out[n].ratio = r;
    out[n].residual = std::sqrt(std::max(0.0, 1.0 - mag2));
  }
  return out;
}

}  // namespace detail

// Builds both degradation chains. The channel must be canonical.
inline DegradedChain build_degraded_chain(const CompoundChannel& ch) {
  validate_channel(ch);
  if (!is_canonical(ch))
    throw precondition_error("build_degraded_chain requires a canonical channel");
  DegradedChain chain;
  chain.n_states = static_cast<int>(ch.rx1.size());
  chain.p1 = ch.p1;
  chain.p2 = ch.p2;
  chain.rx1 = detail::build_stages(ch.rx1);
  chain.rx2 = detail::build_stages(ch.rx2);
  return chain;
}

}  // namespace cicb
