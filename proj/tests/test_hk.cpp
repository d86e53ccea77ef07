#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "cicb/bounds.hpp"
#include "cicb/channel.hpp"
#include "cicb/constraints.hpp"
#include "cicb/gaussian.hpp"
#include "cicb/polytope.hpp"
#include "cicb/rng.hpp"

#include "hk_oracle.hpp"

using namespace cicb;
using cd = std::complex<double>;

namespace {

struct Ratios {
  double snr1, inr1, snr2, inr2;
};

Ratios ratios_of(const CompoundChannel& ch) {
  return {std::norm(ch.rx1[0].direct) * ch.p1, std::norm(ch.rx1[0].cross) * ch.p2,
          std::norm(ch.rx2[0].direct) * ch.p2, std::norm(ch.rx2[0].cross) * ch.p1};
}

CompoundChannel one_state_channel(rng_t& gen) {
  CompoundChannel ch;
  ch.p1 = std::pow(10.0, 1.5 * runif(gen));
  ch.p2 = std::pow(10.0, 1.5 * runif(gen));
  ch.rx1 = {{random_gain(gen, -10.0, 10.0), random_gain(gen, -10.0, 10.0)}};
  ch.rx2 = {{random_gain(gen, -10.0, 10.0), random_gain(gen, -10.0, 10.0)}};
  return canonicalize(ch);
}

}  // namespace

TEST_CASE("compact evaluator reproduces the frozen constant") {
  const auto k = hk::compute(4.0, 2.25, 4.0, 2.25);
  CHECK(k.c1 == Catch::Approx(1.7500217469916526).margin(1e-14));
  CHECK(k.c2 == Catch::Approx(k.c1).margin(1e-15));

  CHECK(k.a1 <= k.b1);
  CHECK(k.b1 <= k.d1);
  CHECK(k.a1 <= k.c1);
  CHECK(k.c1 <= k.d1);
  CHECK(k.a2 <= k.b2);
  CHECK(k.b2 <= k.d2);
  CHECK(k.a2 <= k.c2);
  CHECK(k.c2 <= k.d2);

  const auto rows = hk::region_rows(k);
  REQUIRE(rows.size() == 7);
  CHECK(rows[2].rhs <= k.d1 + k.a2 + 1e-15);
  CHECK(rows[2].rhs <= k.b1 + k.b2 + 1e-15);
  CHECK(rows[2].rhs <= k.a1 + k.d2 + 1e-15);
}

TEST_CASE("closed forms match the pipeline constants on one state") {
  rng_t gen(271828);
  const auto cons = gen_nstate(1);
  REQUIRE(cons.rows.size() == 8);
  for (int rep = 0; rep < 6; ++rep) {
    const auto ch = one_state_channel(gen);
    const auto r = ratios_of(ch);
    const auto k = hk::compute(r.snr1, r.inr1, r.snr2, r.inr2);
    const auto vals = evaluate_mi(cons, build_system(build_degraded_chain(ch)));
    const std::vector<double> expect = {k.a1, k.b1, k.c1, k.d1, k.a2, k.b2, k.c2, k.d2};
    for (size_t i = 0; i < expect.size(); ++i)
      CHECK(vals[i] == Catch::Approx(expect[i]).margin(1e-9));
  }
}

TEST_CASE("pipeline support matches the compact region") {
  rng_t gen(314159);
  const auto cons = gen_nstate(1);
  for (int rep = 0; rep < 5; ++rep) {
    const auto ch = one_state_channel(gen);
    const auto r = ratios_of(ch);
    const auto k = hk::compute(r.snr1, r.inr1, r.snr2, r.inr2);
    const auto hs = make_halfspaces(cons, evaluate_mi(cons, build_system(build_degraded_chain(ch))));
    for (int i = 0; i <= 8; ++i) {
      const double t = 0.5 * std::acos(-1.0) * i / 8.0;
      const double a = std::max(std::cos(t), 0.0);
      const double b = std::max(std::sin(t), 0.0);
      CHECK(support_value(hs, a, b) == Catch::Approx(hk::support(k, a, b)).margin(1e-7));
    }
  }
}

TEST_CASE("duplicate-state channels fold back to the single-state region") {
  rng_t gen(161803);
  const auto cons = gen_nstate(2);
  for (int rep = 0; rep < 4; ++rep) {
    auto ch = one_state_channel(gen);
    const auto r = ratios_of(ch);
    const auto k = hk::compute(r.snr1, r.inr1, r.snr2, r.inr2);
    ch.rx1.push_back(ch.rx1[0]);
    ch.rx2.push_back(ch.rx2[0]);
    ch = canonicalize(ch);
    REQUIRE(ch.rx1.size() == 2);
    const auto hs = make_halfspaces(cons, evaluate_mi(cons, build_system(build_degraded_chain(ch))));
    for (int i = 0; i <= 8; ++i) {
      const double t = 0.5 * std::acos(-1.0) * i / 8.0;
      const double a = std::max(std::cos(t), 0.0);
      const double b = std::max(std::sin(t), 0.0);
      CHECK(support_value(hs, a, b) == Catch::Approx(hk::support(k, a, b)).margin(1e-7));
    }
  }
}
