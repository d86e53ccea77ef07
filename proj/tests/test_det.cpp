#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "cicb/constraints.hpp"
#include "cicb/det_oracle.hpp"
#include "cicb/errors.hpp"
#include "cicb/gaussian.hpp"
#include "cicb/polytope.hpp"
#include "cicb/rng.hpp"

using namespace cicb;

namespace {

DiscreteDist uniform_dist(const DetChannel& ch) {
  DiscreteDist d;
  d.p1.assign(ch.nx1, 1.0 / ch.nx1);
  d.p2.assign(ch.nx2, 1.0 / ch.nx2);
  return d;
}

DiscreteDist random_dist(const DetChannel& ch, rng_t& gen) {
  DiscreteDist d;
  d.p1.resize(ch.nx1);
  d.p2.resize(ch.nx2);
  for (auto* side : {&d.p1, &d.p2}) {
    double total = 0.0;
    for (auto& p : *side) {
      p = 0.05 + runif(gen);
      total += p;
    }
    for (auto& p : *side) p /= total;
  }
  return d;
}

DetChannel xor_channel() {
  DetChannel ch;
  ch.n_states = 1;
  ch.nx1 = ch.nx2 = ch.ns1 = ch.ns2 = ch.ny1 = ch.ny2 = 2;
  ch.s1_of_x1 = {0, 1};
  ch.s2_of_x2 = {0, 1};
  ch.y1 = {{{0, 1}, {1, 0}}};
  ch.y2 = {{{0, 1}, {1, 0}}};
  return ch;
}

DetChannel mod4_channel() {
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
  return ch;
}

}  // namespace

TEST_CASE("builtin fixtures validate and stay small") {
  const auto fixtures = builtin_det_fixtures();
  REQUIRE(fixtures.size() >= 5);
  std::set<std::string> names;
  for (const auto& fx : fixtures) {
    INFO(fx.name);
    names.insert(fx.name);
    CHECK_NOTHROW(validate(fx.channel));
    CHECK(fx.channel.n_states >= 1);
    CHECK(fx.channel.nx1 <= 8);
    CHECK(fx.channel.nx2 <= 8);
    CHECK(fx.channel.ns1 <= 8);
    CHECK(fx.channel.ns2 <= 8);
    CHECK(fx.channel.ny1 <= 8);
    CHECK(fx.channel.ny2 <= 8);
  }
  CHECK(names.size() == fixtures.size());
}

TEST_CASE("xor channel carries textbook entropies") {
  const auto ch = xor_channel();
  const auto uni = uniform_dist(ch);

  CHECK(det_entropy(ch, uni, {y1(1)}) == Catch::Approx(1.0).margin(1e-12));
  CHECK(det_entropy(ch, uni, {x1(), x2()}) == Catch::Approx(2.0).margin(1e-12));
  CHECK(det_mi(ch, uni, {{x1()}, {y1(1)}, {u2(1)}}) == Catch::Approx(1.0).margin(1e-12));
  CHECK(det_mi(ch, uni, {{x1()}, {y1(1)}, {u1(1), u2(1)}}) ==
        Catch::Approx(0.0).margin(1e-12));

  DiscreteDist skew;
  skew.p1 = {0.25, 0.75};
  skew.p2 = {0.5, 0.5};
  CHECK(det_mi(ch, skew, {{x1()}, {y1(1)}, {u2(1)}}) ==
        Catch::Approx(0.8112781244591328).margin(1e-12));
  CHECK(det_mi(ch, skew, {{x1(), u2(1)}, {y1(1)}, {}}) ==
        Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("modulo fixture hits frozen row values") {
  const auto ch = mod4_channel();
  const auto uni = uniform_dist(ch);
  const auto cons = gen_2state(RegionForm::projected);
  const auto vals = det_evaluate_mi(ch, uni, cons);
  REQUIRE(vals.size() == 30);
  CHECK(vals[0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(vals[4] == Catch::Approx(2.0).margin(1e-12));
  CHECK(vals[5] == Catch::Approx(2.0).margin(1e-12));
  CHECK(vals[14] == Catch::Approx(2.0).margin(1e-12));
  for (double v : vals) CHECK(v >= 0.0);
}

TEST_CASE("pair-coded outputs reveal the whole input") {
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
  validate(ch);

  const auto uni = uniform_dist(ch);
  CHECK(det_mi(ch, uni, {{x1()}, {y1(1)}, {u2(1)}}) ==
        Catch::Approx(1.584962500721156).margin(1e-12));
  CHECK(det_entropy(ch, uni, {y1(1)}) ==
        Catch::Approx(1.584962500721156 + 0.9182958340544896).margin(1e-12));
}

TEST_CASE("interference copies carry zero extra information") {
  rng_t gen(5150);
  for (const auto& fx : builtin_det_fixtures()) {
    INFO(fx.name);
    for (const auto& dist : {uniform_dist(fx.channel), random_dist(fx.channel, gen)}) {
      for (int n = 1; n <= fx.channel.n_states; ++n) {
        CHECK(det_mi(fx.channel, dist, {{x2()}, {s2(n)}, {u2(n)}}) == 0.0);
        CHECK(det_mi(fx.channel, dist, {{x1()}, {s1(n)}, {u1(n)}}) == 0.0);
        CHECK(det_entropy(fx.channel, dist, {u1(n), s1(n)}) ==
              det_entropy(fx.channel, dist, {s1(n)}));
      }
    }
  }
}

TEST_CASE("deterministic channels certify with coinciding bounds") {
  rng_t gen(31337);
  for (const auto& fx : builtin_det_fixtures()) {
    INFO(fx.name);
    for (const auto& dist : {uniform_dist(fx.channel), random_dist(fx.channel, gen)}) {
      const auto report = det_certify(fx.channel, dist, 33);
      CHECK(report.certified);
      CHECK(report.delta1 == 0.0);
      CHECK(report.delta2 == 0.0);
      CHECK(report.per_direction_max_gap <= 1e-9);
    }
  }
}

TEST_CASE("xor region is the unit triangle") {
  const auto ch = xor_channel();
  const auto uni = uniform_dist(ch);
  const auto cons = gen_nstate(1, RegionForm::projected);
  const auto hs = make_halfspaces(cons, det_evaluate_mi(ch, uni, cons));
  CHECK(support_value(hs, 1.0, 0.0) == Catch::Approx(1.0).margin(1e-9));
  CHECK(support_value(hs, 0.0, 1.0) == Catch::Approx(1.0).margin(1e-9));
  CHECK(support_value(hs, 1.0, 1.0) == Catch::Approx(1.0).margin(1e-9));
  CHECK(support_value(hs, 2.0, 1.0) == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("noninterfering channel region is a rectangle") {
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
  validate(ch);

  const auto uni = uniform_dist(ch);
  const auto cons = gen_nstate(1, RegionForm::projected);
  const auto hs = make_halfspaces(cons, det_evaluate_mi(ch, uni, cons));
  CHECK(support_value(hs, 1.0, 0.0) == Catch::Approx(2.0).margin(1e-9));
  CHECK(support_value(hs, 0.0, 1.0) == Catch::Approx(1.0).margin(1e-9));
  CHECK(support_value(hs, 1.0, 1.0) == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("invertibility applies only to reachable interference values") {
  auto ch = mod4_channel();
  for (int x = 0; x < 4; ++x)
    for (int s = 0; s < 4; ++s) ch.y1[1][x][s] = (x + s % 2) % 4;
  CHECK_NOTHROW(validate(ch));

  auto bad = ch;
  bad.s2_degrade = {{0, 1, 2, 3}};
  CHECK_THROWS_AS(validate(bad), invalid_input_error);
}

TEST_CASE("malformed channels and distributions are rejected") {
  const auto good = xor_channel();
  const auto uni = uniform_dist(good);

  auto flat = good;
  flat.y1 = {{{0, 0}, {1, 1}}};
  CHECK_THROWS_AS(validate(flat), invalid_input_error);

  auto short_map = good;
  short_map.s1_of_x1 = {0};
  CHECK_THROWS_AS(validate(short_map), invalid_input_error);

  auto oor = good;
  oor.y2[0][1][0] = 7;
  CHECK_THROWS_AS(validate(oor), invalid_input_error);

  auto no_states = good;
  no_states.n_states = 0;
  CHECK_THROWS_AS(validate(no_states), invalid_input_error);

  DiscreteDist wrong_len;
  wrong_len.p1 = {1.0};
  wrong_len.p2 = {0.5, 0.5};
  CHECK_THROWS_AS(det_entropy(good, wrong_len, {x1()}), invalid_input_error);

  DiscreteDist negative;
  negative.p1 = {1.5, -0.5};
  negative.p2 = {0.5, 0.5};
  CHECK_THROWS_AS(det_entropy(good, negative, {x1()}), invalid_input_error);

  DiscreteDist off_total;
  off_total.p1 = {0.5, 0.4};
  off_total.p2 = {0.5, 0.5};
  CHECK_THROWS_AS(det_entropy(good, off_total, {x1()}), invalid_input_error);

  CHECK_THROWS_AS(det_evaluate_mi(good, uni, gen_2state(RegionForm::projected)),
                  invalid_input_error);
}

TEST_CASE("oversized joint tables hit the resource guard") {
  DetChannel big;
  big.n_states = 1;
  big.nx1 = 4000;
  big.nx2 = 4000;
  big.ns1 = big.ns2 = 1;
  big.ny1 = 4000;
  big.ny2 = 4000;
  big.s1_of_x1.assign(4000, 0);
  big.s2_of_x2.assign(4000, 0);
  big.y1.resize(1);
  big.y2.resize(1);
  for (int x = 0; x < 4000; ++x) {
    big.y1[0].push_back({x});
    big.y2[0].push_back({x});
  }
  validate(big);

  DiscreteDist uni;
  uni.p1.assign(4000, 1.0 / 4000);
  uni.p2.assign(4000, 1.0 / 4000);
  CHECK_THROWS_AS(det_entropy(big, uni, {x1(), x2()}), resource_limit_error);
}
