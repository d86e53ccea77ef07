#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "cicb/channel.hpp"
#include "cicb/errors.hpp"

using namespace cicb;
using cd = std::complex<double>;

namespace {

CompoundChannel make_unsorted() {
  CompoundChannel ch;
  ch.p1 = 1.0;
  ch.p2 = 3.0;
  ch.rx1 = {
      {cd(1.0, 0.0), cd(1.0, 0.0)},
      {cd(0.5, 0.0), cd(3.0, 0.0)},
      {cd(2.0, 0.0), cd(2.0, 0.0)},
  };
  ch.rx2 = {
      {cd(1.5, 0.0), cd(0.5, 0.0)},
      {cd(1.0, 0.0), cd(4.0, 0.0)},
  };
  return ch;
}

}  // namespace

TEST_CASE("canonicalize sorts states by descending cross magnitude") {
  auto ch = canonicalize(make_unsorted());
  REQUIRE(ch.rx1.size() == 3);
  REQUIRE(ch.rx2.size() == 3);
  CHECK(std::abs(ch.rx1[0].cross) == Catch::Approx(3.0));
  CHECK(std::abs(ch.rx1[1].cross) == Catch::Approx(2.0));
  CHECK(std::abs(ch.rx1[2].cross) == Catch::Approx(1.0));
  CHECK(ch.rx1[0].direct == cd(0.5, 0.0));
  CHECK(ch.rx1[1].direct == cd(2.0, 0.0));
  CHECK(ch.rx1[2].direct == cd(1.0, 0.0));
}

TEST_CASE("canonicalize pads the shorter list with its weakest state") {
  auto ch = canonicalize(make_unsorted());
  CHECK(ch.rx2[0].cross == cd(4.0, 0.0));
  CHECK(ch.rx2[1].cross == cd(0.5, 0.0));
  CHECK(ch.rx2[2].cross == cd(0.5, 0.0));
  CHECK(ch.rx2[2].direct == cd(1.5, 0.0));
}

TEST_CASE("canonicalize breaks cross ties by direct magnitude then phase") {
  CompoundChannel ch;
  ch.p1 = 1.0;
  ch.p2 = 1.0;
  ch.rx1 = {
      {cd(1.0, 0.0), std::polar(2.0, 0.3)},
      {cd(5.0, 0.0), std::polar(2.0, 0.3)},
      {cd(5.0, 0.0), std::polar(2.0, 0.1)},
  };
  ch.rx2 = {{cd(1.0, 0.0), cd(1.0, 0.0)}};
  auto c = canonicalize(ch);
  CHECK(std::abs(c.rx1[0].direct) == Catch::Approx(5.0));
  CHECK(std::abs(c.rx1[1].direct) == Catch::Approx(5.0));
  CHECK(std::arg(c.rx1[0].cross) == Catch::Approx(0.1));
  CHECK(std::arg(c.rx1[1].cross) == Catch::Approx(0.3));
  CHECK(std::abs(c.rx1[2].direct) == Catch::Approx(1.0));
}

TEST_CASE("canonicalize is idempotent") {
  auto once = canonicalize(make_unsorted());
  auto twice = canonicalize(once);
  REQUIRE(once.rx1.size() == twice.rx1.size());
  for (size_t i = 0; i < once.rx1.size(); ++i) {
    CHECK(once.rx1[i].direct == twice.rx1[i].direct);
    CHECK(once.rx1[i].cross == twice.rx1[i].cross);
    CHECK(once.rx2[i].direct == twice.rx2[i].direct);
    CHECK(once.rx2[i].cross == twice.rx2[i].cross);
  }
  CHECK(is_canonical(once));
  CHECK_FALSE(is_canonical(make_unsorted()));
}

TEST_CASE("from_joint extracts per-receiver marginals and drops exact duplicates") {
  std::vector<GainState> joint = {
      {cd(1, 0), cd(2, 0), cd(3, 0), cd(4, 0)},
      {cd(1, 0), cd(2, 0), cd(5, 0), cd(6, 0)},
      {cd(1, 0), cd(2, 0), cd(3, 0), cd(4, 0)},
  };
  auto ch = from_joint(joint, 1.0, 2.0);
  REQUIRE(ch.rx1.size() == 1);
  REQUIRE(ch.rx2.size() == 2);
  CHECK(ch.rx1[0].direct == cd(1, 0));
  CHECK(ch.rx1[0].cross == cd(2, 0));
  CHECK(ch.rx2[0].cross == cd(3, 0));
  CHECK(ch.rx2[0].direct == cd(4, 0));
  CHECK(ch.rx2[1].cross == cd(5, 0));
  CHECK(ch.p1 == 1.0);
  CHECK(ch.p2 == 2.0);
}

TEST_CASE("channel validation rejects malformed input") {
  CompoundChannel ch = make_unsorted();
  SECTION("negative power") {
    ch.p1 = -1.0;
    CHECK_THROWS_AS(canonicalize(ch), invalid_input_error);
  }
  SECTION("empty state list") {
    ch.rx2.clear();
    CHECK_THROWS_AS(canonicalize(ch), invalid_input_error);
  }
  SECTION("non-finite gain") {
    ch.rx1[0].direct = cd(std::nan(""), 0.0);
    CHECK_THROWS_AS(canonicalize(ch), invalid_input_error);
  }
}

TEST_CASE("degraded chain reproduces each stage variance from the previous one") {
  CompoundChannel ch;
  ch.p1 = 1.0;
  ch.p2 = 3.0;
  ch.rx1 = {
      {cd(1, 0), cd(2, 0)},
      {cd(1, 0), cd(1, 0)},
      {cd(1, 0), cd(0.5, 0)},
  };
  ch.rx2 = {{cd(1, 0), cd(1, 0)}};
  auto chain = build_degraded_chain(canonicalize(ch));
  REQUIRE(chain.n_states == 3);

  CHECK(chain.rx1[0].cross == cd(2, 0));
  CHECK(chain.rx1[1].ratio == cd(0.5, 0));
  CHECK(chain.rx1[2].ratio == cd(0.5, 0));
  CHECK(chain.rx1[1].residual == Catch::Approx(std::sqrt(0.75)));

  // Stage n is ratio * stage (n-1) plus fresh noise, so the cross gains must
  // satisfy cross_n = ratio_n * cross_{n-1} and the noise stays at variance 1
  // through |ratio|^2 + residual^2 = 1. Together these give the stage
  // variance |cross_n|^2 * p2 + 1.
  const double expected_var[] = {13.0, 4.0, 1.75};
  for (int n = 0; n < chain.n_states; ++n) {
    const auto& st = chain.rx1[n];
    if (n > 0) {
      CHECK(std::abs(st.cross - st.ratio * chain.rx1[n - 1].cross) < 1e-14);
      CHECK(std::norm(st.ratio) + st.residual * st.residual == Catch::Approx(1.0));
    }
    CHECK(std::norm(st.cross) * ch.p2 + 1.0 == Catch::Approx(expected_var[n]));
  }
}

TEST_CASE("degraded chain handles complex ratios with conjugate symmetry") {
  CompoundChannel ch;
  ch.p1 = 1.0;
  ch.p2 = 3.0;
  ch.rx1 = {
      {cd(1, 0), cd(0, 2)},
      {cd(1, 0), cd(1, 0)},
  };
  ch.rx2 = {{cd(1, 0), cd(1, 0)}};
  auto chain = build_degraded_chain(canonicalize(ch));
  // ratio = 1 / (2i) = -0.5i
  CHECK(chain.rx1[1].ratio.real() == Catch::Approx(0.0).margin(1e-15));
  CHECK(chain.rx1[1].ratio.imag() == Catch::Approx(-0.5));
  CHECK(chain.rx1[1].residual == Catch::Approx(std::sqrt(0.75)));
}

TEST_CASE("degraded chain treats zero cross gains as fresh unit noise") {
  CompoundChannel ch;
  ch.p1 = 2.0;
  ch.p2 = 2.0;
  ch.rx1 = {
      {cd(1, 0), cd(1, 0)},
      {cd(1, 0), cd(0, 0)},
  };
  ch.rx2 = {{cd(1, 0), cd(1, 0)}};
  auto chain = build_degraded_chain(canonicalize(ch));
  CHECK(chain.rx1[1].ratio == cd(0, 0));
  CHECK(chain.rx1[1].residual == Catch::Approx(1.0));
}

TEST_CASE("degraded chain requires canonical input") {
  CHECK_THROWS_AS(build_degraded_chain(make_unsorted()), precondition_error);
}

TEST_CASE("duplicate-state padding repeats the weakest state exactly") {
  CompoundChannel ch;
  ch.p1 = 1.0;
  ch.p2 = 1.0;
  ch.rx1 = {{cd(2, 0), cd(3, 0)}, {cd(1, 0), cd(1, 0)}};
  ch.rx2 = {{cd(4, 0), cd(2, 0)}};
  auto c = canonicalize(ch);
  REQUIRE(c.rx2.size() == 2);
  CHECK(c.rx2[0].cross == c.rx2[1].cross);
  CHECK(c.rx2[0].direct == c.rx2[1].direct);
  auto chain = build_degraded_chain(c);
  // Duplicated stage degrades with ratio exactly 1 and no fresh noise.
  CHECK(chain.rx2[1].ratio == cd(1, 0));
  CHECK(chain.rx2[1].residual == Catch::Approx(0.0));
}
