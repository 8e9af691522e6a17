#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <tfim/chain.hpp>

using namespace tfim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("effective_lambda matches the rotation shift") {
  ChainSpec spec{2, 1.0, 1.0, 1.0};
  CHECK(effective_lambda(spec, 2.0, 0.0) == 2.0);
  CHECK(effective_lambda(spec, 2.0, 2.0) == 1.0);
  CHECK(effective_lambda(spec, 1.0, -2.0) == 2.0);

  ChainSpec scaled{4, 1.0, 2.0, 3.0};
  CHECK(effective_lambda(scaled, 1.0, 4.0) == doctest::Approx(1.0 - 3.0 * 4.0 / 4.0));
}

TEST_CASE("effective_lambda is exactly linear in omega") {
  ChainSpec spec{6, 1.0, 1.7, 0.9};
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const double lam = -3.0 + 6.0 * (rng() >> 11) * 0x1.0p-53;
    const double w1 = -5.0 + 10.0 * (rng() >> 11) * 0x1.0p-53;
    const double w2 = -5.0 + 10.0 * (rng() >> 11) * 0x1.0p-53;
    const double lhs = effective_lambda(spec, lam, w1 + w2) - effective_lambda(spec, lam, w1);
    const double rhs = -spec.hbar * w2 / (2.0 * spec.coupling);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("bloch_modes produce the positive-k grid") {
  SUBCASE("N=4") {
    const auto modes = bloch_modes(ChainSpec{4, 1.0, 1.0, 1.0});
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].wavevector == doctest::Approx(kPi / 2));
    CHECK(modes[1].wavevector == doctest::Approx(kPi));
    CHECK(modes[0].index == 1);
  }
  SUBCASE("N=2 single mode") {
    const auto modes = bloch_modes(ChainSpec{2, 1.0, 1.0, 1.0});
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].wavevector == doctest::Approx(kPi));
  }
  SUBCASE("N=2000") {
    const auto modes = bloch_modes(ChainSpec{2000, 1.0, 1.0, 1.0});
    REQUIRE(modes.size() == 1000);
    CHECK(modes.back().wavevector == doctest::Approx(kPi));
    for (std::size_t i = 1; i < modes.size(); ++i) {
      CHECK(modes[i].wavevector > modes[i - 1].wavevector);
    }
  }
  SUBCASE("lattice spacing scales k") {
    const auto modes = bloch_modes(ChainSpec{4, 0.5, 1.0, 1.0});
    CHECK(modes.back().wavevector == doctest::Approx(2.0 * kPi));
  }
}

TEST_CASE("invalid chains are rejected") {
  CHECK_THROWS_WITH_AS(bloch_modes(ChainSpec{3, 1.0, 1.0, 1.0}),
                       doctest::Contains("invalid chain"), std::invalid_argument);
  CHECK_THROWS_AS(bloch_modes(ChainSpec{0, 1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(bloch_modes(ChainSpec{4, -1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(bloch_modes(ChainSpec{4, 1.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(bloch_modes(ChainSpec{4, 1.0, 1.0, -0.1}), std::invalid_argument);
}

TEST_CASE("characteristic time") {
  CHECK(characteristic_time(ChainSpec{2, 1.0, 1.0, 1.0}) == 0.5);
  CHECK(characteristic_time(ChainSpec{2, 1.0, 2.0, 1.0}) == 0.25);
  CHECK(characteristic_time(ChainSpec{2, 1.0, 1.0, 2.0}) == 1.0);
}
