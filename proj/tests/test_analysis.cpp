#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <tfim/analysis.hpp>
#include <tfim/chain.hpp>
#include <tfim/echo.hpp>

using namespace tfim;

namespace {
const ChainSpec kN2000{2000, 1.0, 1.0, 1.0};
const ChainSpec kN500{500, 1.0, 1.0, 1.0};

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  }
  return grid;
}
}  // namespace

TEST_CASE("scan_curve: all ones at delta = 0, consistent lambda_tilde") {
  const auto grid = linspace(0.0, 4.0, 101);
  const auto curve = scan_curve(kN2000, 0.0, 2.0, 0.5, grid);
  REQUIRE(curve.samples.size() == grid.size());
  for (const auto& s : curve.samples) {
    CHECK(s.loschmidt == 1.0);
    CHECK(s.lambda_tilde == effective_lambda(kN2000, 2.0, s.omega));
  }
}

TEST_CASE("scan_curve rejects bad grids") {
  CHECK_THROWS_AS(scan_curve(kN2000, 0.01, 2.0, 0.5, std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(scan_curve(kN2000, 0.01, 2.0, 0.5, std::vector<double>{1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(scan_curve(kN2000, 0.01, 2.0, 0.5, std::vector<double>{2.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("scan_curve is bitwise deterministic and worker-count independent") {
  const auto grid = linspace(1.5, 2.5, 257);
  setenv("ECHO_THREADS", "1", 1);
  const auto serial = scan_curve(kN2000, 0.01, 2.0, 5.0, grid);
  setenv("ECHO_THREADS", "5", 1);
  const auto parallel = scan_curve(kN2000, 0.01, 2.0, 5.0, grid);
  unsetenv("ECHO_THREADS");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(serial.samples[i].loschmidt == parallel.samples[i].loschmidt);
  }
}

// Half-widths against the L = 1/2 line exist in a window of evaluation times
// and delta*sqrt(N); these regressions run at t = 5 hbar/J where the valley
// is deep for delta*sqrt(N) near sqrt(2). Values cross-checked against an
// independent implementation of the product formula.
TEST_CASE("half_width regression at N = 2000, delta = 0.032, t = 5") {
  const auto hw = half_width(kN2000, 0.032, 2.0, 5.0, 1.0);
  CHECK(hw.epsilon0 == doctest::Approx(0.1651).epsilon(2e-3));
  CHECK(hw.delta_omega == doctest::Approx(2.0 * hw.epsilon0).epsilon(1e-12));
  CHECK(hw.chord_omega == doctest::Approx(2.0 * hw.delta_omega).epsilon(1e-12));
  CHECK(hw.residual < 1e-8);
  CHECK(hw.bracket_lo < 1.0 - 0.032);
  CHECK(hw.bracket_hi > 1.0 - 0.032);
  CHECK(hw.time == 5.0);
}

TEST_CASE("half_width error modes") {
  // shallow valley at the characteristic time for small delta*sqrt(N)
  CHECK_THROWS_WITH_AS(half_width(kN500, 0.01, 2.0, 0.5, 1.0),
                       doctest::Contains("valley too shallow"), AnalysisError);
  // window too small to reach the flank recrossing
  CHECK_THROWS_WITH_AS(half_width(kN2000, 0.032, 2.0, 5.0, 0.05),
                       doctest::Contains("crossing not bracketed"), AnalysisError);
  CHECK_THROWS_AS(half_width(kN2000, 0.0, 2.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(half_width(kN2000, 0.032, 2.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("half_width narrows with decreasing delta (N = 500, t = 5)") {
  double prev = 0.0;
  for (double delta : {0.055, 0.06, 0.063, 0.066, 0.07}) {
    const auto hw = half_width(kN500, delta, 2.0, 5.0, 1.0);
    CHECK(hw.epsilon0 > prev);
    prev = hw.epsilon0;
  }
  // endpoints frozen from the oracle run
  CHECK(half_width(kN500, 0.055, 2.0, 5.0, 1.0).epsilon0 == doctest::Approx(0.140111).epsilon(1e-3));
  CHECK(half_width(kN500, 0.07, 2.0, 5.0, 1.0).epsilon0 == doctest::Approx(0.185791).epsilon(1e-3));
}

TEST_CASE("fit_eta recovers an exact line and rejects bad input") {
  const double sqrt_n = std::sqrt(20000.0);
  std::vector<EtaFitPoint> points;
  for (double delta : {0.002, 0.005, 0.008, 0.011, 0.014}) {
    points.push_back({delta, 0.375 * sqrt_n * delta});
  }
  const auto fit = fit_eta(points, 20000);
  CHECK(fit.sqrt_eta == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_eta(std::vector<EtaFitPoint>{{0.01, 0.1}, {0.02, 0.2}}, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      fit_eta(std::vector<EtaFitPoint>{{0.01, 0.1}, {0.02, -0.2}, {0.03, 0.3}}, 100),
      std::invalid_argument);
  CHECK_THROWS_AS(
      fit_eta(std::vector<EtaFitPoint>{{0.01, 0.1}, {0.01, 0.1}, {0.03, 0.3}}, 100),
      std::invalid_argument);
}

TEST_CASE("fit_eta is insensitive to a 1% perturbation of one point") {
  std::vector<EtaFitPoint> points;
  for (double delta : {0.01, 0.02, 0.03, 0.04}) {
    points.push_back({delta, 0.375 * std::sqrt(500.0) * delta});
  }
  const double base = fit_eta(points, 500).sqrt_eta;
  points[2].epsilon0 *= 1.01;
  const double bumped = fit_eta(points, 500).sqrt_eta;
  CHECK(std::abs(bumped - base) / base < 0.01);
}

TEST_CASE("resolution formula and its algebraic identity") {
  const double value = resolution(1.0, 1e-5, 2000, 0.375);
  CHECK(value == doctest::Approx(3.3541019662496846e-4).epsilon(1e-12));
  CHECK(resolution(1.0, 0.0, 2000, 0.375) == 0.0);
  CHECK(resolution(1.0, 1e-5, 8000, 0.375) == doctest::Approx(2.0 * value).epsilon(1e-12));

  // resolution equals (2J/hbar) epsilon0 when epsilon0 = sqrt(eta) delta sqrt(N)
  const double sqrt_eta = 0.375;
  const double delta = 0.01;
  const double eps0 = sqrt_eta * delta * std::sqrt(2000.0);
  CHECK(resolution(1.0, delta, 2000, sqrt_eta) == doctest::Approx(2.0 * eps0).epsilon(1e-12));
}

TEST_CASE("constraint check") {
  const auto ok = constraint_check(1e-5, 2000, 1e-2, 1.0);
  CHECK(ok.satisfied);
  CHECK(ok.margin == doctest::Approx(1e-5 * std::sqrt(2000.0) / (1.33 * 1e-2)).epsilon(1e-12));

  // boundary is strict
  const double sigma_boundary = 0.05 * std::sqrt(500.0) / 1.33;
  const auto boundary = constraint_check(0.05, 500, sigma_boundary, 1.0);
  CHECK_FALSE(boundary.satisfied);

  CHECK(constraint_check(0.05, 500, 1e12, 1.0).satisfied);
  CHECK_THROWS_AS(constraint_check(0.05, 500, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("collapse precondition and degenerate case") {
  const std::vector<CollapseCase> mismatched{{500, 0.07}, {500, 0.01}};
  CHECK_THROWS_AS(collapse_check(mismatched, 2.0, 0.5), std::invalid_argument);

  const std::vector<CollapseCase> identical{{500, 0.063}, {500, 0.063}};
  const auto report = collapse_check(identical, 2.0, 5.0);
  CHECK(report.max_pairwise_rel_dev == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.pass);
}

TEST_CASE("half-width collapse at fixed delta*sqrt(N), t = 5") {
  const std::vector<CollapseCase> cases{{200, 0.1}, {500, 0.063}, {2000, 0.032}, {20000, 0.01}};
  const auto report = collapse_check(cases, 2.0, 5.0);
  REQUIRE(report.entries.size() == 4);
  CHECK(report.pass);
  CHECK(report.max_pairwise_rel_dev < 0.05);  // measured ~2.7%
  CHECK(report.entries[0].delta_omega == doctest::Approx(0.3324).epsilon(5e-3));
  CHECK(report.entries[3].delta_omega == doctest::Approx(0.3236).epsilon(5e-3));
}

TEST_CASE("collapse propagates shallow valleys at the characteristic time") {
  const std::vector<CollapseCase> cases{{200, 0.1}, {500, 0.063}, {2000, 0.032}, {20000, 0.01}};
  CHECK_THROWS_WITH_AS(collapse_check(cases, 2.0, 0.5), doctest::Contains("valley too shallow"),
                       AnalysisError);
}

TEST_CASE("sqrt(eta) from two chain sizes agrees within 10% (t = 5)") {
  std::vector<EtaFitPoint> small_chain;
  for (double delta : {0.029, 0.0313, 0.0336}) {
    small_chain.push_back({delta, half_width(kN2000, delta, 2.0, 5.0, 1.0).epsilon0});
  }
  std::vector<EtaFitPoint> large_chain;
  ChainSpec n20000{20000, 1.0, 1.0, 1.0};
  for (double delta : {0.0092, 0.0099, 0.0106}) {
    large_chain.push_back({delta, half_width(n20000, delta, 2.0, 5.0, 1.0).epsilon0});
  }
  const double a = fit_eta(small_chain, 2000).sqrt_eta;
  const double b = fit_eta(large_chain, 20000).sqrt_eta;
  CHECK(a == doctest::Approx(0.11518).epsilon(5e-3));
  CHECK(b == doctest::Approx(0.11444).epsilon(5e-3));
  CHECK(std::abs(a - b) / b < 0.10);
}
