#include <tfim/analysis.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <tfim/echo.hpp>
#include <tfim/parallel.hpp>

namespace tfim {

namespace {

constexpr double kHalfWidthResidualTol = 1e-10;
constexpr int kMaxBisectIterations = 200;

// Distance from the valley center to the L = 1/2 crossing in the given
// direction (+1: larger lambda_tilde). Bracket grown geometrically from the
// center; the inner end of the bracket always has L < 1/2.
double crossing_distance(const ChainSpec& spec, double center, double delta, double time,
                         double window, int direction, double* residual_out) {
  const auto echo = [&](double dist) {
    return loschmidt_echo_at(spec, center + direction * dist, delta, time);
  };

  double inner = 0.0;
  double outer = window / (1 << 24);
  bool bracketed = false;
  while (outer <= window) {
    if (echo(outer) >= 0.5) {
      bracketed = true;
      break;
    }
    inner = outer;
    outer *= 2.0;
  }
  if (!bracketed) {
    if (echo(window) >= 0.5) {
      bracketed = true;
      outer = window;
    } else {
      throw AnalysisError("crossing not bracketed");
    }
  }

  double mid = 0.5 * (inner + outer);
  double residual = std::abs(echo(mid) - 0.5);
  for (int it = 0; it < kMaxBisectIterations; ++it) {
    const double value = echo(mid);
    residual = std::abs(value - 0.5);
    if (residual < kHalfWidthResidualTol) break;
    if (value < 0.5) {
      inner = mid;
    } else {
      outer = mid;
    }
    mid = 0.5 * (inner + outer);
  }
  if (residual_out) *residual_out = residual;
  return mid;
}

}  // namespace

EchoCurve scan_curve(const ChainSpec& spec, double delta, double lambda, double time,
                     std::span<const double> omega_grid) {
  spec.validate();
  if (time < 0.0) throw std::invalid_argument("negative time");
  if (!(delta >= 0.0)) throw std::invalid_argument("invalid field config: delta < 0");
  if (omega_grid.empty()) throw std::invalid_argument("empty omega grid");
  for (std::size_t i = 1; i < omega_grid.size(); ++i) {
    if (!(omega_grid[i] > omega_grid[i - 1])) {
      throw std::invalid_argument("omega grid must be strictly increasing");
    }
  }

  EchoCurve curve{spec, delta, lambda, time, {}};
  curve.samples.resize(omega_grid.size());
  parallel_for(omega_grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double omega = omega_grid[i];
      const double lt = effective_lambda(spec, lambda, omega);
      curve.samples[i] = {omega, lt, loschmidt_echo_at(spec, lt, delta, time)};
    }
  });
  return curve;
}

HalfWidthResult half_width(const ChainSpec& spec, double delta, double lambda, double time,
                           double search_window) {
  (void)lambda;  // half-widths are translation invariant in omega
  spec.validate();
  if (time < 0.0) throw std::invalid_argument("negative time");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive for a half-width");
  if (!(search_window > 0.0)) throw std::invalid_argument("search_window must be positive");

  const double center = 1.0 - delta;
  if (loschmidt_echo_at(spec, center, delta, time) >= 0.5) {
    throw AnalysisError("valley too shallow");
  }

  double res_lo = 0.0;
  double res_hi = 0.0;
  const double dist_lo =
      crossing_distance(spec, center, delta, time, search_window, -1, &res_lo);
  const double dist_hi =
      crossing_distance(spec, center, delta, time, search_window, +1, &res_hi);

  const double two_j_over_hbar = 2.0 * spec.coupling / spec.hbar;
  HalfWidthResult out{};
  out.epsilon0 = 0.5 * (dist_lo + dist_hi);
  out.delta_omega = two_j_over_hbar * out.epsilon0;
  out.chord_omega = two_j_over_hbar * (dist_lo + dist_hi);
  out.time = time;
  out.bracket_lo = center - dist_lo;
  out.bracket_hi = center + dist_hi;
  out.residual = std::max(res_lo, res_hi);
  return out;
}

EtaFit fit_eta(std::span<const EtaFitPoint> points, int n_spins) {
  if (points.size() < 3) throw std::invalid_argument("fit_eta needs at least 3 points");
  if (n_spins < 2) throw std::invalid_argument("invalid chain: n_spins < 2");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].epsilon0 > 0.0)) {
      throw std::invalid_argument("fit_eta: non-positive epsilon0");
    }
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i].delta == points[j].delta) {
        throw std::invalid_argument("fit_eta: duplicate delta");
      }
    }
  }

  const double sqrt_n = std::sqrt(static_cast<double>(n_spins));
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (const auto& p : points) {
    const double x = sqrt_n * p.delta;
    sxy += x * p.epsilon0;
    sxx += x * x;
    syy += p.epsilon0 * p.epsilon0;
  }
  const double slope = sxy / sxx;

  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.epsilon0 - slope * sqrt_n * p.delta;
    ss_res += r * r;
  }

  EtaFit fit{};
  fit.sqrt_eta = slope;
  fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 0.0;
  fit.points.assign(points.begin(), points.end());
  fit.n_spins = n_spins;
  return fit;
}

double resolution(double omega0_char, double delta, int n_spins, double sqrt_eta) {
  if (!(omega0_char > 0.0)) throw std::invalid_argument("omega0_char must be positive");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
  if (n_spins < 1) throw std::invalid_argument("n_spins must be positive");
  if (!(sqrt_eta > 0.0)) throw std::invalid_argument("sqrt_eta must be positive");
  return 2.0 * sqrt_eta * omega0_char * delta * std::sqrt(static_cast<double>(n_spins));
}

ConstraintResult constraint_check(double delta, int n_spins, double sigma, double omega0_char) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(omega0_char > 0.0)) throw std::invalid_argument("omega0_char must be positive");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
  if (n_spins < 1) throw std::invalid_argument("n_spins must be positive");
  const double lhs = delta * std::sqrt(static_cast<double>(n_spins));
  const double rhs = 1.33 * sigma / omega0_char;
  return {lhs < rhs, lhs / rhs};
}

CollapseReport collapse_check(std::span<const CollapseCase> cases, double lambda, double time,
                              double search_window) {
  if (cases.size() < 2) throw std::invalid_argument("collapse_check needs at least 2 cases");

  double mean = 0.0;
  for (const auto& c : cases) {
    if (c.n_spins < 2) throw std::invalid_argument("invalid chain: n_spins < 2");
    mean += c.delta * std::sqrt(static_cast<double>(c.n_spins));
  }
  mean /= static_cast<double>(cases.size());
  for (const auto& c : cases) {
    const double x = c.delta * std::sqrt(static_cast<double>(c.n_spins));
    if (std::abs(x - mean) > 0.01 * mean) {
      throw std::invalid_argument("collapse_check: cases do not share delta*sqrt(N) within 1%");
    }
  }

  CollapseReport report{};
  report.entries.resize(cases.size());
  // Cases are independent; run them in parallel, collect by index.
  std::vector<std::exception_ptr> errors(cases.size());
  parallel_for(cases.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& c = cases[i];
      try {
        ChainSpec spec;
        spec.n_spins = c.n_spins;
        const HalfWidthResult hw = half_width(spec, c.delta, lambda, time, search_window);
        report.entries[i] = {c.n_spins, c.delta,
                             c.delta * std::sqrt(static_cast<double>(c.n_spins)), hw.epsilon0,
                             hw.delta_omega};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double max_dev = 0.0;
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < report.entries.size(); ++j) {
      const double a = report.entries[i].delta_omega;
      const double b = report.entries[j].delta_omega;
      max_dev = std::max(max_dev, std::abs(a - b) / std::min(a, b));
    }
  }
  report.max_pairwise_rel_dev = max_dev;
  report.pass = max_dev < 0.10;
  return report;
}

}  // namespace tfim
