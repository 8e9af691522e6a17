#include <tfim/echo.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfim {

namespace {

constexpr double kFactorFloor = 1e-300;  // clamp before ln so the log sum stays finite

// sin(ka) with ulp-level residue at the exact multiples of pi snapped to
// zero, so the k = pi gridpoint gets its exact mode factor (F = 1) and the
// documented atan2 branch.
double grid_sin(double ka) {
  const double s = std::sin(ka);
  return std::abs(s) < 8.0 * 2.220446049250313e-16 * std::max(1.0, std::abs(ka)) ? 0.0 : s;
}

double clamped_log_factor(const ChainSpec& spec, double ka, double lambda_tilde,
                          double delta, double t) {
  const double x_ground = lambda_tilde;
  const double x_excited = lambda_tilde + delta;
  const double s = grid_sin(ka);
  const double theta_g = std::atan2(-s, std::cos(ka) - x_ground);
  const double theta_e = std::atan2(-s, std::cos(ka) - x_excited);
  const double two_alpha = theta_g - theta_e;
  const double eps =
      2.0 * spec.coupling *
      std::sqrt(std::max(0.0, 1.0 + x_excited * x_excited - 2.0 * x_excited * std::cos(ka)));
  const double sa = std::sin(two_alpha);
  const double sp = std::sin(eps * t / spec.hbar);
  const double subtracted = std::clamp(sa * sa * sp * sp, 0.0, 1.0);
  return std::log(std::max(1.0 - subtracted, kFactorFloor));
}

}  // namespace

double bogoliubov_angle(const BlochMode& mode, double x, double lattice_spacing) {
  const double ka = mode.wavevector * lattice_spacing;
  const double s = grid_sin(ka);
  if (s == 0.0) {
    const double u = std::cos(ka) - x;
    if (u == 0.0) return 0.0;  // degenerate point, by convention
    return u > 0.0 ? 0.0 : std::numbers::pi;
  }
  return std::atan2(-s, std::cos(ka) - x);
}

double quasiexcitation_energy(const ChainSpec& spec, const BlochMode& mode, double x) {
  spec.validate();
  const double ka = mode.wavevector * spec.lattice_spacing;
  const double radicand = 1.0 + x * x - 2.0 * x * std::cos(ka);
  return 2.0 * spec.coupling * std::sqrt(std::max(0.0, radicand));
}

double mode_factor(const ChainSpec& spec, const BlochMode& mode, double lambda_tilde,
                   double delta, double t) {
  spec.validate();
  const double ka = mode.wavevector * spec.lattice_spacing;
  return std::exp(clamped_log_factor(spec, ka, lambda_tilde, delta, t));
}

double loschmidt_echo_at(const ChainSpec& spec, double lambda_tilde, double delta, double t) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("negative time");
  if (!(delta >= 0.0)) throw std::invalid_argument("invalid field config: delta < 0");
  if (delta == 0.0 || t == 0.0) return 1.0;

  const int half = spec.n_spins / 2;
  const double step = 2.0 * std::numbers::pi / spec.n_spins;  // k a per mode
  double log_sum = 0.0;
  for (int n = 1; n <= half; ++n) {
    log_sum += clamped_log_factor(spec, n * step, lambda_tilde, delta, t);
  }
  return std::exp(log_sum);
}

double loschmidt_echo(const ChainSpec& spec, const FieldConfig& fields, double t) {
  fields.validate();
  return loschmidt_echo_at(spec, effective_lambda(spec, fields.lambda, fields.omega),
                           fields.delta, t);
}

double m_parameter(const ChainSpec& spec, int cutoff_number) {
  spec.validate();
  if (cutoff_number < 1 || cutoff_number > spec.n_spins / 2) {
    throw std::invalid_argument("cutoff_number out of [1, N/2], got " +
                                std::to_string(cutoff_number));
  }
  const double nc = cutoff_number;
  const double n = spec.n_spins;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 4.0 * pi2 * nc * (nc + 1.0) * (2.0 * nc + 1.0) / (6.0 * n * n);
}

ApproxParams make_approx_params(const ChainSpec& spec, int cutoff_number) {
  const double m = m_parameter(spec, cutoff_number);  // validates both args
  const double alpha = static_cast<double>(cutoff_number) / spec.n_spins;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return {cutoff_number, alpha, m, 4.0 * pi2 * alpha * alpha * alpha / 3.0};
}

double log_echo_partial_sum(const ChainSpec& spec, const FieldConfig& fields, double t,
                            const ApproxParams& cutoff) {
  fields.validate();
  if (t < 0.0) throw std::invalid_argument("negative time");
  if (cutoff.cutoff_number < 1 || cutoff.cutoff_number > spec.n_spins / 2) {
    throw std::invalid_argument("cutoff_number out of [1, N/2], got " +
                                std::to_string(cutoff.cutoff_number));
  }
  spec.validate();
  const double lambda_tilde = effective_lambda(spec, fields.lambda, fields.omega);
  const double step = 2.0 * std::numbers::pi / spec.n_spins;
  double sum = 0.0;
  for (int n = 1; n <= cutoff.cutoff_number; ++n) {
    sum -= std::abs(clamped_log_factor(spec, n * step, lambda_tilde, fields.delta, t));
  }
  return sum;
}

GaussianEchoResult gaussian_echo_approx(const ChainSpec& spec, const FieldConfig& fields,
                                        double t, const ApproxParams& cutoff,
                                        double singular_floor) {
  fields.validate();
  if (t < 0.0) throw std::invalid_argument("negative time");
  spec.validate();
  if (cutoff.cutoff_number < 1 || cutoff.cutoff_number > spec.n_spins / 2) {
    throw std::invalid_argument("cutoff_number out of [1, N/2], got " +
                                std::to_string(cutoff.cutoff_number));
  }

  const double lambda_tilde = effective_lambda(spec, fields.lambda, fields.omega);
  const double one_minus = 1.0 - lambda_tilde;
  const double eps = 1.0 - lambda_tilde - fields.delta;
  const double j = spec.coupling;
  const double hbar = spec.hbar;

  GaussianEchoResult out{};
  out.kc_a = cutoff.cutoff_number * std::numbers::pi / spec.n_spins;
  out.phase_scale = 2.0 * j * (eps + fields.delta) * t / hbar;

  if (fields.delta == 0.0 || t == 0.0) {
    out.value = 1.0;
    out.short_time_value = 1.0;
    return out;
  }
  if (std::abs(one_minus) < singular_floor || std::abs(eps) < singular_floor) {
    throw std::domain_error("approximation singular");
  }

  const double d2m = fields.delta * fields.delta * cutoff.m;
  const double osc = std::sin(2.0 * j * one_minus * t / hbar);
  out.value = std::exp(-d2m * osc * osc / (one_minus * one_minus * eps * eps));

  const double jt = j * t / hbar;
  out.short_time_value =
      std::exp(-4.0 * (fields.delta * fields.delta / (eps * eps)) * cutoff.m * jt * jt);
  return out;
}

}  // namespace tfim
