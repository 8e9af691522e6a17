#pragma once

#include <tfim/chain.hpp>

namespace tfim {

/// Bogoliubov angle theta(x) = atan2(-sin(ka), cos(ka) - x), continuous
/// two-argument branch on (-pi, pi]. x is the total transverse field seen by
/// the mode (lambda_tilde, or lambda_tilde + delta for the probe-shifted
/// Hamiltonian). The degenerate point sin(ka) = 0, cos(ka) = x returns 0.
///
/// Downstream quantities depend on theta only through sin^2 of angle
/// differences, which is invariant under shifts of theta by pi, so the
/// branch choice does not affect the echo.
double bogoliubov_angle(const BlochMode& mode, double x, double lattice_spacing = 1.0);

/// Single-quasiparticle energy 2 J sqrt(1 + x^2 - 2 x cos(ka)) >= 0.
double quasiexcitation_energy(const ChainSpec& spec, const BlochMode& mode, double x);

/// One factor of the echo product:
///   F_k = 1 - sin^2(2 alpha_k) sin^2(eps_k t / hbar),
/// alpha_k = [theta_k(lambda_tilde) - theta_k(lambda_tilde + delta)] / 2 and
/// eps_k evaluated at lambda_tilde + delta. The subtracted term is clamped to
/// [0, 1] so F_k lies in [0, 1] exactly.
double mode_factor(const ChainSpec& spec, const BlochMode& mode,
                   double lambda_tilde, double delta, double t);

/// Loschmidt echo at the given effective field; product over the positive-k
/// modes accumulated in log space (factors clamped below at 1e-300) so large
/// N cannot underflow. Serial mode loop: bitwise deterministic.
double loschmidt_echo_at(const ChainSpec& spec, double lambda_tilde, double delta, double t);

/// Same echo with lambda_tilde derived from (lambda, omega) via
/// effective_lambda. Throws on t < 0 ("negative time") or invalid inputs.
double loschmidt_echo(const ChainSpec& spec, const FieldConfig& fields, double t);

/// Cutoff parameters for the small-k analysis. The cutoff keeps the first
/// N_c modes of the product.
struct ApproxParams {
  int cutoff_number;  ///< N_c in [1, N/2]
  double alpha_frac;  ///< alpha = N_c / N = K_c a / pi
  double m;           ///< sum over the first N_c modes of (k a)^2
  double eta;         ///< 4 pi^2 alpha^3 / 3; m ~ eta N for N_c = alpha N
};

/// m = 4 pi^2 N_c (N_c + 1)(2 N_c + 1) / (6 N^2). Throws on N_c out of [1, N/2].
double m_parameter(const ChainSpec& spec, int cutoff_number);

ApproxParams make_approx_params(const ChainSpec& spec, int cutoff_number);

/// S = -sum_{n <= N_c} |ln F_k| <= 0; exp(S) is the product of the first
/// N_c mode factors (equals the full echo when N_c = N/2).
double log_echo_partial_sum(const ChainSpec& spec, const FieldConfig& fields,
                            double t, const ApproxParams& cutoff);

/// Closed-form cutoff echo and its short-time Gaussian limit, with the
/// regime indicators a caller must consult: both forms assume K_c a << 1
/// and the Gaussian limit additionally 2J(eps + delta)t/hbar << 1, where
/// eps = 1 - lambda_tilde - delta.
struct GaussianEchoResult {
  double value;             ///< exp{-d^2 m sin^2[2J(1-lt)t/h] / [(1-lt)^2 (1-lt-d)^2]}
  double short_time_value;  ///< exp[-4 (d/eps)^2 m J^2 t^2 / hbar^2]
  double kc_a;              ///< cutoff wavevector times lattice spacing
  double phase_scale;       ///< 2 J (eps + delta) t / hbar
};

/// Computes both closed forms unconditionally (regime checking is the
/// caller's job) but throws std::domain_error("approximation singular") when
/// |1 - lambda_tilde| or |1 - lambda_tilde - delta| falls below
/// singular_floor: the denominators vanish there and the exact product is
/// the only meaningful value.
GaussianEchoResult gaussian_echo_approx(const ChainSpec& spec, const FieldConfig& fields,
                                        double t, const ApproxParams& cutoff,
                                        double singular_floor = 1e-12);

}  // namespace tfim
