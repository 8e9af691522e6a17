#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <tfim/chain.hpp>

namespace tfim {

enum class NoiseModel { uniform, gaussian };

/// One full sensing experiment: coarse pre-measurement of the rotation
/// velocity, field window, echo scan, estimate.
struct ProtocolConfig {
  ChainSpec spec;
  double true_omega = 0.0;
  double sigma = 0.0;          ///< pre-measurement resolution, > 0
  NoiseModel noise_model = NoiseModel::uniform;
  double delta = 0.0;
  double time = -1.0;          ///< < 0 means "use characteristic_time(spec)"
  int scan_points = 2001;      ///< >= 101
  int trials = 1;
  std::uint64_t seed = 0;
  double sqrt_eta = 0.375;     ///< coefficient used for the resolution flag

  void validate() const;
  double scan_time() const;    ///< time, with the default resolved
};

struct ProtocolTrial {
  int index = 0;
  double omega0 = 0.0;       ///< pre-measurement reading
  double lambda_lo = 0.0;    ///< field window
  double lambda_hi = 0.0;
  double lambda0 = 0.0;      ///< scan minimizer (parabolic-refined)
  double omega1 = 0.0;       ///< 2 J (lambda0 - 1) / hbar, exact
  double omega1_corrected = 0.0;  ///< 2 J (lambda0 - 1 + delta) / hbar
  double abs_error = 0.0;
  double abs_error_corrected = 0.0;
  bool ok = false;           ///< false: flat scan, estimates meaningless
};

struct ProtocolSummary {
  int trials = 0;
  int succeeded = 0;
  double mean_abs_error = 0.0;            ///< over succeeded trials
  double p95_abs_error = 0.0;
  double mean_abs_error_corrected = 0.0;
  double p95_abs_error_corrected = 0.0;
  double mean_signed_offset = 0.0;        ///< mean of (true_omega - omega1)
  double success_rate = 0.0;              ///< corrected |err| < resolution, over all trials
  double resolution_delta_omega = 0.0;
  bool feasible = false;                  ///< resolution < sigma
  std::vector<ProtocolTrial> per_trial;
};

/// Pre-measurement draw. uniform: U[omega - sigma, omega + sigma].
/// gaussian: N(omega, (sigma/2)^2) truncated to the same interval by
/// resampling, so the reading is always within sigma of the truth.
/// Variates are mapped from raw engine draws by explicit arithmetic so the
/// stream is identical across standard libraries.
double pmg_sample(double true_omega, double sigma, NoiseModel model, std::mt19937_64& rng);

/// Field window [1 + hbar(omega0 - sigma)/(2J), 1 + hbar(omega0 + sigma)/(2J)]:
/// sweeping lambda across it drags the effective field through the critical
/// point for every rotation velocity within sigma of omega0.
std::pair<double, double> mfc_window(double omega0, double sigma, const ChainSpec& spec);

/// Uniform lambda scan over the window with the chain at the true rotation
/// velocity; the minimizer is refined by parabolic interpolation on the three
/// bracketing points (ties break toward the lowest lambda ). Throws
/// AnalysisError("flat scan") when max L - min L < 1e-6.
ProtocolTrial scan_and_estimate(const ProtocolConfig& config, double omega0);

/// Monte Carlo over independent per-trial RNG streams derived from
/// (seed, trial index). Trials run in parallel; aggregation is performed in
/// index order, so the summary is bitwise reproducible for a fixed config.
ProtocolSummary run_trials(const ProtocolConfig& config);

}  // namespace tfim
