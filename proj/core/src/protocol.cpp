#include <tfim/protocol.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <tfim/analysis.hpp>
#include <tfim/echo.hpp>
#include <tfim/parallel.hpp>

namespace tfim {

namespace {

constexpr double kFlatScanRange = 1e-6;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from a raw 64-bit draw. std::uniform_real_distribution
// is implementation-defined; this mapping keeps streams identical across
// standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller; the log argument is kept strictly positive.
  const double u1 = 1.0 - unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double percentile95(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(values.size())));
  return values[std::min(values.size() - 1, rank > 0 ? rank - 1 : 0)];
}

}  // namespace

void ProtocolConfig::validate() const {
  spec.validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(delta >= 0.0)) throw std::invalid_argument("invalid field config: delta < 0");
  if (scan_points < 101) throw std::invalid_argument("scan_points must be >= 101");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(sqrt_eta > 0.0)) throw std::invalid_argument("sqrt_eta must be positive");
  if (time >= 0.0 && !std::isfinite(time)) throw std::invalid_argument("invalid time");
  if (!std::isfinite(true_omega)) throw std::invalid_argument("invalid true_omega");
}

double ProtocolConfig::scan_time() const {
  return time < 0.0 ? characteristic_time(spec) : time;
}

double pmg_sample(double true_omega, double sigma, NoiseModel model, std::mt19937_64& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  switch (model) {
    case NoiseModel::uniform:
      return true_omega - sigma + 2.0 * sigma * unit_uniform(rng);
    case NoiseModel::gaussian: {
      // Resample until within the hard interval, so the reading is always
      // within sigma of the truth.
      for (;;) {
        const double draw = true_omega + 0.5 * sigma * standard_normal(rng);
        if (std::abs(draw - true_omega) <= sigma) return draw;
      }
    }
  }
  throw std::logic_error("unknown noise model");
}

std::pair<double, double> mfc_window(double omega0, double sigma, const ChainSpec& spec) {
  spec.validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const double scale = spec.hbar / (2.0 * spec.coupling);
  return {1.0 + scale * (omega0 - sigma), 1.0 + scale * (omega0 + sigma)};
}

ProtocolTrial scan_and_estimate(const ProtocolConfig& config, double omega0) {
  config.validate();
  const auto [lambda_lo, lambda_hi] = mfc_window(omega0, config.sigma, config.spec);
  const double t = config.scan_time();
  const double j = config.spec.coupling;
  const double hbar = config.spec.hbar;

  const int points = config.scan_points;
  const double step = (lambda_hi - lambda_lo) / (points - 1);

  std::vector<double> echo(static_cast<std::size_t>(points));
  double min_val = 2.0;
  double max_val = -1.0;
  int arg_min = 0;
  for (int i = 0; i < points; ++i) {
    const double lam = lambda_lo + i * step;
    const double lt = effective_lambda(config.spec, lam, config.true_omega);
    const double value = loschmidt_echo_at(config.spec, lt, config.delta, t);
    echo[static_cast<std::size_t>(i)] = value;
    if (value < min_val) {  // strict: ties keep the lowest lambda
      min_val = value;
      arg_min = i;
    }
    max_val = std::max(max_val, value);
  }
  if (max_val - min_val < kFlatScanRange) throw AnalysisError("flat scan");

  double lambda0 = lambda_lo + arg_min * step;
  if (arg_min > 0 && arg_min < points - 1) {
    const double y0 = echo[static_cast<std::size_t>(arg_min - 1)];
    const double y1 = echo[static_cast<std::size_t>(arg_min)];
    const double y2 = echo[static_cast<std::size_t>(arg_min + 1)];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom > 0.0) {
      const double shift = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
      lambda0 += shift * step;
    }
  }

  ProtocolTrial trial{};
  trial.omega0 = omega0;
  trial.lambda_lo = lambda_lo;
  trial.lambda_hi = lambda_hi;
  trial.lambda0 = lambda0;
  trial.omega1 = 2.0 * j * (lambda0 - 1.0) / hbar;
  trial.omega1_corrected = 2.0 * j * (lambda0 - 1.0 + config.delta) / hbar;
  trial.abs_error = std::abs(trial.omega1 - config.true_omega);
  trial.abs_error_corrected = std::abs(trial.omega1_corrected - config.true_omega);
  trial.ok = true;
  return trial;
}

ProtocolSummary run_trials(const ProtocolConfig& config) {
  config.validate();

  ProtocolSummary summary{};
  summary.trials = config.trials;
  summary.resolution_delta_omega =
      resolution(config.spec.coupling / config.spec.hbar, config.delta, config.spec.n_spins,
                 config.sqrt_eta);
  summary.feasible = summary.resolution_delta_omega < config.sigma;

  summary.per_trial.resize(static_cast<std::size_t>(config.trials));
  parallel_for(static_cast<std::size_t>(config.trials), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      // Private stream per trial, decorrelated from the trial index.
      std::mt19937_64 rng(splitmix64(splitmix64(config.seed) ^ (i + 1)));
      const double omega0 =
          pmg_sample(config.true_omega, config.sigma, config.noise_model, rng);
      ProtocolTrial trial{};
      try {
        trial = scan_and_estimate(config, omega0);
      } catch (const AnalysisError&) {
        trial.omega0 = omega0;
        const auto window = mfc_window(omega0, config.sigma, config.spec);
        trial.lambda_lo = window.first;
        trial.lambda_hi = window.second;
        trial.ok = false;
      }
      trial.index = static_cast<int>(i);
      summary.per_trial[i] = trial;
    }
  });

  // Aggregate in index order: bitwise reproducible.
  std::vector<double> errors;
  std::vector<double> corrected;
  int hits = 0;
  double signed_sum = 0.0;
  for (const auto& trial : summary.per_trial) {
    if (!trial.ok) continue;
    errors.push_back(trial.abs_error);
    corrected.push_back(trial.abs_error_corrected);
    signed_sum += config.true_omega - trial.omega1;
    if (trial.abs_error_corrected < summary.resolution_delta_omega) ++hits;
  }
  summary.succeeded = static_cast<int>(errors.size());
  if (!errors.empty()) {
    double sum = 0.0;
    for (double e : errors) sum += e;
    summary.mean_abs_error = sum / static_cast<double>(errors.size());
    sum = 0.0;
    for (double e : corrected) sum += e;
    summary.mean_abs_error_corrected = sum / static_cast<double>(corrected.size());
    summary.mean_signed_offset = signed_sum / static_cast<double>(errors.size());
    summary.p95_abs_error = percentile95(errors);
    summary.p95_abs_error_corrected = percentile95(corrected);
  }
  summary.success_rate =
      static_cast<double>(hits) / static_cast<double>(config.trials);
  return summary;
}

}  // namespace tfim
