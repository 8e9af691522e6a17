#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <tfim/chain.hpp>

namespace tfim {

/// Raised for the analysis failure modes that are data-dependent rather than
/// caller bugs ("valley too shallow", "crossing not bracketed").
class AnalysisError : public std::runtime_error {
 public:
  explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

struct EchoSample {
  double omega;
  double lambda_tilde;
  double loschmidt;
};

struct EchoCurve {
  ChainSpec spec;
  double delta;
  double lambda;
  double time;
  std::vector<EchoSample> samples;  ///< omega strictly increasing
};

/// Samples the echo over an Omega grid at fixed (lambda, delta, time).
/// Grid must be non-empty and strictly increasing. Parallel over grid
/// points; each point is evaluated independently, so the result is bitwise
/// independent of the worker count.
EchoCurve scan_curve(const ChainSpec& spec, double delta, double lambda, double time,
                     std::span<const double> omega_grid);

enum class HalfWidthConvention { one_sided, chord_omega };

/// Half-width of the echo valley against the L = 1/2 line at fixed time.
///
/// The valley center is taken at lambda_tilde = 1 - delta (where the
/// short-time closed form diverges). epsilon0 is the one-sided convention:
/// the mean of the two center-to-crossing distances in field units, so the
/// field-space chord is exactly 2 epsilon0. chord_omega is the full chord
/// between the two crossings mapped to rotation-velocity units, the
/// blue-line reading of the valley plots.
struct HalfWidthResult {
  double epsilon0;     ///< field units, > 0
  double delta_omega;  ///< 2 J epsilon0 / hbar, exact by construction
  double chord_omega;  ///< (2 J / hbar) * (field-space chord)
  double time;
  double bracket_lo;   ///< lambda_tilde of the left L=1/2 crossing
  double bracket_hi;   ///< lambda_tilde of the right L=1/2 crossing
  double residual;     ///< max |L - 1/2| at the two crossings, < 1e-8
};

/// Root-solves L = 1/2 by bisection on each flank, growing the bracket
/// geometrically from the valley center out to search_window (field units).
/// Throws AnalysisError("valley too shallow") when the center sits above 1/2
/// (no center-rooted crossing exists; happens for small delta sqrt(N)), and
/// AnalysisError("crossing not bracketed") when a flank never recrosses 1/2
/// inside the window.
HalfWidthResult half_width(const ChainSpec& spec, double delta, double lambda,
                           double time, double search_window);

struct EtaFitPoint {
  double delta;
  double epsilon0;
};

/// Origin-constrained least squares of epsilon0 = sqrt(eta) * sqrt(N) * delta.
/// r_squared is the uncentered coefficient 1 - SS_res / sum(y^2), the usual
/// definition for regression through the origin.
struct EtaFit {
  double sqrt_eta;
  double r_squared;
  std::vector<EtaFitPoint> points;
  int n_spins;
};

EtaFit fit_eta(std::span<const EtaFitPoint> points, int n_spins);

/// Sensor resolution Delta-Omega = 2 sqrt(eta) omega0 delta sqrt(N).
double resolution(double omega0_char, double delta, int n_spins, double sqrt_eta);

/// Usefulness constraint: strict delta sqrt(N) < 1.33 sigma / omega0.
/// margin is the ratio of the two sides (< 1 means satisfied).
struct ConstraintResult {
  bool satisfied;
  double margin;
};

ConstraintResult constraint_check(double delta, int n_spins, double sigma, double omega0_char);

struct CollapseCase {
  int n_spins;
  double delta;
};

struct CollapseEntry {
  int n_spins;
  double delta;
  double delta_sqrt_n;
  double epsilon0;
  double delta_omega;
};

struct CollapseReport {
  std::vector<CollapseEntry> entries;
  double max_pairwise_rel_dev;  ///< max over pairs of |a-b| / min(a,b) on delta_omega
  bool pass;                    ///< < 0.10
};

/// Half-width collapse across cases sharing delta sqrt(N) (within 1% of the
/// set mean; violating that is a precondition error). Half-width failures
/// ("valley too shallow") propagate.
CollapseReport collapse_check(std::span<const CollapseCase> cases, double lambda,
                              double time, double search_window = 1.0);

}  // namespace tfim
