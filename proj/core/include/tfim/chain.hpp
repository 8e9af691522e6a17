#pragma once

#include <vector>

namespace tfim {

/// Geometry and energy scales of a periodic transverse-field Ising chain.
///
/// Units are free; the conventional choice (and every CLI default) is
/// hbar = a = J = 1, in which times are measured in hbar/J.
struct ChainSpec {
  int n_spins = 2;               ///< N, even, >= 2
  double lattice_spacing = 1.0;  ///< a > 0
  double coupling = 1.0;         ///< J > 0, nearest-neighbour Ising coupling
  double hbar = 1.0;

  /// Throws std::invalid_argument("invalid chain: ...") on violation.
  void validate() const;
};

/// Transverse field lambda, probe coupling delta and rotation velocity omega.
struct FieldConfig {
  double lambda = 0.0;
  double delta = 0.0;  ///< >= 0
  double omega = 0.0;  ///< rad / time

  void validate() const;
};

/// One Bloch mode of the diagonalized chain, k = 2 n pi / (N a), n = 1..N/2.
struct BlochMode {
  int index;          ///< n in [1, N/2]
  double wavevector;  ///< k in (0, pi/a]
};

/// Rotation-shifted transverse field: lambda - hbar * omega / (2 J).
/// Pure and total on a valid spec.
double effective_lambda(const ChainSpec& spec, double lambda, double omega);

/// The N/2 positive-k modes in ascending wavevector order.
std::vector<BlochMode> bloch_modes(const ChainSpec& spec);

/// t0 = hbar / (2 J), the time at which half-widths are quoted.
double characteristic_time(const ChainSpec& spec);

}  // namespace tfim
