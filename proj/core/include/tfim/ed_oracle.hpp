#pragma once

#include <Eigen/Dense>

#include <tfim/chain.hpp>

namespace tfim {

/// Dense periodic-chain Hamiltonian
///   H = -J sum_i [ sz_i sz_{i+1} + x sx_i ],  site N+1 == 1,
/// with x = lambda_eff (+ delta when the probe qubit is excited). Real
/// symmetric in this basis. Size-capped at N = 12 (dimension 4096).
struct DenseHamiltonian {
  int n_spins;
  double field;  ///< the x actually applied
  Eigen::MatrixXd matrix;
};

DenseHamiltonian build_hamiltonian(int n_spins, double lambda_eff, double delta,
                                   bool excited, double coupling = 1.0);

/// Loschmidt echo from its definition,
///   L = |<G| e^{+i H_g t / hbar} e^{-i H_e t / hbar} |G>|^2,
/// H_g at lambda_eff, H_e at lambda_eff + delta, |G> the ground state of H_g.
/// Exact (full eigendecomposition), intended as the brute-force check of the
/// mode-product expression at small N.
struct EdEchoResult {
  double value;
  bool degenerate_ground_state;  ///< gap < 1e-8 J; value still valid
  double gap;                    ///< E1 - E0 of H_g
};

EdEchoResult loschmidt_echo_ed(int n_spins, double lambda_eff, double delta, double t,
                               double coupling = 1.0, double hbar = 1.0);

/// Checks numerically that evolving under the lab-frame time-dependent
/// Hamiltonian (Pauli z operators rotated about x by theta(t) = omega t) and
/// rotating the state back agrees with evolving under the static effective
/// Hamiltonian at lambda - hbar omega / (2J).
///
/// The lab-frame propagation uses time-ordered steps with the Hamiltonian
/// evaluated at the step midpoint; each step exponential is exact (dense
/// eigendecomposition), so the only error is the second-order midpoint one.
/// Returns the max over sampled step ends of 1 - |<psi_eff|psi'>|^2.
///
/// Initial state: ground state of the theta = 0 Hamiltonian (deterministic
/// tie-break, see loschmidt_echo_ed). N capped at 4, steps >= 10.
double frame_equivalence_check(int n_spins, double lambda, double omega,
                               double t_max, int steps,
                               double coupling = 1.0, double hbar = 1.0);

namespace detail {
/// Ground state with the deterministic degeneracy resolution: among
/// eigenvectors within 1e-8 J of the lowest energy, pick the one with the
/// largest overlap onto the uniform positive vector, then fix the sign so the
/// largest-magnitude amplitude is positive.
Eigen::VectorXd ground_state(const Eigen::MatrixXd& hamiltonian, double coupling,
                             bool* degenerate = nullptr, double* gap = nullptr);
}  // namespace detail

}  // namespace tfim
