#include <tfim/ed_oracle.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace tfim {

namespace {

using Cplx = std::complex<double>;

constexpr double kDegenerateGapFactor = 1e-8;

// H = -J sum_i [ sz_i sz_{i+1} + x sx_i ] on the bit basis (bit = 1 means
// spin down), built without forming operator products. Allows N = 1, where
// the periodic bond is the identity.
Eigen::MatrixXd static_hamiltonian(int n, double x, double j) {
  const int dim = 1 << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    double zz = 0.0;
    for (int i = 0; i < n; ++i) {
      const int zi = ((s >> i) & 1) ? -1 : 1;
      const int zj = ((s >> ((i + 1) % n)) & 1) ? -1 : 1;
      zz += zi * zj;
    }
    h(s, s) = -j * zz;
    for (int i = 0; i < n; ++i) {
      h(s ^ (1 << i), s) += -j * x;
    }
  }
  return h;
}

// Single-site operator embedded at `site`, with site i on bit i of the basis
// index (matching static_hamiltonian). Only used in the frame check (dim <= 16).
Eigen::MatrixXcd embed(int n, int site, const Eigen::Matrix2cd& op) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int j = 0; j < n; ++j) {
    const Eigen::Matrix2cd factor = (j == site) ? op : Eigen::Matrix2cd::Identity();
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(out.rows() * 2, out.cols() * 2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        if (factor(r, c) != 0.0) {
          next.block(r * out.rows(), c * out.cols(), out.rows(), out.cols()) = factor(r, c) * out;
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

namespace detail {

Eigen::VectorXd ground_state(const Eigen::MatrixXd& hamiltonian, double coupling,
                             bool* degenerate, double* gap) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Eigen::MatrixXd& evecs = solver.eigenvectors();
  const int dim = static_cast<int>(evals.size());

  const double g = (dim > 1) ? evals(1) - evals(0) : 0.0;
  if (gap) *gap = g;
  if (degenerate) *degenerate = dim > 1 && g < kDegenerateGapFactor * coupling;

  // Candidates within the degeneracy window of the lowest energy.
  const double window = kDegenerateGapFactor * coupling;
  int best = 0;
  double best_overlap = -1.0;
  const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < dim && evals(i) - evals(0) <= window; ++i) {
    const double overlap = std::abs(evecs.col(i).sum() * inv_sqrt_dim);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = i;
    }
  }

  Eigen::VectorXd state = evecs.col(best);
  int arg_max = 0;
  for (int i = 1; i < dim; ++i) {
    if (std::abs(state(i)) > std::abs(state(arg_max))) arg_max = i;
  }
  if (state(arg_max) < 0.0) state = -state;
  return state;
}

}  // namespace detail

DenseHamiltonian build_hamiltonian(int n_spins, double lambda_eff, double delta, bool excited,
                                   double coupling) {
  if (n_spins < 2 || n_spins > 12) {
    throw std::invalid_argument("dense oracle size cap: n_spins must be in [2, 12], got " +
                                std::to_string(n_spins));
  }
  if (!(delta >= 0.0)) throw std::invalid_argument("invalid field config: delta < 0");
  if (!(coupling > 0.0)) throw std::invalid_argument("invalid chain: coupling <= 0");
  const double x = lambda_eff + (excited ? delta : 0.0);
  return {n_spins, x, static_hamiltonian(n_spins, x, coupling)};
}

EdEchoResult loschmidt_echo_ed(int n_spins, double lambda_eff, double delta, double t,
                               double coupling, double hbar) {
  if (t < 0.0) throw std::invalid_argument("negative time");
  if (!(hbar > 0.0)) throw std::invalid_argument("invalid chain: hbar <= 0");
  const DenseHamiltonian hg = build_hamiltonian(n_spins, lambda_eff, delta, false, coupling);
  const DenseHamiltonian he = build_hamiltonian(n_spins, lambda_eff, delta, true, coupling);

  EdEchoResult out{};
  const Eigen::VectorXd ground =
      detail::ground_state(hg.matrix, coupling, &out.degenerate_ground_state, &out.gap);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(hg.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ee(he.matrix);
  const double ground_energy = ge.eigenvalues()(0);

  // <G| e^{+i Hg t/h} e^{-i He t/h} |G>, with Hg acting on its own ground state.
  const Eigen::VectorXd coeff = ee.eigenvectors().transpose() * ground;
  Cplx amp(0.0, 0.0);
  for (int j = 0; j < coeff.size(); ++j) {
    amp += coeff(j) * coeff(j) * std::exp(Cplx(0.0, -(ee.eigenvalues()(j)) * t / hbar));
  }
  amp *= std::exp(Cplx(0.0, ground_energy * t / hbar));
  out.value = std::norm(amp);
  return out;
}

double frame_equivalence_check(int n_spins, double lambda, double omega, double t_max,
                               int steps, double coupling, double hbar) {
  if (n_spins > 4) {
    throw std::invalid_argument("frame check size cap: n_spins must be in [1, 4], got " +
                                std::to_string(n_spins));
  }
  if (n_spins < 1) throw std::invalid_argument("frame check size cap: n_spins < 1");
  if (steps < 10) throw std::invalid_argument("steps < 10");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (!(coupling > 0.0) || !(hbar > 0.0)) throw std::invalid_argument("invalid chain scales");

  const int n = n_spins;
  const int dim = 1 << n;

  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, Cplx(0, -1), Cplx(0, 1), 0;
  sz << 1, 0, 0, -1;

  // Bond pieces of the rotated Ising term:
  //   sz_i(th) sz_{i+1}(th) = sin^2 th * yy + sin th cos th * (yz + zy) + cos^2 th * zz.
  Eigen::MatrixXcd yy = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd yz_zy = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd zz = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd sx_total = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const Eigen::MatrixXcd yi = embed(n, i, sy);
    const Eigen::MatrixXcd yj = embed(n, j, sy);
    const Eigen::MatrixXcd zi = embed(n, i, sz);
    const Eigen::MatrixXcd zj = embed(n, j, sz);
    yy += yi * yj;
    yz_zy += yi * zj + zi * yj;
    zz += zi * zj;
    sx_total += embed(n, i, sx);
  }

  const auto lab_hamiltonian = [&](double theta) -> Eigen::MatrixXcd {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return -coupling * (s * s * yy + s * c * yz_zy + c * c * zz + lambda * sx_total);
  };

  // Initial state: ground state of the theta = 0 Hamiltonian.
  const Eigen::MatrixXd h0 = static_hamiltonian(n, lambda, coupling);
  const Eigen::VectorXd psi0_real = detail::ground_state(h0, coupling);
  Eigen::VectorXcd psi_lab = psi0_real.cast<Cplx>();

  // Static effective Hamiltonian evolution, exact via one eigendecomposition.
  const double lambda_eff = lambda - hbar * omega / (2.0 * coupling);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eff(static_hamiltonian(n, lambda_eff, coupling));
  const Eigen::VectorXd eff_coeff = eff.eigenvectors().transpose() * psi0_real;

  // Frame rotation R(theta) = exp(-i theta sum_i sx_i / 2), via the x-basis.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> xbasis(Eigen::MatrixXd(sx_total.real()));

  const double dt = t_max / steps;
  double worst = 0.0;
  for (int m = 0; m < steps; ++m) {
    const double theta_mid = omega * (m + 0.5) * dt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hsolver(lab_hamiltonian(theta_mid));
    const Eigen::VectorXcd phases =
        (Cplx(0.0, -dt / hbar) * hsolver.eigenvalues().array().cast<Cplx>()).exp();
    psi_lab = hsolver.eigenvectors() *
              (phases.array() * (hsolver.eigenvectors().adjoint() * psi_lab).array()).matrix();

    const double t = (m + 1) * dt;

    const Eigen::VectorXcd rot_phases =
        (Cplx(0.0, -omega * t / 2.0) * xbasis.eigenvalues().array().cast<Cplx>()).exp();
    const Eigen::VectorXcd psi_rot =
        xbasis.eigenvectors().cast<Cplx>() *
        (rot_phases.array() * (xbasis.eigenvectors().transpose().cast<Cplx>() * psi_lab).array())
            .matrix();

    const Eigen::VectorXcd eff_phases =
        (Cplx(0.0, -t / hbar) * eff.eigenvalues().array().cast<Cplx>()).exp();
    const Eigen::VectorXcd psi_eff =
        eff.eigenvectors().cast<Cplx>() * (eff_phases.array() * eff_coeff.array()).matrix();

    const double fidelity = std::norm(psi_eff.dot(psi_rot));
    worst = std::max(worst, 1.0 - fidelity);

    if (std::abs(psi_lab.squaredNorm() - 1.0) > 1e-8) {
      throw std::runtime_error("integrator norm drift exceeded 1e-8");
    }
  }
  return worst;
}

}  // namespace tfim
