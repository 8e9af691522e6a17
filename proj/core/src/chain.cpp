#include <tfim/chain.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfim {

void ChainSpec::validate() const {
  if (n_spins < 2 || n_spins % 2 != 0) {
    throw std::invalid_argument("invalid chain: n_spins must be even and >= 2, got " +
                                std::to_string(n_spins));
  }
  if (!(lattice_spacing > 0.0)) throw std::invalid_argument("invalid chain: lattice_spacing <= 0");
  if (!(coupling > 0.0)) throw std::invalid_argument("invalid chain: coupling <= 0");
  if (!(hbar > 0.0)) throw std::invalid_argument("invalid chain: hbar <= 0");
}

void FieldConfig::validate() const {
  if (!(delta >= 0.0)) throw std::invalid_argument("invalid field config: delta < 0");
  if (!std::isfinite(lambda) || !std::isfinite(delta) || !std::isfinite(omega)) {
    throw std::invalid_argument("invalid field config: non-finite value");
  }
}

double effective_lambda(const ChainSpec& spec, double lambda, double omega) {
  spec.validate();
  return lambda - spec.hbar * omega / (2.0 * spec.coupling);
}

std::vector<BlochMode> bloch_modes(const ChainSpec& spec) {
  spec.validate();
  const int half = spec.n_spins / 2;
  std::vector<BlochMode> modes;
  modes.reserve(static_cast<std::size_t>(half));
  const double step = 2.0 * std::numbers::pi / (spec.n_spins * spec.lattice_spacing);
  for (int n = 1; n <= half; ++n) {
    modes.push_back({n, n * step});
  }
  return modes;
}

double characteristic_time(const ChainSpec& spec) {
  spec.validate();
  return spec.hbar / (2.0 * spec.coupling);
}

}  // namespace tfim
