#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>

#include "trirg/ed/basis.hpp"
#include "trirg/ed/eigensolver.hpp"
#include "trirg/ed/hamiltonian.hpp"

namespace trirg::ed {

/// Spin sector used for n electrons: (ceil(n/2), floor(n/2)).
inline std::pair<std::size_t, std::size_t> sector_for(std::size_t nelectrons) {
  return {(nelectrons + 1) / 2, nelectrons / 2};
}

/// Lowest energy with n electrons on nsites sites.
inline double lowest_energy(std::span<const Bond> bonds, const HubbardParams& p, std::size_t nsites,
                            std::size_t nelectrons, const SolverOptions& opt = {}) {
  const auto [nup, ndown] = sector_for(nelectrons);
  const SectorBasis basis(nsites, nup, ndown);
  return lowest_multiplet(build_hamiltonian(bonds, p, basis), opt).energy;
}

/// E(N-1) + E(N+1) - 2 E(N) at half filling N = nsites. Values within
/// 1e-9 below zero are clipped to 0.
inline double charge_gap(std::span<const Bond> bonds, const HubbardParams& p, std::size_t nsites,
                         const SolverOptions& opt = {}) {
  if (nsites == 0) throw ValidationError("charge_gap: nsites must be positive");
  const double e_minus = lowest_energy(bonds, p, nsites, nsites - 1, opt);
  const double e_plus = lowest_energy(bonds, p, nsites, nsites + 1, opt);
  const double e_half = lowest_energy(bonds, p, nsites, nsites, opt);
  const double gap = e_minus + e_plus - 2.0 * e_half;
  if (gap < -1e-9) throw NumericalError("charge_gap: negative gap " + std::to_string(gap));
  return std::max(gap, 0.0);
}

}  // namespace trirg::ed
