#pragma once

// Block renormalization: a 7-site block is replaced by one effective site
// spanned by four kept block states
//
//   empty'  = (N_up, N_down) = (3, 3)      charge -1
//   up'     = (4, 3)                       charge  0
//   down'   = (3, 4), spin flip of up'     charge  0
//   double' = (4, 4)                       charge +1
//
// and the effective site is again a Hubbard site with
//
//   U' = E(empty') + E(double') - 2 E(up')
//   t' = t * s_max(T),   T_ab = sum_{(i,j) in B} A^a_i A^b_j,   A^a_i = <empty'| c_{i,up} |up'_a>
//
// where B are the three bonds towards one neighbouring block. When up' is a
// multiplet, T is a matrix over it and its largest singular value is the
// hopping amplitude; for a single state this is |sum A_i A_j|.
//
// Choice of up'. The block ground state in (4, 3) changes its rotation class
// as u grows (a twofold level of the two-dimensional class at weak coupling,
// one-dimensional classes beyond u ~ 4.6 and u ~ 12), which makes a
// ground-state map discontinuous. The default SymmetryBranch scheme keeps
// the lowest doublet of the two-dimensional class with C2 = +1 at every u,
// which continues the weak-coupling ground state smoothly. GroundMultiplet
// keeps the true lowest (4, 3) multiplet instead.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trirg/ed/basis.hpp"
#include "trirg/ed/eigensolver.hpp"
#include "trirg/ed/hamiltonian.hpp"
#include "trirg/ed/symmetry.hpp"
#include "trirg/entanglement/distribution.hpp"
#include "trirg/error.hpp"
#include "trirg/lattice.hpp"

namespace trirg::rg {

enum class KeptScheme { SymmetryBranch, GroundMultiplet };

inline const char* to_string(KeptScheme s) {
  return s == KeptScheme::SymmetryBranch ? "symmetry-branch" : "ground-multiplet";
}

struct RGOptions {
  KeptScheme scheme = KeptScheme::SymmetryBranch;
  /// Block problems with u above this are solved at u_cap; the coupling
  /// ratios t'/t and U'/U have converged to their strong-coupling form
  /// there, while the exchange scale t^2/U would otherwise sink below the
  /// solver tolerance.
  double u_cap = 1000.0;
  /// Also solve the unrestricted (4, 3) ground state for the charge gap.
  bool compute_gap = true;
  ed::SolverOptions solver{};
};

struct KeptState {
  ed::SectorBasis basis;
  ed::Multiplet multiplet;

  double energy() const { return multiplet.energy; }
  const std::vector<std::vector<double>>& vectors() const { return multiplet.vectors; }
};

struct KeptStates {
  ed::HubbardParams params;
  KeptScheme scheme = KeptScheme::SymmetryBranch;
  KeptState empty;
  KeptState up;
  KeptState down;
  KeptState dbl;

  const KeptState& operator[](std::size_t k) const {
    switch (k) {
      case 0: return empty;
      case 1: return up;
      case 2: return down;
      default: return dbl;
    }
  }

  /// Kept state whose lowest level is degenerate (symmetry multiplets).
  bool degenerate(std::size_t k) const { return (*this)[k].multiplet.size() > 1; }
};

struct RGStepResult {
  double t_next = 0.0;
  double U_next = 0.0;
  /// Mean of E(empty') and E(double'): per-site offset of the new site.
  double e0_next = 0.0;
  /// (E(empty') - E(double'))/2: chemical-potential-like term; a uniform
  /// term drops out at fixed particle number and is not propagated.
  double mu_next = 0.0;
  /// Rows: kept state (empty', up', down', double'); columns: occupation of
  /// the central site (empty, up, down, double).
  std::array<std::array<double, 4>, 4> descent_w{};
  /// Hopping from the (down', double') channel, for comparison.
  double t_hole = 0.0;
  double E_empty = 0.0;
  double E_up = 0.0;
  double E_double = 0.0;
  /// Block charge gap from unrestricted sector ground states (NaN if not
  /// computed).
  double charge_gap = std::numeric_limits<double>::quiet_NaN();
  /// Site distributions of the up' multiplet (equal-weight mixture).
  std::vector<entanglement::OccupationDistribution> up_sites;
  std::size_t up_multiplicity = 0;
  std::size_t double_multiplicity = 0;

  double u_next() const { return U_next / t_next; }
};

namespace detail {

inline void fix_phase(std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (std::abs(v[k]) > std::abs(v[best])) best = k;
  }
  if (!v.empty() && v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

inline KeptState solve_sector(std::span<const ed::Bond> bonds, const ed::HubbardParams& p, std::size_t nup,
                              std::size_t ndown, const ed::SolverOptions& opt, const ed::Projector* proj = nullptr) {
  KeptState s{ed::SectorBasis(7, nup, ndown), {}};
  s.multiplet = ed::lowest_multiplet(ed::build_hamiltonian(bonds, p, s.basis), opt, proj);
  for (auto& v : s.multiplet.vectors) fix_phase(v);
  return s;
}

/// Largest singular value of T over the product multiplet (bra x ket).
inline double channel_amplitude(const KeptState& bra, const KeptState& ket,
                                const std::vector<lattice::SitePair>& boundary) {
  const std::size_t gb = bra.vectors().size();
  const std::size_t gk = ket.vectors().size();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(gb * gk), 7);
  for (std::size_t a = 0; a < gb; ++a) {
    for (std::size_t c = 0; c < gk; ++c) {
      for (std::size_t i = 0; i < 7; ++i) {
        A(static_cast<Eigen::Index>(a * gk + c), static_cast<Eigen::Index>(i)) = ed::annihilation_element(
            bra.vectors()[a], bra.basis, ket.vectors()[c], ket.basis, i, ed::Spin::Up);
      }
    }
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(A.rows(), A.rows());
  for (const auto& [i, j] : boundary) {
    T += A.col(static_cast<Eigen::Index>(i)) * A.col(static_cast<Eigen::Index>(j)).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(T);
  return svd.singularValues()(0);
}

}  // namespace detail

inline KeptStates compute_kept_states(const lattice::BlockGeometry& g, const ed::HubbardParams& p,
                                      const RGOptions& opt = {}) {
  if (g.size() != 7) throw ValidationError("compute_kept_states: block must have 7 sites");
  if (!(p.t > 0.0)) throw ValidationError("compute_kept_states: t must be positive");
  if (!(p.U >= 0.0)) throw ValidationError("compute_kept_states: U must be non-negative");

  const auto bonds = ed::bonds_from_pairs(g.intra_bonds);
  KeptStates k;
  k.params = p;
  k.scheme = opt.scheme;

  k.empty = detail::solve_sector(bonds, p, 3, 3, opt.solver);
  if (k.empty.multiplet.size() != 1) {
    throw DegeneracyError("compute_kept_states: (3,3) ground state is " +
                          std::to_string(k.empty.multiplet.size()) + "-fold degenerate at u = " +
                          std::to_string(p.u()));
  }

  if (opt.scheme == KeptScheme::SymmetryBranch) {
    const ed::SectorBasis basis(7, 4, 3);
    const auto rot = lattice::rotation_permutation(g);
    const ed::RotationIrrepProjector P(basis, rot);
    const ed::Projector proj = P.as_projector();
    k.up = detail::solve_sector(bonds, p, 4, 3, opt.solver, &proj);
    if (k.up.multiplet.size() != 2) {
      throw DegeneracyError("compute_kept_states: doublet branch has multiplicity " +
                            std::to_string(k.up.multiplet.size()) + " at u = " + std::to_string(p.u()));
    }
  } else {
    k.up = detail::solve_sector(bonds, p, 4, 3, opt.solver);
  }

  k.down.basis = ed::SectorBasis(7, 3, 4);
  k.down.multiplet = k.up.multiplet;
  for (auto& v : k.down.multiplet.vectors) v = ed::spin_flip(v, k.up.basis, k.down.basis);

  k.dbl = detail::solve_sector(bonds, p, 4, 4, opt.solver);
  return k;
}

inline RGStepResult renormalize(const KeptStates& kept, const lattice::BlockGeometry& g, const RGOptions& opt = {},
                                std::size_t direction = 0) {
  if (direction >= 6) throw ValidationError("renormalize: direction must be in [0, 6)");
  const ed::HubbardParams& p = kept.params;
  RGStepResult r;
  r.E_empty = kept.empty.energy();
  r.E_up = kept.up.energy();
  r.E_double = kept.dbl.energy();
  r.U_next = r.E_empty + r.E_double - 2.0 * r.E_up;
  const double scale = std::max({1.0, std::abs(r.E_empty), std::abs(r.E_double)});
  if (r.U_next < 0.0 && r.U_next > -1e-9 * scale) r.U_next = 0.0;
  if (p.U == 0.0 && std::abs(r.U_next) < 1e-9 * scale) r.U_next = 0.0;
  r.e0_next = 0.5 * (r.E_empty + r.E_double);
  r.mu_next = 0.5 * (r.E_empty - r.E_double);

  const auto& boundary = g.boundary_bonds[direction];
  r.t_next = p.t * detail::channel_amplitude(kept.empty, kept.up, boundary);
  r.t_hole = p.t * detail::channel_amplitude(kept.down, kept.dbl, boundary);
  if (!(r.t_next > 0.0)) throw NumericalError("renormalize: vanishing effective hopping");

  for (std::size_t row = 0; row < 4; ++row) {
    const auto d = entanglement::site_distribution(kept[row].vectors(), kept[row].basis, 0);
    for (std::size_t c = 0; c < 4; ++c) r.descent_w[row][c] = d.p[c];
  }
  for (std::size_t s = 0; s < 7; ++s) r.up_sites.push_back(entanglement::site_distribution(kept.up.vectors(), kept.up.basis, s));
  r.up_multiplicity = kept.up.multiplet.size();
  r.double_multiplicity = kept.dbl.multiplet.size();

  if (opt.compute_gap) {
    const auto bonds = ed::bonds_from_pairs(g.intra_bonds);
    double e_half = r.E_up;
    if (kept.scheme == KeptScheme::SymmetryBranch) {
      const ed::SectorBasis basis(7, 4, 3);
      e_half = ed::lowest_multiplet(ed::build_hamiltonian(bonds, p, basis), opt.solver).energy;
    }
    r.charge_gap = std::max(0.0, r.E_empty + r.E_double - 2.0 * e_half);
  }
  return r;
}

/// One RG step at t = 1: the renormalized coupling u' as a function of u.
inline double renormalized_u(double u, const lattice::BlockGeometry& g, RGOptions opt = {}) {
  opt.compute_gap = false;
  const auto kept = compute_kept_states(g, {1.0, u, 0.0}, opt);
  return renormalize(kept, g, opt).u_next();
}

// ---------------------------------------------------------------------------
// Trajectories

struct LevelRecord {
  std::size_t level = 0;
  double u = 0.0;
  /// Coupling actually used for the block solve (u clamped at u_cap).
  double u_solved = 0.0;
  /// Couplings of this level in units of the bare hopping.
  double t = 1.0;
  double U = 0.0;
  double e0 = 0.0;
  /// Step computed at t = 1, U = u_solved.
  RGStepResult step;
  /// Block charge gap in bare units.
  double gap = std::numeric_limits<double>::quiet_NaN();

  bool clamped() const { return u_solved != u; }
};

struct RGTrajectory {
  double u0 = 0.0;
  std::vector<LevelRecord> levels;

  std::vector<double> u_sequence() const {
    std::vector<double> out;
    for (const auto& l : levels) out.push_back(l.u);
    return out;
  }

  /// Bare sites covered by the 7-site top problem at this level.
  static double system_size(std::size_t level) { return std::pow(7.0, static_cast<double>(level + 1)); }
};

inline constexpr std::size_t kMaxLevels = 9;

inline RGTrajectory rg_flow(double u0, std::size_t nlevels, const lattice::BlockGeometry& g, const RGOptions& opt = {}) {
  if (!(u0 >= 0.0) || !std::isfinite(u0)) throw ValidationError("rg_flow: u0 must be finite and non-negative");
  if (nlevels == 0 || nlevels > kMaxLevels) {
    throw ValidationError("rg_flow: nlevels must be in [1, 9], got " + std::to_string(nlevels));
  }
  if (!(opt.u_cap > 0.0)) throw ValidationError("rg_flow: u_cap must be positive");

  RGTrajectory traj;
  traj.u0 = u0;
  double t = 1.0;
  double U = u0;
  double e0 = 0.0;
  for (std::size_t k = 0; k < nlevels; ++k) {
    LevelRecord rec;
    rec.level = k;
    rec.t = t;
    rec.U = U;
    rec.e0 = e0;
    rec.u = U / t;
    rec.u_solved = std::min(rec.u, opt.u_cap);
    const auto kept = compute_kept_states(g, {1.0, rec.u_solved, 0.0}, opt);
    rec.step = renormalize(kept, g, opt);

    // Energies of the normalized problem scale with t; beyond the cap they
    // are extrapolated linearly in U.
    const double energy_scale = rec.u_solved > 0.0 ? t * (rec.u / rec.u_solved) : t;
    if (opt.compute_gap) rec.gap = energy_scale * rec.step.charge_gap;

    t = t * rec.step.t_next;
    U = energy_scale * rec.step.U_next;
    e0 = 7.0 * e0 + energy_scale * rec.step.e0_next;
    if (!std::isfinite(t) || !std::isfinite(U) || t <= 0.0) {
      throw NumericalError("rg_flow: couplings left the representable range at level " + std::to_string(k));
    }
    traj.levels.push_back(std::move(rec));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Fixed point

inline double find_fixed_point(double u_lo, double u_hi, const lattice::BlockGeometry& g, const RGOptions& opt = {},
                               double tol = 1e-6) {
  if (!(u_lo >= 0.0) || !(u_hi > u_lo)) throw ValidationError("find_fixed_point: need 0 <= u_lo < u_hi");
  auto f = [&](double u) { return renormalized_u(u, g, opt) - u; };
  double f_lo = f(u_lo);
  const double f_hi = f(u_hi);
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw NumericalError("find_fixed_point: no sign change of u' - u on [" + std::to_string(u_lo) + ", " +
                         std::to_string(u_hi) + "]");
  }
  while (u_hi - u_lo >= tol) {
    const double mid = 0.5 * (u_lo + u_hi);
    const double f_mid = f(mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      u_lo = mid;
      f_lo = f_mid;
    } else {
      u_hi = mid;
    }
  }
  return 0.5 * (u_lo + u_hi);
}

struct Linearization {
  double slope = 0.0;
  double nu = 0.0;
};

/// nu = ln(sqrt 7) / ln(du'/du) at the fixed point.
inline Linearization nu_from_linearization(double u_star, const lattice::BlockGeometry& g, const RGOptions& opt = {}) {
  if (!(u_star > 0.0)) throw ValidationError("nu_from_linearization: u* must be positive");
  const double h = 1e-4 * u_star;
  Linearization lin;
  lin.slope = (renormalized_u(u_star + h, g, opt) - renormalized_u(u_star - h, g, opt)) / (2.0 * h);
  if (!(lin.slope > 1.0)) {
    throw NumericalError("nu_from_linearization: du'/du = " + std::to_string(lin.slope) + " <= 1, no relevant direction");
  }
  lin.nu = std::log(std::sqrt(7.0)) / std::log(lin.slope);
  return lin;
}

}  // namespace trirg::rg
