#pragma once

// Entanglement observables of an RG trajectory.
//
// The top problem at level k is the 7-site block of level-k effective sites
// with couplings (t_k, U_k), describing N = 7^(k+1) bare sites. Its state in
// the half-filled (4, 3) sector is the kept up' multiplet of that level, so
// the site distributions come straight from the trajectory record. Reported
// distributions are spin-symmetrized.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "trirg/entanglement/distribution.hpp"
#include "trirg/error.hpp"
#include "trirg/lattice.hpp"
#include "trirg/rg.hpp"

namespace trirg::entanglement {

inline constexpr std::size_t kCenterSite = 0;
inline constexpr std::size_t kRimSite = 1;

inline void check_level(const rg::RGTrajectory& traj, std::size_t level, const char* who) {
  if (level >= traj.levels.size()) {
    throw ValidationError(std::string(who) + ": level " + std::to_string(level) + " beyond trajectory of " +
                          std::to_string(traj.levels.size()) + " levels");
  }
}

/// Distribution of one effective site of the level's top problem.
inline OccupationDistribution top_site_distribution(const rg::RGTrajectory& traj, std::size_t level,
                                                    std::size_t site = kCenterSite) {
  check_level(traj, level, "top_site_distribution");
  const auto& sites = traj.levels[level].step.up_sites;
  if (site >= sites.size()) throw ValidationError("top_site_distribution: site out of range");
  return sites[site].spin_symmetrized();
}

struct BlockBlock {
  double center = 0.0;
  double rim = 0.0;
};

/// E_bb (central effective site vs the rest) and E_b7 (a rim site vs the rest).
inline BlockBlock block_block_entanglement(const rg::RGTrajectory& traj, std::size_t level,
                                           LogBase base = LogBase::Two, std::size_t rim_site = kRimSite) {
  if (rim_site == kCenterSite || rim_site >= 7) throw ValidationError("block_block_entanglement: bad rim site");
  return {entropy(top_site_distribution(traj, level, kCenterSite), base),
          entropy(top_site_distribution(traj, level, rim_site), base)};
}

/// (2 E_bb + E_b7) / 7.
inline double average_entanglement(double e_bb, double e_b7) { return (2.0 * e_bb + e_b7) / 7.0; }

/// Pushes a distribution over level-`from` site states down to the central
/// site at level `to` through the descent matrices of the levels in between.
inline OccupationDistribution descend(const OccupationDistribution& p_top, const rg::RGTrajectory& traj,
                                      std::size_t from_level, std::size_t to_level) {
  if (to_level > from_level) throw ValidationError("descend: to_level must not exceed from_level");
  if (from_level > traj.levels.size()) throw ValidationError("descend: from_level beyond trajectory");
  OccupationDistribution p = p_top;
  for (std::size_t k = from_level; k > to_level; --k) {
    const auto& w = traj.levels[k - 1].step.descent_w;
    OccupationDistribution q{{0.0, 0.0, 0.0, 0.0}};
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) q.p[c] += p.p[r] * w[r][c];
    }
    p = q;
  }
  return p;
}

/// Entropy of one bare site at the center of the level's top problem.
inline double single_site_entanglement(const rg::RGTrajectory& traj, std::size_t level, LogBase base = LogBase::E) {
  return entropy(descend(top_site_distribution(traj, level), traj, level, 0), base);
}

struct BlockSizePoint {
  std::size_t block_level = 0;
  /// Bare sites in the block: 7^block_level.
  double block_size = 1.0;
  double entropy = 0.0;
};

/// Entanglement of the central level-m block with the rest of a system of
/// 7^(total_level+1) sites, for each m in block_levels.
inline std::vector<BlockSizePoint> block_entanglement_vs_size(const rg::RGTrajectory& traj, std::size_t total_level,
                                                              const std::vector<std::size_t>& block_levels,
                                                              LogBase base = LogBase::Two) {
  check_level(traj, total_level, "block_entanglement_vs_size");
  const auto top = top_site_distribution(traj, total_level);
  std::vector<BlockSizePoint> out;
  for (std::size_t m : block_levels) {
    if (m > total_level) throw ValidationError("block_entanglement_vs_size: block level above total level");
    out.push_back({m, std::pow(7.0, static_cast<double>(m)), entropy(descend(top, traj, total_level, m), base)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transition width

/// E_bb of a single block problem at coupling u (the level-0 top problem).
inline double block_center_entropy(double u, const lattice::BlockGeometry& g, const rg::RGOptions& opt) {
  rg::RGOptions o = opt;
  o.compute_gap = false;
  return block_block_entanglement(rg::rg_flow(u, 1, g, o), 0).center;
}

namespace detail {

template <typename F>
double solve_increasing(F f, double target, double lo, double hi, double rel_tol) {
  // f increasing on [lo, hi], f(lo) <= target <= f(hi).
  boost::math::tools::eps_tolerance<double> tol(static_cast<int>(-std::log2(rel_tol)));
  std::uintmax_t iters = 200;
  const auto g = [&](double x) { return f(x) - target; };
  const double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if (glo > 0.0 || ghi < 0.0) throw NumericalError("root bracket does not enclose the target");
  const auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace detail

struct TransitionWidth {
  std::size_t level = 0;
  /// Bare couplings where E_bb(level) crosses the upper and lower thresholds.
  double u_upper = 0.0;
  double u_lower = 0.0;
  double width() const { return u_lower - u_upper; }
};

/// Width in u0 of the interval over which E_bb at `level` falls from
/// `upper` to `lower` bits. E_bb at level k depends on u0 only through
/// u_k, so the crossing couplings of the single block are pulled back
/// through k inverse RG steps. The first downward crossing of each
/// threshold on [0, u_search] is used.
inline std::vector<TransitionWidth> transition_widths(const std::vector<std::size_t>& levels,
                                                      const lattice::BlockGeometry& g, const rg::RGOptions& opt = {},
                                                      double upper = 1.75, double lower = 1.25,
                                                      double u_search = 200.0) {
  if (!(upper > lower)) throw ValidationError("transition_widths: upper threshold must exceed lower");
  const auto F = [&](double u) { return block_center_entropy(u, g, opt); };

  const auto first_crossing = [&](double threshold) {
    double prev_u = 0.0;
    double prev_f = F(0.0);
    for (double u = 0.25; u <= u_search; u *= 1.25) {
      const double f = F(u);
      if (prev_f >= threshold && f < threshold) {
        return detail::solve_increasing([&](double x) { return -F(x); }, -threshold, prev_u, u, 1e-12);
      }
      prev_u = u;
      prev_f = f;
    }
    throw NumericalError("transition_widths: E_bb never crosses " + std::to_string(threshold));
  };

  const auto phi = [&](double u) { return rg::renormalized_u(u, g, opt); };
  const auto inverse_phi = [&](double v) {
    double hi = std::max(1.0, v);
    while (phi(hi) < v) hi *= 2.0;
    return detail::solve_increasing(phi, v, 0.0, hi, 1e-12);
  };

  std::size_t max_level = 0;
  for (std::size_t l : levels) max_level = std::max(max_level, l);
  std::vector<double> up(max_level + 1), lo(max_level + 1);
  up[0] = first_crossing(upper);
  lo[0] = first_crossing(lower);
  for (std::size_t k = 1; k <= max_level; ++k) {
    up[k] = inverse_phi(up[k - 1]);
    lo[k] = inverse_phi(lo[k - 1]);
  }
  std::vector<TransitionWidth> out;
  for (std::size_t l : levels) out.push_back({l, up[l], lo[l]});
  return out;
}

}  // namespace trirg::entanglement
