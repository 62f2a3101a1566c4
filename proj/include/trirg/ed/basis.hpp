#pragma once

// Fixed (N_up, N_down) Fock-space sectors on up to 16 sites.
//
// A configuration is a pair of bit masks; bit i of up_mask is n_{i,up}. The
// fermionic ordering convention used everywhere in the ed module is
//
//   |up, down> = prod_{i in up, ascending} c+_{i,up}  prod_{i in down, ascending} c+_{i,down} |0>
//
// i.e. the whole spin-up string stands to the left of the spin-down string.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trirg/error.hpp"

namespace trirg::ed {

using Mask = std::uint32_t;

inline constexpr std::size_t kMaxSites = 16;

struct Config {
  Mask up = 0;
  Mask down = 0;

  friend constexpr bool operator==(Config, Config) = default;
  friend constexpr auto operator<=>(Config, Config) = default;
};

inline int popcount(Mask m) { return std::popcount(m); }

/// Parity (+1/-1) of the number of set bits of m strictly below bit i.
inline int parity_below(Mask m, std::size_t i) {
  const Mask below = (Mask{1} << i) - 1;
  return (std::popcount(m & below) & 1) ? -1 : 1;
}

/// Parity of set bits strictly between bits i and j (either order).
inline int parity_between(Mask m, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  const Mask between = ((Mask{1} << j) - 1) & ~((Mask{1} << (i + 1)) - 1);
  return (std::popcount(m & between) & 1) ? -1 : 1;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

class SectorBasis {
 public:
  SectorBasis() = default;

  SectorBasis(std::size_t nsites, std::size_t nup, std::size_t ndown) : nsites_(nsites), nup_(nup), ndown_(ndown) {
    if (nsites == 0 || nsites > kMaxSites) {
      throw ValidationError("sector: nsites must be in [1, 16], got " + std::to_string(nsites));
    }
    if (nup > nsites || ndown > nsites) {
      throw ValidationError("sector: electron counts (" + std::to_string(nup) + ", " + std::to_string(ndown) +
                            ") exceed nsites " + std::to_string(nsites));
    }
    up_masks_ = masks_with_popcount(nup);
    down_masks_ = masks_with_popcount(ndown);
    rank_.assign(std::size_t{1} << nsites, -1);
    // rank_ serves both spins; masks of different popcount never collide
    // unless nup == ndown, in which case the ranks coincide anyway.
    for (std::size_t r = 0; r < up_masks_.size(); ++r) rank_[up_masks_[r]] = static_cast<std::int32_t>(r);
    for (std::size_t r = 0; r < down_masks_.size(); ++r) rank_[down_masks_[r]] = static_cast<std::int32_t>(r);

    states_.reserve(up_masks_.size() * down_masks_.size());
    for (Mask u : up_masks_) {
      for (Mask d : down_masks_) states_.push_back({u, d});
    }
  }

  std::size_t nsites() const { return nsites_; }
  std::size_t nup() const { return nup_; }
  std::size_t ndown() const { return ndown_; }
  std::size_t dimension() const { return states_.size(); }
  const std::vector<Config>& states() const { return states_; }
  const Config& operator[](std::size_t i) const { return states_[i]; }

  /// Position of c in the basis, or -1 if c lies outside this sector.
  std::ptrdiff_t lookup(Config c) const {
    if (popcount(c.up) != static_cast<int>(nup_) || popcount(c.down) != static_cast<int>(ndown_)) return -1;
    if ((c.up | c.down) >> nsites_) return -1;
    return static_cast<std::ptrdiff_t>(rank_[c.up]) * static_cast<std::ptrdiff_t>(down_masks_.size()) + rank_[c.down];
  }

 private:
  std::vector<Mask> masks_with_popcount(std::size_t k) const {
    std::vector<Mask> out;
    for (Mask m = 0; m < (Mask{1} << nsites_); ++m) {
      if (static_cast<std::size_t>(std::popcount(m)) == k) out.push_back(m);
    }
    return out;
  }

  std::size_t nsites_ = 0;
  std::size_t nup_ = 0;
  std::size_t ndown_ = 0;
  std::vector<Mask> up_masks_;
  std::vector<Mask> down_masks_;
  std::vector<std::int32_t> rank_;
  std::vector<Config> states_;
};

inline SectorBasis enumerate_sector(std::size_t nsites, std::size_t nup, std::size_t ndown) {
  return SectorBasis(nsites, nup, ndown);
}

}  // namespace trirg::ed
