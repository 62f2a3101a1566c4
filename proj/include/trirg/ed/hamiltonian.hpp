#pragma once

// Particle-hole-symmetric Hubbard Hamiltonian on a small site set:
//
//   H = - sum_{<ij>,s} t w_ij (c+_{is} c_{js} + h.c.)
//       + U sum_i (1/2 - n_{i,up})(1/2 - n_{i,down})  - (U/4) nsites  + e0 nsites
//
// The -U/4 per site makes the atomic half-filled constants vanish; e0 is an
// energy offset per site carried along by the renormalization and drops out
// of every energy difference at fixed site count.

#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "trirg/ed/basis.hpp"
#include "trirg/ed/sparse.hpp"
#include "trirg/error.hpp"

namespace trirg::ed {

struct HubbardParams {
  double t = 1.0;
  double U = 0.0;
  double e0 = 0.0;

  double u() const { return U / t; }
};

/// Hopping bond; the matrix element is -t * weight.
struct Bond {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 1.0;
};

enum class Spin { Up, Down };

template <typename Pairs>
std::vector<Bond> bonds_from_pairs(const Pairs& pairs, double weight = 1.0) {
  std::vector<Bond> out;
  for (const auto& [i, j] : pairs) out.push_back({i, j, weight});
  return out;
}

inline SparseOperator build_hamiltonian(std::span<const Bond> bonds, const HubbardParams& p, const SectorBasis& basis) {
  const std::size_t n = basis.nsites();
  for (const Bond& b : bonds) {
    if (b.i >= n || b.j >= n || b.i == b.j) {
      throw ValidationError("hamiltonian: bond (" + std::to_string(b.i) + ", " + std::to_string(b.j) +
                            ") invalid for " + std::to_string(n) + " sites");
    }
  }

  std::vector<std::tuple<std::size_t, std::size_t, double>> triplets;
  triplets.reserve(basis.dimension() * (1 + 4 * bonds.size()));
  const double constant = (p.e0 - p.U / 4.0) * static_cast<double>(n);

  for (std::size_t col = 0; col < basis.dimension(); ++col) {
    const Config c = basis[col];

    double diag = constant;
    for (std::size_t s = 0; s < n; ++s) {
      const double nu = (c.up >> s) & 1u;
      const double nd = (c.down >> s) & 1u;
      diag += p.U * (0.5 - nu) * (0.5 - nd);
    }
    triplets.emplace_back(col, col, diag);

    for (const Bond& b : bonds) {
      const double amp = -p.t * b.weight;
      for (const Spin spin : {Spin::Up, Spin::Down}) {
        const Mask m = spin == Spin::Up ? c.up : c.down;
        // c+_a c_b in both directions along the bond.
        for (const auto& [a, bb] : {std::pair{b.i, b.j}, std::pair{b.j, b.i}}) {
          if (!((m >> bb) & 1u) || ((m >> a) & 1u)) continue;
          const Mask moved = m ^ (Mask{1} << a) ^ (Mask{1} << bb);
          const Config target = spin == Spin::Up ? Config{moved, c.down} : Config{c.up, moved};
          const std::ptrdiff_t row = basis.lookup(target);
          triplets.emplace_back(static_cast<std::size_t>(row), col, amp * parity_between(m, a, bb));
        }
      }
    }
  }
  return SparseOperator::from_triplets(basis.dimension(), std::move(triplets));
}

/// c_{site,spin} |c>: returns the sign and target config, or sign 0 if the
/// orbital is empty.
inline std::pair<int, Config> annihilate(Config c, std::size_t site, Spin spin) {
  const Mask bit = Mask{1} << site;
  if (spin == Spin::Up) {
    if (!(c.up & bit)) return {0, c};
    return {parity_below(c.up, site), Config{c.up ^ bit, c.down}};
  }
  if (!(c.down & bit)) return {0, c};
  const int string_sign = (popcount(c.up) & 1) ? -1 : 1;
  return {string_sign * parity_below(c.down, site), Config{c.up, c.down ^ bit}};
}

/// Maps a vector in `from` through c_{site,spin} into `to`.
inline std::vector<double> apply_annihilation(std::span<const double> v, const SectorBasis& from, const SectorBasis& to,
                                              std::size_t site, Spin spin) {
  std::vector<double> out(to.dimension(), 0.0);
  for (std::size_t k = 0; k < from.dimension(); ++k) {
    if (v[k] == 0.0) continue;
    const auto [sign, target] = annihilate(from[k], site, spin);
    if (sign == 0) continue;
    const std::ptrdiff_t r = to.lookup(target);
    if (r < 0) throw ValidationError("annihilation: target sector mismatch");
    out[static_cast<std::size_t>(r)] += sign * v[k];
  }
  return out;
}

/// <bra| c_{site,spin} |ket>, with bra in `bra_basis` and ket in `ket_basis`.
inline double annihilation_element(std::span<const double> bra, const SectorBasis& bra_basis, std::span<const double> ket,
                                   const SectorBasis& ket_basis, std::size_t site, Spin spin) {
  double acc = 0.0;
  for (std::size_t k = 0; k < ket_basis.dimension(); ++k) {
    if (ket[k] == 0.0) continue;
    const auto [sign, target] = annihilate(ket_basis[k], site, spin);
    if (sign == 0) continue;
    const std::ptrdiff_t r = bra_basis.lookup(target);
    if (r >= 0) acc += sign * bra[static_cast<std::size_t>(r)] * ket[k];
  }
  return acc;
}

/// Global spin flip: vector in sector (a, b) -> vector in sector (b, a).
/// Swapping the two strings costs (-1)^(N_up N_down).
inline std::vector<double> spin_flip(std::span<const double> v, const SectorBasis& from, const SectorBasis& to) {
  if (from.nup() != to.ndown() || from.ndown() != to.nup() || from.nsites() != to.nsites()) {
    throw ValidationError("spin_flip: target sector is not the mirror of the source sector");
  }
  const double sign = ((from.nup() * from.ndown()) & 1) ? -1.0 : 1.0;
  std::vector<double> out(to.dimension(), 0.0);
  for (std::size_t k = 0; k < from.dimension(); ++k) {
    const Config c = from[k];
    out[static_cast<std::size_t>(to.lookup({c.down, c.up}))] = sign * v[k];
  }
  return out;
}

/// Signed permutation of the basis induced by relabelling site i -> perm[i]
/// (creation operators reordered back to ascending order).
struct SitePermutation {
  std::vector<std::size_t> target;
  std::vector<double> sign;

  SitePermutation(const SectorBasis& basis, std::span<const std::size_t> perm) {
    target.resize(basis.dimension());
    sign.resize(basis.dimension());
    for (std::size_t k = 0; k < basis.dimension(); ++k) {
      const auto [mu, su] = permute_mask(basis[k].up, perm);
      const auto [md, sd] = permute_mask(basis[k].down, perm);
      target[k] = static_cast<std::size_t>(basis.lookup({mu, md}));
      sign[k] = su * sd;
    }
  }

  void apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t k = 0; k < target.size(); ++k) y[target[k]] = sign[k] * x[k];
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(x.size());
    apply(x, y);
    return y;
  }

  static std::pair<Mask, double> permute_mask(Mask m, std::span<const std::size_t> perm) {
    std::vector<std::size_t> images;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if ((m >> i) & 1u) images.push_back(perm[i]);
    }
    int inversions = 0;
    for (std::size_t a = 0; a < images.size(); ++a) {
      for (std::size_t b = a + 1; b < images.size(); ++b) inversions += images[a] > images[b];
    }
    Mask out = 0;
    for (std::size_t i : images) out |= Mask{1} << i;
    return {out, (inversions & 1) ? -1.0 : 1.0};
  }
};

}  // namespace trirg::ed
