#pragma once

// One-site occupation distributions and their entropies.
//
// In a state of fixed total charge and S_z the one-site reduced density
// matrix is diagonal in {|0>, |up>, |down>, |up down>}, so its spectrum is the
// occupation distribution itself.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trirg/ed/basis.hpp"
#include "trirg/error.hpp"

namespace trirg::entanglement {

/// Index of a one-site state: n_up + 2 n_down.
enum Occupation : std::size_t { kEmpty = 0, kUp = 1, kDown = 2, kDouble = 3 };

struct OccupationDistribution {
  std::array<double, 4> p{1.0, 0.0, 0.0, 0.0};

  double empty() const { return p[kEmpty]; }
  double up() const { return p[kUp]; }
  double down() const { return p[kDown]; }
  double dbl() const { return p[kDouble]; }
  double sum() const { return p[0] + p[1] + p[2] + p[3]; }

  static OccupationDistribution uniform() { return {{0.25, 0.25, 0.25, 0.25}}; }
  static OccupationDistribution point(Occupation o) {
    OccupationDistribution d{{0.0, 0.0, 0.0, 0.0}};
    d.p[o] = 1.0;
    return d;
  }

  /// Average with the spin-flipped distribution (p_up = p_down).
  OccupationDistribution spin_symmetrized() const {
    const double s = 0.5 * (p[kUp] + p[kDown]);
    return {{p[kEmpty], s, s, p[kDouble]}};
  }

  bool is_valid(double tol = 1e-10) const {
    for (double x : p) {
      if (!(x >= -tol && x <= 1.0 + tol)) return false;
    }
    return std::abs(sum() - 1.0) <= tol;
  }

  friend bool operator==(const OccupationDistribution&, const OccupationDistribution&) = default;
};

inline OccupationDistribution site_distribution(std::span<const double> state, const ed::SectorBasis& basis,
                                                std::size_t site) {
  if (site >= basis.nsites()) {
    throw ValidationError("site_distribution: site " + std::to_string(site) + " out of range");
  }
  if (state.size() != basis.dimension()) throw ValidationError("site_distribution: state/basis size mismatch");
  OccupationDistribution d{{0.0, 0.0, 0.0, 0.0}};
  for (std::size_t k = 0; k < basis.dimension(); ++k) {
    const ed::Config c = basis[k];
    const std::size_t idx = ((c.up >> site) & 1u) + 2 * ((c.down >> site) & 1u);
    d.p[idx] += state[k] * state[k];
  }
  return d;
}

/// Equal-weight mixture over an orthonormal multiplet.
inline OccupationDistribution site_distribution(const std::vector<std::vector<double>>& multiplet,
                                                const ed::SectorBasis& basis, std::size_t site) {
  if (multiplet.empty()) throw ValidationError("site_distribution: empty multiplet");
  OccupationDistribution avg{{0.0, 0.0, 0.0, 0.0}};
  for (const auto& v : multiplet) {
    const auto d = site_distribution(v, basis, site);
    for (std::size_t a = 0; a < 4; ++a) avg.p[a] += d.p[a] / static_cast<double>(multiplet.size());
  }
  return avg;
}

enum class LogBase { Two, E };

inline const char* to_string(LogBase b) { return b == LogBase::Two ? "2" : "e"; }

/// -sum p log p with 0 log 0 = 0.
inline double entropy(const OccupationDistribution& d, LogBase base = LogBase::Two) {
  double s = 0.0;
  for (double x : d.p) {
    if (x > 0.0) s -= x * std::log(x);
  }
  return base == LogBase::Two ? s / std::log(2.0) : s;
}

}  // namespace trirg::entanglement
