#pragma once

// Seven-site hexagonal block of the triangular lattice.
//
// Site coordinates are integer pairs (a1, a2) in the primitive basis
// a1 = (1, 0), a2 = (1/2, sqrt(3)/2). The block is the center site plus its
// six nearest neighbours, listed counterclockwise starting at +a1:
//
//          3   2           0 = ( 0, 0)   1 = ( 1, 0)   2 = ( 0, 1)
//        4   0   1         3 = (-1, 1)   4 = (-1, 0)   5 = ( 0,-1)
//          5   6           6 = ( 1,-1)
//
// Blocks tile the plane on the superlattice spanned by A1 = 2 a1 + a2 and
// its 60 degree rotation A2 = -a1 + 3 a2, so |A|^2 = 7 and lengths grow by
// sqrt(7) per blocking step. The geometry is self-similar: the same description is used
// at every RG level.
//
// Downstream fermionic signs depend on this ordering. Do not reorder.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace trirg::lattice {

struct SiteCoord {
  int a1 = 0;
  int a2 = 0;

  friend constexpr SiteCoord operator+(SiteCoord x, SiteCoord y) { return {x.a1 + y.a1, x.a2 + y.a2}; }
  friend constexpr SiteCoord operator-(SiteCoord x, SiteCoord y) { return {x.a1 - y.a1, x.a2 - y.a2}; }
  friend constexpr SiteCoord operator*(int k, SiteCoord x) { return {k * x.a1, k * x.a2}; }
  friend constexpr bool operator==(SiteCoord, SiteCoord) = default;
  friend constexpr auto operator<=>(SiteCoord, SiteCoord) = default;
};

/// Squared Euclidean length of m a1 + n a2.
constexpr int norm2(SiteCoord x) { return x.a1 * x.a1 + x.a2 * x.a2 + x.a1 * x.a2; }

/// 60 degree counterclockwise rotation: a1 -> a2, a2 -> a2 - a1.
constexpr SiteCoord rotate60(SiteCoord x) { return {-x.a2, x.a1 + x.a2}; }

inline constexpr std::array<SiteCoord, 6> kUnitVectors = {
    SiteCoord{1, 0}, SiteCoord{0, 1}, SiteCoord{-1, 1},
    SiteCoord{-1, 0}, SiteCoord{0, -1}, SiteCoord{1, -1}};

/// Nearest neighbours differ by one of the six unit vectors.
constexpr bool are_neighbors(SiteCoord x, SiteCoord y) {
  const SiteCoord d = x - y;
  return std::find(kUnitVectors.begin(), kUnitVectors.end(), d) != kUnitVectors.end();
}

using SitePair = std::pair<std::size_t, std::size_t>;

struct BlockGeometry {
  std::vector<SiteCoord> sites;
  /// Unordered pairs (i < j) at unit distance inside the block.
  std::vector<SitePair> intra_bonds;
  /// Superlattice vectors to the six adjacent blocks, each the 60 degree
  /// rotation of the previous one.
  std::array<SiteCoord, 6> neighbor_directions{};
  /// For each direction d: (index in this block, index in the block at
  /// offset neighbor_directions[d]) pairs at unit distance.
  std::array<std::vector<SitePair>, 6> boundary_bonds;

  std::size_t size() const { return sites.size(); }
};

inline std::vector<SitePair> enumerate_intra_bonds(const std::vector<SiteCoord>& sites) {
  std::vector<SitePair> bonds;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      if (are_neighbors(sites[i], sites[j])) bonds.emplace_back(i, j);
    }
  }
  return bonds;
}

inline std::vector<SitePair> enumerate_boundary_bonds(const std::vector<SiteCoord>& sites, SiteCoord offset) {
  std::vector<SitePair> bonds;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (are_neighbors(sites[i], sites[j] + offset)) bonds.emplace_back(i, j);
    }
  }
  return bonds;
}

inline BlockGeometry build_block_geometry() {
  BlockGeometry g;
  g.sites.push_back({0, 0});
  for (const SiteCoord& e : kUnitVectors) g.sites.push_back(e);

  g.intra_bonds = enumerate_intra_bonds(g.sites);

  SiteCoord dir{2, 1};
  for (std::size_t d = 0; d < 6; ++d) {
    g.neighbor_directions[d] = dir;
    g.boundary_bonds[d] = enumerate_boundary_bonds(g.sites, dir);
    dir = rotate60(dir);
  }
  return g;
}

/// Site permutation induced by a 60 degree rotation about the center:
/// result[i] is the index of the image of site i.
inline std::vector<std::size_t> rotation_permutation(const BlockGeometry& g) {
  std::vector<std::size_t> perm(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const SiteCoord image = rotate60(g.sites[i]);
    const auto it = std::find(g.sites.begin(), g.sites.end(), image);
    perm[i] = static_cast<std::size_t>(it - g.sites.begin());
  }
  return perm;
}

/// Places copies of the block at m A1 + n A2 and checks that every lattice
/// site in a (2 half_width + 1)^2 window is covered exactly once.
inline bool verify_tiling(const BlockGeometry& g, int half_width = 10) {
  if (g.sites.empty()) return false;
  const SiteCoord A1 = g.neighbor_directions[0];
  const SiteCoord A2 = g.neighbor_directions[1];

  std::map<SiteCoord, int> cover;
  const int reach = half_width + 4;
  for (int m = -reach; m <= reach; ++m) {
    for (int n = -reach; n <= reach; ++n) {
      const SiteCoord origin = m * A1 + n * A2;
      for (const SiteCoord& s : g.sites) ++cover[origin + s];
    }
  }
  for (int x = -half_width; x <= half_width; ++x) {
    for (int y = -half_width; y <= half_width; ++y) {
      const auto it = cover.find(SiteCoord{x, y});
      if (it == cover.end() || it->second != 1) return false;
    }
  }
  return true;
}

inline nlohmann::json geometry_to_json(const BlockGeometry& g) {
  using nlohmann::json;
  json j;
  j["basis"] = {{"a1", {1.0, 0.0}}, {"a2", {0.5, 0.8660254037844386}}};
  json sites = json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    sites.push_back({{"index", i}, {"a1", g.sites[i].a1}, {"a2", g.sites[i].a2}});
  }
  j["sites"] = sites;
  json bonds = json::array();
  for (const auto& [a, b] : g.intra_bonds) bonds.push_back({a, b});
  j["intra_bonds"] = bonds;
  json dirs = json::array();
  for (std::size_t d = 0; d < 6; ++d) {
    json bb = json::array();
    for (const auto& [a, b] : g.boundary_bonds[d]) bb.push_back({a, b});
    dirs.push_back({{"direction", {g.neighbor_directions[d].a1, g.neighbor_directions[d].a2}},
                    {"boundary_bonds", bb}});
  }
  j["neighbors"] = dirs;
  return j;
}

}  // namespace trirg::lattice
