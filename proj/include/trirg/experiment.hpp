#pragma once

// Parameter scans over u0: one RG trajectory per grid point, observables
// per level. Grid points are independent and are distributed over a pool of
// worker threads; results are stored by grid index, so the output does not
// depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "trirg/entanglement/distribution.hpp"
#include "trirg/entanglement/observables.hpp"
#include "trirg/error.hpp"
#include "trirg/lattice.hpp"
#include "trirg/rg.hpp"
#include "trirg/scaling.hpp"

namespace trirg::experiment {

enum class Observable { Ebb, Eb7, Eavg, Esingle, Gap };

inline const std::vector<Observable>& all_observables() {
  static const std::vector<Observable> all{Observable::Ebb, Observable::Eb7, Observable::Eavg, Observable::Esingle,
                                           Observable::Gap};
  return all;
}

inline std::string to_string(Observable o) {
  switch (o) {
    case Observable::Ebb: return "E_bb";
    case Observable::Eb7: return "E_b7";
    case Observable::Eavg: return "E_avg";
    case Observable::Esingle: return "E_single";
    case Observable::Gap: return "gap";
  }
  return "?";
}

inline Observable parse_observable(const std::string& s) {
  for (Observable o : all_observables()) {
    if (to_string(o) == s) return o;
  }
  throw ValidationError("unknown observable '" + s + "' (expected E_bb, E_b7, E_avg, E_single or gap)");
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 0) throw ValidationError("grid: count must be positive");
  if (!(hi >= lo)) throw ValidationError("grid: max must not be below min");
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    g[k] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return g;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all threads join.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct ScanSpec {
  std::vector<double> u_grid;
  std::vector<std::size_t> levels{0, 1, 2, 3, 4, 5};
  entanglement::LogBase base = entanglement::LogBase::Two;
  /// Also record the block-size curve at block_total_level.
  bool block_size = false;
  std::size_t block_total_level = 8;
  std::size_t workers = 1;
  rg::RGOptions rg{};
};

struct ScanRow {
  double u0 = 0.0;
  std::size_t level = 0;
  double N = 0.0;
  double E_bb = std::numeric_limits<double>::quiet_NaN();
  double E_b7 = std::numeric_limits<double>::quiet_NaN();
  double E_avg = std::numeric_limits<double>::quiet_NaN();
  double E_single = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";

  bool ok() const { return status == "ok"; }

  double value(Observable o) const {
    switch (o) {
      case Observable::Ebb: return E_bb;
      case Observable::Eb7: return E_b7;
      case Observable::Eavg: return E_avg;
      case Observable::Esingle: return E_single;
      case Observable::Gap: return gap;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

struct BlockSizeRow {
  double u0 = 0.0;
  std::size_t total_level = 0;
  std::size_t block_level = 0;
  double block_size = 1.0;
  double E = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
};

struct ScanResult {
  /// u major, level minor.
  std::vector<ScanRow> rows;
  std::vector<BlockSizeRow> block_rows;
};

/// Observables of one trajectory at one level.
inline ScanRow observe(const rg::RGTrajectory& traj, std::size_t level, entanglement::LogBase base) {
  ScanRow row;
  row.u0 = traj.u0;
  row.level = level;
  row.N = rg::RGTrajectory::system_size(level);
  const auto bb = entanglement::block_block_entanglement(traj, level, base);
  row.E_bb = bb.center;
  row.E_b7 = bb.rim;
  row.E_avg = entanglement::average_entanglement(bb.center, bb.rim);
  row.E_single = entanglement::single_site_entanglement(traj, level, base);
  row.gap = traj.levels[level].gap;
  return row;
}

inline ScanResult run_scan(const ScanSpec& spec, const lattice::BlockGeometry& g) {
  if (spec.u_grid.empty()) throw ValidationError("scan: empty u grid");
  if (spec.levels.empty()) throw ValidationError("scan: no levels requested");
  std::size_t top = 0;
  for (std::size_t l : spec.levels) {
    if (l >= rg::kMaxLevels) throw ValidationError("scan: level " + std::to_string(l) + " exceeds 8");
    top = std::max(top, l);
  }
  if (spec.block_size) {
    if (spec.block_total_level >= rg::kMaxLevels) throw ValidationError("scan: block total level exceeds 8");
    top = std::max(top, spec.block_total_level);
  }
  for (double u : spec.u_grid) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw ValidationError("scan: grid values must be finite and non-negative");
  }

  std::vector<std::size_t> levels = spec.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const std::size_t n = spec.u_grid.size();
  std::vector<std::vector<ScanRow>> per_u(n);
  std::vector<std::vector<BlockSizeRow>> per_u_block(n);

  parallel_for(n, spec.workers, [&](std::size_t i) {
    const double u0 = spec.u_grid[i];
    auto fail_all = [&](const std::string& msg) {
      for (std::size_t l : levels) {
        ScanRow r;
        r.u0 = u0;
        r.level = l;
        r.N = rg::RGTrajectory::system_size(l);
        r.status = msg;
        per_u[i].push_back(r);
      }
      if (spec.block_size) {
        for (std::size_t m = 0; m <= spec.block_total_level; ++m) {
          per_u_block[i].push_back({u0, spec.block_total_level, m, std::pow(7.0, static_cast<double>(m)),
                                    std::numeric_limits<double>::quiet_NaN(), msg});
        }
      }
    };
    rg::RGTrajectory traj;
    try {
      traj = rg::rg_flow(u0, top + 1, g, spec.rg);
    } catch (const std::exception& e) {
      fail_all(std::string("error: ") + e.what());
      return;
    }
    for (std::size_t l : levels) per_u[i].push_back(observe(traj, l, spec.base));
    if (spec.block_size) {
      std::vector<std::size_t> ms(spec.block_total_level + 1);
      for (std::size_t m = 0; m < ms.size(); ++m) ms[m] = m;
      for (const auto& p : entanglement::block_entanglement_vs_size(traj, spec.block_total_level, ms, spec.base)) {
        per_u_block[i].push_back({u0, spec.block_total_level, p.block_level, p.block_size, p.entropy, "ok"});
      }
    }
  });

  ScanResult out;
  for (std::size_t i = 0; i < n; ++i) {
    out.rows.insert(out.rows.end(), per_u[i].begin(), per_u[i].end());
    out.block_rows.insert(out.block_rows.end(), per_u_block[i].begin(), per_u_block[i].end());
  }
  return out;
}

/// One curve per level from scan rows; failed rows are skipped.
inline std::vector<scaling::EntanglementCurve> curves_from_rows(const std::vector<ScanRow>& rows, Observable o) {
  std::vector<scaling::EntanglementCurve> curves;
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    auto it = std::find_if(curves.begin(), curves.end(), [&](const auto& c) { return c.level == r.level; });
    if (it == curves.end()) {
      curves.push_back({to_string(o), r.level, r.N, {}, {}});
      it = std::prev(curves.end());
    }
    it->u.push_back(r.u0);
    it->E.push_back(r.value(o));
  }
  std::sort(curves.begin(), curves.end(), [](const auto& a, const auto& b) { return a.level < b.level; });
  for (auto& c : curves) c.sort_by_u();
  return curves;
}

inline std::vector<scaling::EntanglementCurve> build_curves(const std::vector<double>& u_grid,
                                                            const std::vector<std::size_t>& levels, Observable o,
                                                            const lattice::BlockGeometry& g,
                                                            const rg::RGOptions& opt = {}, std::size_t workers = 1,
                                                            entanglement::LogBase base = entanglement::LogBase::Two) {
  ScanSpec spec;
  spec.u_grid = u_grid;
  spec.levels = levels;
  spec.workers = workers;
  spec.base = base;
  spec.rg = opt;
  spec.rg.compute_gap = o == Observable::Gap;
  return curves_from_rows(run_scan(spec, g).rows, o);
}

/// Charge gap of the top problem per (u, level), in units of the bare t.
inline std::vector<scaling::EntanglementCurve> gap_curves(const std::vector<double>& u_grid,
                                                          const std::vector<std::size_t>& levels,
                                                          const lattice::BlockGeometry& g,
                                                          const rg::RGOptions& opt = {}, std::size_t workers = 1) {
  return build_curves(u_grid, levels, Observable::Gap, g, opt, workers);
}

}  // namespace trirg::experiment
