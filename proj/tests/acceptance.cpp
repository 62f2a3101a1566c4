// Acceptance checks. Usage: trirg_acceptance <criterion 1-10 | all>
// Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "trirg/trirg.hpp"

using namespace trirg;

namespace {

// Tolerances and thresholds.
constexpr double kDimerTol = 1e-10;
constexpr double kTightBindingTol = 1e-9;
constexpr double kAtomicTol = 1e-6;
constexpr double kSymmetryTol = 1e-9;
constexpr double kOffDiagonalTol = 1e-12;
constexpr double kTargetUStar = 12.5;
constexpr double kTargetUStarRel = 0.25;
constexpr double kMetalPlateau = 1.9;
constexpr double kInsulatorPlateau = 1.1;
constexpr double kRimBelow = 0.3;
constexpr double kCriticalSpread = 0.05;
constexpr double kRatioLo = 0.25;
constexpr double kRatioHi = 0.55;
constexpr double kUcRel = 0.005;
constexpr double kNuAbs = 0.05;
constexpr double kNuLo = 0.8;
constexpr double kNuHi = 1.2;
constexpr double kSaturation = 0.02;
constexpr double kScanSeconds = 600.0;

const lattice::BlockGeometry& geometry() {
  static const auto g = lattice::build_block_geometry();
  return g;
}

std::vector<ed::Bond> block_bonds() { return ed::bonds_from_pairs(geometry().intra_bonds); }

rg::RGOptions no_gap() {
  rg::RGOptions o;
  o.compute_gap = false;
  return o;
}

double u_star() {
  static const double u = rg::find_fixed_point(5.0, 25.0, geometry());
  return u;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Report {
  bool pass = true;
  std::ostringstream notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes << "\n    " << (ok ? "ok   " : "FAIL ") << what;
  }
  void info(const std::string& what) { notes << "\n    info " << what; }
};

double sector_energy(const std::vector<ed::Bond>& bonds, ed::HubbardParams p, std::size_t n, std::size_t nup,
                     std::size_t ndown) {
  return ed::lowest_multiplet(ed::build_hamiltonian(bonds, p, ed::SectorBasis(n, nup, ndown))).energy;
}

// ---------------------------------------------------------------------------

Report criterion1() {
  Report r;
  std::mt19937_64 rng(20040301);
  std::uniform_real_distribution<double> t_dist(0.1, 3.0), u_dist(0.0, 20.0);
  const std::vector<ed::Bond> dimer{{0, 1, 1.0}};
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double t = t_dist(rng), U = u_dist(rng);
    // The closed form omits the constant -(U/4) per site.
    const double e = sector_energy(dimer, {t, U, 0.0}, 2, 1, 1) + 0.5 * U;
    worst = std::max(worst, std::abs(e + std::sqrt(U * U / 4.0 + 4.0 * t * t)));
  }
  r.check(worst <= kDimerTol, "dimer vs -sqrt(U^2/4 + 4t^2) + K, 20 random (t, U): max dev " + fmt("%.2e", worst));

  const auto levels = oracle::one_particle_levels(7, geometry().intra_bonds);
  worst = 0.0;
  for (auto [nup, ndown] : {std::pair{4, 3}, std::pair{3, 3}, std::pair{4, 4}}) {
    worst = std::max(worst, std::abs(sector_energy(block_bonds(), {1.0, 0.0, 0.0}, 7, nup, ndown) -
                                     oracle::filled_energy(levels, nup, ndown)));
  }
  r.check(worst <= kTightBindingTol, "7-site U = 0 vs tight-binding filling: max dev " + fmt("%.2e", worst));

  const ed::HubbardParams atomic{1e-9, 1.0, 0.0};
  worst = std::abs(sector_energy(block_bonds(), atomic, 7, 4, 3) + 3.5);
  worst = std::max(worst, std::abs(sector_energy(block_bonds(), atomic, 7, 3, 3) + 3.0));
  worst = std::max(worst, std::abs(sector_energy(block_bonds(), atomic, 7, 4, 4) + 3.0));
  worst = std::max(worst, std::abs(ed::charge_gap(block_bonds(), {1e-9, 2.0, 0.0}, 7) - 2.0));
  worst = std::max(worst, std::abs(ed::charge_gap(std::vector<ed::Bond>{}, {1.0, 3.0, 0.0}, 1) - 3.0));
  r.check(worst <= kAtomicTol, "atomic limits (-3.5, -3, -3, gaps 2 and 3): max dev " + fmt("%.2e", worst));
  return r;
}

Report criterion2() {
  Report r;
  const auto grid = experiment::linear_grid(0.5, 14.0, 10);
  double ph_energy = 0.0, ph_hopping = 0.0, ph_signed = 0.0, spin = 0.0, relabel = 0.0;
  std::mt19937_64 rng(17);
  for (double u : grid) {
    const ed::HubbardParams p{1.0, u, 0.0};
    const double e6 = sector_energy(block_bonds(), p, 7, 3, 3);
    const double e8 = sector_energy(block_bonds(), p, 7, 4, 4);
    ph_energy = std::max(ph_energy, std::abs(e6 - e8));
    ph_signed = std::max(ph_signed, std::abs(e6 - sector_energy(block_bonds(), {-1.0, u, 0.0}, 7, 4, 4)));

    const auto step = rg::renormalize(rg::compute_kept_states(geometry(), p, no_gap()), geometry(), no_gap());
    ph_hopping = std::max(ph_hopping, std::abs(step.t_next - step.t_hole));

    spin = std::max(spin, std::abs(sector_energy(block_bonds(), p, 7, 4, 3) - sector_energy(block_bonds(), p, 7, 3, 4)));

    std::vector<std::size_t> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ed::Bond> relabeled;
    for (const auto& b : block_bonds()) relabeled.push_back({perm[b.i], perm[b.j], b.weight});
    relabel = std::max(relabel, std::abs(sector_energy(relabeled, p, 7, 4, 3) - sector_energy(block_bonds(), p, 7, 4, 3)));
  }
  r.check(ph_energy <= kSymmetryTol, "particle-hole E6 = E8: max dev " + fmt("%.4g", ph_energy));
  r.check(ph_hopping <= kSymmetryTol, "electron-channel t' = hole-channel t': max dev " + fmt("%.4g", ph_hopping));
  r.check(spin <= kSymmetryTol, "spin flip E(4,3) = E(3,4): max dev " + fmt("%.2e", spin));
  r.check(relabel <= kSymmetryTol, "site relabeling: max dev " + fmt("%.2e", relabel));
  r.info("particle-hole with t -> -t, E6(t) = E8(-t): max dev " + fmt("%.2e", ph_signed) +
         " (the block graph is not bipartite)");
  return r;
}

Report criterion3() {
  Report r;
  double worst = 0.0;
  auto scan_state = [&](const std::vector<double>& v, const ed::SectorBasis& basis) {
    std::map<oracle::Word, double> psi;
    for (std::size_t k = 0; k < basis.dimension(); ++k) psi[basis[k].up | (basis[k].down << basis.nsites())] = v[k];
    for (std::size_t s = 0; s < basis.nsites(); ++s) {
      const auto rho = oracle::site_rdm(basis.nsites(), s, psi);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          if (a != b) worst = std::max(worst, std::abs(rho(a, b)));
        }
      }
    }
  };
  const ed::SectorBasis dimer_basis(2, 1, 1);
  for (double U : {0.0, 4.0, 50.0}) {
    const auto m = ed::lowest_multiplet(ed::build_hamiltonian(std::vector<ed::Bond>{{0, 1, 1.0}}, {1.0, U, 0.0}, dimer_basis));
    for (const auto& v : m.vectors) scan_state(v, dimer_basis);
  }
  for (double u : {0.0, 5.0, 12.0}) {
    const auto kept = rg::compute_kept_states(geometry(), {1.0, u, 0.0}, no_gap());
    for (std::size_t k = 0; k < 4; ++k) {
      for (const auto& v : kept[k].vectors()) scan_state(v, kept[k].basis);
    }
  }
  r.check(worst < kOffDiagonalTol, "max off-diagonal |rho_ab| over dimer and block kept states: " + fmt("%.2e", worst));
  return r;
}

Report criterion4() {
  Report r;
  auto sign_changes = [](const rg::RGOptions& opt, double step, std::vector<double>& brackets) {
    double prev_u = step / 2.0;
    double prev = rg::renormalized_u(prev_u, geometry(), opt) - prev_u;
    for (double u = prev_u + step; u < 40.0; u += step) {
      const double f = rg::renormalized_u(u, geometry(), opt) - u;
      if ((f < 0.0) != (prev < 0.0)) {
        brackets.push_back(prev_u);
        brackets.push_back(u);
      }
      prev = f;
      prev_u = u;
    }
  };
  std::vector<double> br;
  sign_changes(no_gap(), 0.5, br);
  const std::size_t crossings = br.size() / 2;
  r.check(crossings == 1, "sign changes of u' - u on (0, 40): " + std::to_string(crossings));
  if (crossings >= 1) {
    const double u = rg::find_fixed_point(br[0], br[1], geometry(), no_gap());
    const auto lin = rg::nu_from_linearization(u, geometry(), no_gap());
    r.check(lin.slope > 1.0, "unstable: du'/du = " + fmt("%.6f", lin.slope));
    const double rel = std::abs(u - kTargetUStar) / kTargetUStar;
    r.check(rel <= kTargetUStarRel, "u* = " + fmt("%.8f", u) + ", relative deviation from 12.5: " + fmt("%.3f", rel));
  }

  rg::RGOptions alt = no_gap();
  alt.scheme = rg::KeptScheme::GroundMultiplet;
  std::vector<double> br_alt;
  sign_changes(alt, 1.0, br_alt);
  std::string found;
  for (std::size_t k = 0; k + 1 < br_alt.size(); k += 2) {
    found += " " + fmt("%.6f", rg::find_fixed_point(br_alt[k], br_alt[k + 1], geometry(), alt));
  }
  r.info("ground-multiplet truncation: " + std::to_string(br_alt.size() / 2) + " crossing(s) at u =" + found);
  return r;
}

Report criterion5() {
  Report r;
  const double us = u_star();
  experiment::ScanSpec spec;
  for (double f : {0.1, 0.25, 0.4, 0.5}) spec.u_grid.push_back(f * us);
  for (double f : {2.0, 3.0, 4.0}) spec.u_grid.push_back(f * us);
  spec.levels = {4, 5};
  spec.rg = no_gap();
  const auto res = experiment::run_scan(spec, geometry());
  double metal_min = 10.0, ins_max = 0.0, rim_lo = 10.0, rim_hi = -10.0;
  for (const auto& row : res.rows) {
    if (!row.ok()) {
      r.check(false, "scan row failed at u = " + fmt("%.4g", row.u0) + ": " + row.status);
      continue;
    }
    if (row.u0 <= 0.5 * us + 1e-12) {
      metal_min = std::min(metal_min, row.E_bb);
    } else {
      ins_max = std::max(ins_max, row.E_bb);
    }
    rim_lo = std::min(rim_lo, row.E_b7 - (row.E_bb - kRimBelow));
    rim_hi = std::max(rim_hi, row.E_b7 - row.E_bb);
  }
  r.check(metal_min >= kMetalPlateau, "metal plateau (u <= 0.5 u*, levels 4-5): min E_bb = " + fmt("%.6f", metal_min));
  r.check(ins_max <= kInsulatorPlateau, "insulator plateau (u >= 2 u*, levels 4-5): max E_bb = " + fmt("%.6f", ins_max));
  r.check(rim_lo >= 0.0 && rim_hi <= 0.0, "E_b7 in [E_bb - 0.3, E_bb]: max E_b7 - E_bb = " + fmt("%.6f", rim_hi));
  return r;
}

Report criterion6() {
  Report r;
  const auto traj = rg::rg_flow(u_star(), 6, geometry(), no_gap());
  double lo = 10.0, hi = -10.0;
  for (std::size_t k = 1; k <= 5; ++k) {
    const double e = entanglement::block_block_entanglement(traj, k).center;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  r.check(hi - lo < kCriticalSpread, "spread of E_bb(u*) over levels 1-5: " + fmt("%.3e", hi - lo) + " (E_bb = " +
                                         fmt("%.6f", lo) + ")");
  return r;
}

Report criterion7() {
  Report r;
  const auto widths = entanglement::transition_widths({1, 2, 3, 4, 5}, geometry(), no_gap());
  std::string list;
  bool decreasing = true;
  for (std::size_t k = 0; k < widths.size(); ++k) {
    list += " " + fmt("%.4e", widths[k].width());
    if (k > 0 && !(widths[k].width() < widths[k - 1].width())) decreasing = false;
  }
  r.check(decreasing, "w(level), levels 1-5, strictly decreasing:" + list);
  std::string ratios;
  bool in_range = true;
  for (std::size_t k = 1; k + 1 < widths.size(); ++k) {
    const double q = widths[k + 1].width() / widths[k].width();
    ratios += " " + fmt("%.4f", q);
    in_range = in_range && q >= kRatioLo && q <= kRatioHi;
  }
  r.check(in_range, "w(l+1)/w(l) for l = 2..4 in [0.25, 0.55]:" + ratios);
  return r;
}

Report criterion8() {
  Report r;
  std::vector<scaling::EntanglementCurve> synthetic;
  const double uc = 6.0;
  for (std::size_t level = 0; level < 3; ++level) {
    scaling::EntanglementCurve c{"E_bb", level, std::pow(7.0, static_cast<double>(level + 1)), {}, {}};
    for (int k = 0; k <= 300; ++k) {
      const double u = uc - 0.3 + 0.6 * k / 300.0;
      c.u.push_back(u);
      c.E.push_back(1.5 - 0.5 * std::tanh(std::sqrt(c.N) * (u - uc)));
    }
    synthetic.push_back(c);
  }
  const auto fit = scaling::fit_collapse(synthetic, {uc * 1.03, 1.3, 0.0});
  r.check(std::abs(fit.u_c - uc) / uc <= kUcRel && std::abs(fit.nu - 1.0) <= kNuAbs,
          "synthetic (u_c, nu) = (6, 1) recovered as (" + fmt("%.6f", fit.u_c) + ", " + fmt("%.6f", fit.nu) + ")");

  const double us = u_star();
  const auto curves = experiment::build_curves(experiment::linear_grid(0.2 * us, 1.8 * us, 41), {0, 1, 2, 3, 4, 5},
                                               experiment::Observable::Ebb, geometry());
  const auto real = scaling::fit_collapse(curves, {us, 1.0, 0.0});
  r.check(real.nu >= kNuLo && real.nu <= kNuHi, "E_bb levels 0-5, y_E = 0: nu = " + fmt("%.4f", real.nu) +
                                                    ", u_c = " + fmt("%.4f", real.u_c) + ", residual " +
                                                    fmt("%.3e", real.residual));
  const std::vector<scaling::EntanglementCurve> upper(curves.begin() + 1, curves.end());
  const auto alt = scaling::fit_collapse(upper, {us, 1.0, 0.0});
  r.info("same fit on levels 1-5: nu = " + fmt("%.4f", alt.nu) + ", u_c = " + fmt("%.4f", alt.u_c));
  r.info("flow linearization nu = " + fmt("%.4f", rg::nu_from_linearization(us, geometry(), no_gap()).nu));
  return r;
}

Report criterion9() {
  Report r;
  const double us = u_star();
  for (double u : {0.5 * us, 2.0 * us}) {
    const auto traj = rg::rg_flow(u, 6, geometry(), no_gap());
    std::vector<double> e;
    for (std::size_t k = 0; k < 6; ++k) e.push_back(entanglement::single_site_entanglement(traj, k));
    std::vector<double> d;
    std::string list;
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
      d.push_back(std::abs(e[k + 1] - e[k]));
      list += " " + fmt("%.2e", d.back());
    }
    bool decreasing = true, small = true;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (k > 0 && !(d[k] < d[k - 1])) decreasing = false;
      if (k >= 2 && !(d[k] < kSaturation)) small = false;
    }
    r.check(decreasing && small, "u = " + fmt("%.4f", u) + ": |dE_single| (nats), k = 0..4:" + list);
  }
  return r;
}

Report criterion10() {
  Report r;
  const double us = u_star();
  experiment::ScanSpec spec;
  spec.u_grid = experiment::linear_grid(0.2 * us, 1.8 * us, 41);
  spec.block_size = true;
  spec.block_total_level = 8;
  auto render = [&](std::size_t workers, double& seconds) {
    spec.workers = workers;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = experiment::run_scan(spec, geometry());
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream os;
    io::write_scan(os, {"scan", "fnv1a64:0", "2"}, res.rows);
    for (auto o : experiment::all_observables()) io::write_curves(os, {"curves", "fnv1a64:0", "2"}, res.rows, o);
    io::write_block_size(os, {"block_size", "fnv1a64:0", "2"}, res.block_rows);
    std::size_t failed = 0;
    for (const auto& row : res.rows) failed += row.ok() ? 0 : 1;
    return std::pair{os.str(), failed};
  };
  double s1 = 0.0, s8 = 0.0;
  const auto [a, failed] = render(1, s1);
  const auto [b, failed8] = render(8, s8);
  (void)failed8;
  r.check(s1 < kScanSeconds, "41 x 6 scan, all observables plus block sizes, 1 worker: " + fmt("%.1f", s1) + " s");
  r.info("same scan with 8 workers: " + fmt("%.1f", s8) + " s on " +
         std::to_string(std::max(1u, std::thread::hardware_concurrency())) + " hardware thread(s)");
  r.check(a == b, "output byte-identical for 1 and 8 workers (" + std::to_string(a.size()) + " bytes)");
  r.check(failed == 0, "rows flagged: " + std::to_string(failed));
  return r;
}

const std::vector<std::pair<std::string, std::function<Report()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Report()>>> all{
      {"ED oracle equivalence", criterion1},
      {"symmetry suite", criterion2},
      {"superselection exactness", criterion3},
      {"unique unstable fixed point", criterion4},
      {"entanglement plateaus", criterion5},
      {"size independence at u*", criterion6},
      {"step sharpening", criterion7},
      {"collapse recovery", criterion8},
      {"single-site saturation", criterion9},
      {"determinism and performance", criterion10},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  bool all_pass = true;
  bool ran = false;
  for (std::size_t k = 0; k < criteria().size(); ++k) {
    if (which != "all" && which != std::to_string(k + 1)) continue;
    ran = true;
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    try {
      rep = criteria()[k].second();
    } catch (const std::exception& e) {
      rep.check(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s) [%.1f s]%s\n", rep.pass ? "PASS" : "FAIL", k + 1, criteria()[k].first.c_str(),
                s, rep.notes.str().c_str());
    std::fflush(stdout);
    all_pass = all_pass && rep.pass;
  }
  if (!ran) {
    std::fprintf(stderr, "usage: %s <1-10 | all>\n", argv[0]);
    return 2;
  }
  return all_pass ? 0 : 1;
}
