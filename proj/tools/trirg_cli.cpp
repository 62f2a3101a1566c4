// trirg command-line front end.
//
// Subcommands: fixed-point, scan, collapse, switch-report, geometry-dump.
// Each accepts --config FILE with key=value lines named after its long
// options; options given on the command line take precedence.
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trirg/trirg.hpp"

namespace {

using nlohmann::json;
using namespace trirg;

struct Common {
  std::string scheme = "symmetry-branch";
  double u_cap = 1000.0;
  std::size_t workers = 1;
  std::string base = "2";
};

void add_common(CLI::App* sub, Common& c, bool with_base = true) {
  sub->add_option("--scheme", c.scheme, "Kept up' state: symmetry-branch or ground-multiplet")
      ->check(CLI::IsMember({"symmetry-branch", "ground-multiplet"}))
      ->capture_default_str();
  sub->add_option("--u-cap", c.u_cap, "Largest u solved directly; above it step ratios are frozen")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();
  if (with_base) sub->add_option("--base", c.base, "Entropy base: 2 or e")->check(CLI::IsMember({"2", "e"}))->capture_default_str();
}

/// Fills options of `sub` that were not given on the command line from a
/// key=value file; keys are long option names without the leading dashes.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  for (const auto& [key, value] : io::read_key_values(in)) {
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") throw ValidationError("config file: unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ValidationError("config file: " + key + ": " + e.what());
    }
  }
}

rg::RGOptions rg_options(const Common& c) {
  rg::RGOptions o;
  o.scheme = c.scheme == "ground-multiplet" ? rg::KeptScheme::GroundMultiplet : rg::KeptScheme::SymmetryBranch;
  o.u_cap = c.u_cap;
  return o;
}

entanglement::LogBase log_base(const Common& c) {
  return c.base == "e" ? entanglement::LogBase::E : entanglement::LogBase::Two;
}

std::map<std::string, std::string> common_config(const Common& c) {
  return {{"scheme", c.scheme}, {"u_cap", io::num(c.u_cap)}, {"base", c.base}};
}

void write_json(const json& j, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

// ---------------------------------------------------------------------------

struct FixedPointArgs {
  Common common;
  double u_lo = 5.0;
  double u_hi = 25.0;
  bool json_stdout = false;
  std::string json_out;
};

int run_fixed_point(const FixedPointArgs& a) {
  if (!(a.u_hi > a.u_lo)) throw ValidationError("u-hi must exceed u-lo");
  const auto g = lattice::build_block_geometry();
  const auto opt = rg_options(a.common);
  const double u_star = rg::find_fixed_point(a.u_lo, a.u_hi, g, opt);
  const auto lin = rg::nu_from_linearization(u_star, g, opt);

  auto cfg = common_config(a.common);
  cfg["command"] = "fixed-point";
  cfg["u_lo"] = io::num(a.u_lo);
  cfg["u_hi"] = io::num(a.u_hi);
  const json j = {{"version", io::kVersion},
                  {"config_hash", io::config_hash(cfg)},
                  {"scheme", a.common.scheme},
                  {"bracket", {a.u_lo, a.u_hi}},
                  {"u_star", u_star},
                  {"slope", lin.slope},
                  {"nu", lin.nu}};
  if (a.json_stdout) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("u*       = %.8f\n", u_star);
    std::printf("du'/du   = %.6f\n", lin.slope);
    std::printf("nu       = %.6f\n", lin.nu);
  }
  write_json(j, a.json_out);
  return 0;
}

// ---------------------------------------------------------------------------

struct ScanArgs {
  Common common;
  std::optional<double> u_min;
  std::optional<double> u_max;
  std::size_t u_count = 41;
  std::vector<std::size_t> levels{0, 1, 2, 3, 4, 5};
  bool block_size = true;
  std::size_t block_level = 8;
  std::string out_dir = ".";
};

int run_scan(const ScanArgs& a) {
  const auto g = lattice::build_block_geometry();
  experiment::ScanSpec spec;
  spec.rg = rg_options(a.common);
  spec.levels = a.levels;
  spec.base = log_base(a.common);
  spec.workers = a.common.workers;
  spec.block_size = a.block_size;
  spec.block_total_level = a.block_level;

  double lo = 0.0, hi = 0.0;
  if (a.u_min && a.u_max) {
    lo = *a.u_min;
    hi = *a.u_max;
  } else {
    const double u_star = rg::find_fixed_point(5.0, 25.0, g, spec.rg);
    lo = a.u_min.value_or(0.2 * u_star);
    hi = a.u_max.value_or(1.8 * u_star);
    std::fprintf(stderr, "grid centred on u* = %.6f\n", u_star);
  }
  if (!(lo >= 0.0) || !(hi >= lo)) throw ValidationError("u-min/u-max: need 0 <= u-min <= u-max");
  spec.u_grid = experiment::linear_grid(lo, hi, a.u_count);

  auto cfg = common_config(a.common);
  cfg["command"] = "scan";
  cfg["u_min"] = io::num(lo);
  cfg["u_max"] = io::num(hi);
  cfg["u_count"] = std::to_string(a.u_count);
  cfg["levels"] = join(a.levels);
  cfg["block_size"] = a.block_size ? "1" : "0";
  cfg["block_level"] = std::to_string(a.block_level);
  const io::Header header{"scan", io::config_hash(cfg), a.common.base};

  const auto result = experiment::run_scan(spec, g);

  namespace fs = std::filesystem;
  fs::create_directories(a.out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(a.out_dir) / name);
    if (!out) throw ValidationError("cannot write " + (fs::path(a.out_dir) / name).string());
    return out;
  };
  {
    auto out = open("scan.csv");
    io::write_scan(out, header, result.rows);
  }
  for (auto o : experiment::all_observables()) {
    auto out = open("curves_" + experiment::to_string(o) + ".csv");
    io::write_curves(out, {"curves", header.hash, header.base}, result.rows, o);
  }
  if (a.block_size) {
    auto out = open("block_size.csv");
    io::write_block_size(out, {"block-size", header.hash, header.base}, result.block_rows);
  }
  std::size_t failed = 0;
  for (const auto& r : result.rows) failed += !r.ok();
  std::printf("%zu rows (%zu flagged) written to %s\n", result.rows.size(), failed, a.out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------

struct CollapseArgs {
  std::string curves;
  std::string observable = "E_bb";
  std::optional<double> u_c;
  double nu = 1.0;
  double y_e = 0.0;
  bool fix_u_c = false;
  bool fix_nu = false;
  bool free_y_e = false;
  std::string json_out;
  std::string master_out;
};

int run_collapse(const CollapseArgs& a) {
  if (a.curves.empty()) throw ValidationError("collapse: --curves is required");
  const auto curves = io::read_curves_file(a.curves, a.observable);
  if (curves.size() < 2) throw ValidationError("collapse: need at least 2 curves of " + a.observable);
  double u_c = 0.0;
  if (a.u_c) {
    u_c = *a.u_c;
  } else {
    const auto& c = curves.front();
    u_c = 0.5 * (c.u.front() + c.u.back());
  }
  const scaling::CollapseParams init{u_c, a.nu, a.y_e};
  const auto fit = scaling::fit_collapse(curves, init, {a.fix_u_c, a.fix_nu, !a.free_y_e});

  std::map<std::string, std::string> cfg{{"command", "collapse"},       {"observable", a.observable},
                                         {"u_c", io::num(u_c)},         {"nu", io::num(a.nu)},
                                         {"y_E", io::num(a.y_e)},       {"fix_u_c", a.fix_u_c ? "1" : "0"},
                                         {"fix_nu", a.fix_nu ? "1" : "0"}, {"free_y_E", a.free_y_e ? "1" : "0"}};
  const json j = {{"version", io::kVersion},
                  {"config_hash", io::config_hash(cfg)},
                  {"observable", a.observable},
                  {"curves", curves.size()},
                  {"u_c", fit.u_c},
                  {"nu", fit.nu},
                  {"y_E", fit.y_E},
                  {"residual", fit.residual},
                  {"evaluations", fit.evaluations},
                  {"converged", fit.converged},
                  {"fixed", {{"u_c", fit.fixed_mask[0]}, {"nu", fit.fixed_mask[1]}, {"y_E", fit.fixed_mask[2]}}}};
  std::cout << j.dump(2) << "\n";
  write_json(j, a.json_out);
  if (!a.master_out.empty()) {
    std::ofstream out(a.master_out);
    if (!out) throw ValidationError("cannot write " + a.master_out);
    io::write_master_curve(out, {"master-curve", io::config_hash(cfg), "2"}, curves, {fit.u_c, fit.nu, fit.y_E});
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SwitchArgs {
  Common common;
  std::optional<double> u_off;
  std::optional<double> u_on;
  std::size_t level = 5;
  bool width = true;
  std::string json_out;
};

int run_switch(const SwitchArgs& a) {
  if (a.level >= rg::kMaxLevels) throw ValidationError("level must be at most 8");
  const auto g = lattice::build_block_geometry();
  auto opt = rg_options(a.common);
  opt.compute_gap = false;
  const auto base = log_base(a.common);

  std::optional<double> u_star;
  if (!a.u_off || !a.u_on) u_star = rg::find_fixed_point(5.0, 25.0, g, opt);
  const double u_off = a.u_off.value_or(0.5 * u_star.value_or(0.0));
  const double u_on = a.u_on.value_or(2.0 * u_star.value_or(0.0));
  if (!(u_off >= 0.0) || !(u_on >= 0.0)) throw ValidationError("u values must be non-negative");

  const double e_off = entanglement::block_block_entanglement(rg::rg_flow(u_off, a.level + 1, g, opt), a.level, base).center;
  const double e_on = entanglement::block_block_entanglement(rg::rg_flow(u_on, a.level + 1, g, opt), a.level, base).center;

  json j = {{"version", io::kVersion},
            {"scheme", a.common.scheme},
            {"level", a.level},
            {"N", rg::RGTrajectory::system_size(a.level)},
            {"base", a.common.base},
            {"u_off", u_off},
            {"u_on", u_on},
            {"E_bb_off", e_off},
            {"E_bb_on", e_on},
            {"contrast", std::abs(e_off - e_on)}};
  if (a.width) {
    const auto w = entanglement::transition_widths({a.level}, g, opt).front();
    j["width"] = {{"u_upper", w.u_upper}, {"u_lower", w.u_lower}, {"width", w.width()}};
  }
  auto cfg = common_config(a.common);
  cfg["command"] = "switch-report";
  cfg["u_off"] = io::num(u_off);
  cfg["u_on"] = io::num(u_on);
  cfg["level"] = std::to_string(a.level);
  j["config_hash"] = io::config_hash(cfg);
  std::cout << j.dump(2) << "\n";
  write_json(j, a.json_out);
  return 0;
}

// ---------------------------------------------------------------------------

int run_geometry(const std::string& out) {
  const auto g = lattice::build_block_geometry();
  const auto j = lattice::geometry_to_json(g);
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(j, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement scaling of the half-filled Hubbard model on the triangular lattice via 7-site block RG"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kVersion));

  FixedPointArgs fp;
  auto* fp_cmd = app.add_subcommand("fixed-point", "Locate the unstable fixed point u* and nu from the linearized flow");
  add_common(fp_cmd, fp.common, false);
  fp_cmd->add_option("--u-lo", fp.u_lo, "Lower end of the bisection bracket")->capture_default_str();
  fp_cmd->add_option("--u-hi", fp.u_hi, "Upper end of the bisection bracket")->capture_default_str();
  fp_cmd->add_flag("--json", fp.json_stdout, "Print the report as JSON");
  fp_cmd->add_option("--json-out", fp.json_out, "Also write the JSON report to this file");

  ScanArgs sc;
  auto* sc_cmd = app.add_subcommand("scan", "Scan u0 and levels; write scan, curve and block-size CSV files");
  add_common(sc_cmd, sc.common);
  sc_cmd->add_option("--u-min", sc.u_min, "Grid start (default 0.2 u*)");
  sc_cmd->add_option("--u-max", sc.u_max, "Grid end (default 1.8 u*)");
  sc_cmd->add_option("--u-count", sc.u_count, "Grid points")->check(CLI::PositiveNumber)->capture_default_str();
  sc_cmd->add_option("--levels", sc.levels, "Levels, comma separated")->delimiter(',')->capture_default_str();
  sc_cmd->add_option("--block-size", sc.block_size, "Write the block-size curve (0 or 1)")->capture_default_str();
  sc_cmd->add_option("--block-level", sc.block_level, "Total level of the block-size curve")
      ->check(CLI::Range(0, 8))
      ->capture_default_str();
  sc_cmd->add_option("--out-dir", sc.out_dir, "Output directory")->capture_default_str();

  CollapseArgs co;
  auto* co_cmd = app.add_subcommand("collapse", "Fit a scaling collapse to a curves CSV file");
  co_cmd->add_option("--curves", co.curves, "Curves CSV (observable,u,N,E); required");
  co_cmd->add_option("--observable", co.observable, "Observable to fit")->capture_default_str();
  co_cmd->add_option("--u-c", co.u_c, "Initial u_c (default: centre of the u range)");
  co_cmd->add_option("--nu", co.nu, "Initial nu")->check(CLI::PositiveNumber)->capture_default_str();
  co_cmd->add_option("--y-e", co.y_e, "Initial y_E")->capture_default_str();
  co_cmd->add_flag("--fix-u-c", co.fix_u_c, "Hold u_c fixed");
  co_cmd->add_flag("--fix-nu", co.fix_nu, "Hold nu fixed");
  co_cmd->add_flag("--free-y-e", co.free_y_e, "Fit y_E too (samples with |u - u_c| < 1e-8 are dropped)");
  co_cmd->add_option("--json-out", co.json_out, "Write the fit report to this file");
  co_cmd->add_option("--master-out", co.master_out, "Write the scaled (x, y) points to this CSV file");

  SwitchArgs sw;
  auto* sw_cmd = app.add_subcommand("switch-report", "E_bb on both sides of u* and the transition width");
  add_common(sw_cmd, sw.common);
  sw_cmd->add_option("--u-off", sw.u_off, "Coupling on the metallic side (default 0.5 u*)");
  sw_cmd->add_option("--u-on", sw.u_on, "Coupling on the insulating side (default 2 u*)");
  sw_cmd->add_option("--level", sw.level, "RG level of the top problem")->check(CLI::Range(0, 8))->capture_default_str();
  sw_cmd->add_option("--width", sw.width, "Compute the 1.75 -> 1.25 bit transition width (0 or 1)")->capture_default_str();
  sw_cmd->add_option("--json-out", sw.json_out, "Also write the report to this file");

  std::string config_path;
  for (auto* sub : {fp_cmd, sc_cmd, co_cmd, sw_cmd}) {
    sub->add_option("--config", config_path, "key=value file; command-line options take precedence");
  }

  std::string geometry_out;
  auto* geo_cmd = app.add_subcommand("geometry-dump", "Print the block geometry as JSON");
  geo_cmd->add_option("--out", geometry_out, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    for (auto* sub : {fp_cmd, sc_cmd, co_cmd, sw_cmd}) {
      if (*sub && !config_path.empty()) apply_config_file(sub, config_path);
    }
    if (*fp_cmd) return run_fixed_point(fp);
    if (*sc_cmd) return run_scan(sc);
    if (*co_cmd) return run_collapse(co);
    if (*sw_cmd) return run_switch(sw);
    if (*geo_cmd) return run_geometry(geometry_out);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
