#pragma once

// Finite-size scaling collapse under the ansatz
//
//   E(u, N) = q^{y_E} f(N^{1/(2 nu)} q),   q = u - u_c.
//
// Collapse quality is a leave-one-out measure: every point of one curve is
// compared with the piecewise-linear interpolants of all other curves that
// cover its scaled abscissa, and the mean squared deviation is divided by
// the variance of the scaled data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "trirg/error.hpp"

namespace trirg::scaling {

/// Samples of one observable at one system size N. Samples may be given in
/// any order; the collapse sorts them by u.
struct EntanglementCurve {
  std::string observable;
  std::size_t level = 0;
  double N = 0.0;
  std::vector<double> u;
  std::vector<double> E;

  std::size_t size() const { return u.size(); }

  void validate() const {
    if (u.size() != E.size()) throw ValidationError("curve " + observable + ": u and E lengths differ");
    if (!(N > 0.0)) throw ValidationError("curve " + observable + ": N must be positive");
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (!std::isfinite(u[k]) || !std::isfinite(E[k])) throw ValidationError("curve " + observable + ": non-finite sample");
    }
  }

  /// Orders samples by u; fails on repeated u values.
  void sort_by_u() {
    std::vector<std::size_t> idx(u.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    std::vector<double> u2, E2;
    for (std::size_t k : idx) {
      u2.push_back(u[k]);
      E2.push_back(E[k]);
    }
    for (std::size_t k = 1; k < u2.size(); ++k) {
      if (!(u2[k] > u2[k - 1])) throw ValidationError("curve " + observable + ": repeated u value");
    }
    u = std::move(u2);
    E = std::move(E2);
  }
};

struct CollapseParams {
  double u_c = 0.0;
  double nu = 1.0;
  double y_E = 0.0;
};

namespace detail {

struct Scaled {
  std::vector<double> x;
  std::vector<double> y;
};

inline Scaled transform(EntanglementCurve c, const CollapseParams& p) {
  c.sort_by_u();
  Scaled s;
  const double stretch = std::pow(c.N, 1.0 / (2.0 * p.nu));
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double q = c.u[k] - p.u_c;
    double y = c.E[k];
    if (p.y_E != 0.0) {
      // q = 0 is singular for y_E != 0; such samples are dropped.
      if (std::abs(q) < 1e-8) continue;
      y /= std::pow(std::abs(q), p.y_E);
    }
    s.x.push_back(q * stretch);
    s.y.push_back(y);
  }
  return s;
}

/// Piecewise-linear interpolation on increasing x; false outside the range.
inline bool interpolate(const Scaled& s, double x, double& y) {
  if (s.x.size() < 2 || x < s.x.front() || x > s.x.back()) return false;
  auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
  if (it == s.x.end()) {
    y = s.y.back();
    return true;
  }
  const auto hi = static_cast<std::size_t>(it - s.x.begin());
  const std::size_t lo = hi - 1;
  const double f = (x - s.x[lo]) / (s.x[hi] - s.x[lo]);
  y = s.y[lo] + f * (s.y[hi] - s.y[lo]);
  return true;
}

}  // namespace detail

inline double collapse_residual(const std::vector<EntanglementCurve>& curves, const CollapseParams& p) {
  if (curves.size() < 2) throw ValidationError("collapse_residual: need at least 2 curves");
  for (const auto& c : curves) {
    c.validate();
    if (c.size() < 4) throw ValidationError("collapse_residual: need at least 4 points per curve");
  }
  if (!(p.nu > 0.0)) throw ValidationError("collapse_residual: nu must be positive");

  std::vector<detail::Scaled> scaled;
  for (const auto& c : curves) scaled.push_back(detail::transform(c, p));

  double sum = 0.0, sum2 = 0.0;
  std::size_t all = 0;
  for (const auto& s : scaled) {
    for (double y : s.y) {
      sum += y;
      sum2 += y * y;
      ++all;
    }
  }
  const double mean = sum / static_cast<double>(all);
  const double variance = std::max(sum2 / static_cast<double>(all) - mean * mean, 0.0);

  double dev = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    for (std::size_t k = 0; k < scaled[i].x.size(); ++k) {
      double master = 0.0;
      std::size_t covering = 0;
      for (std::size_t j = 0; j < scaled.size(); ++j) {
        double y = 0.0;
        if (j != i && detail::interpolate(scaled[j], scaled[i].x[k], y)) {
          master += y;
          ++covering;
        }
      }
      if (covering == 0) continue;
      const double d = scaled[i].y[k] - master / static_cast<double>(covering);
      dev += d * d;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("collapse_residual: scaled curves do not overlap");
  const double msd = dev / static_cast<double>(count);
  if (variance == 0.0) return msd == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return msd / variance;
}

// ---------------------------------------------------------------------------
// Nelder-Mead

struct NelderMeadOptions {
  double diameter_tol = 1e-5;
  double spread_tol = 1e-10;
  std::size_t max_evaluations = 2000;
  double initial_step = 0.05;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Minimizes f from x0 with the simplex x0, x0 + step_i e_i, where step_i is
/// initial_step * x0_i (initial_step itself when x0_i = 0).
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0, const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  NelderMeadResult res;
  if (n == 0) {
    res.x = x0;
    res.value = f(x0);
    res.evaluations = 1;
    res.converged = true;
    return res;
  }
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += x0[i] != 0.0 ? opt.initial_step * x0[i] : opt.initial_step;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const auto& best = pts[order.front()];
    double diameter = 0.0;
    for (const auto& p : pts) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(p[i] - best[i]));
      diameter = std::max(diameter, d);
    }
    const double spread = vals[order.back()] - vals[order.front()];
    if (diameter < opt.diameter_tol && spread < opt.spread_tol) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= opt.max_evaluations) break;

    const std::size_t worst = order.back();
    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[order[k]][i] / static_cast<double>(n);
    }
    auto along = [&](double s) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + s * (pts[worst][i] - centroid[i]);
      return p;
    };

    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < vals[order.front()]) {
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[order[n - 1]]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    const auto b = pts[order.front()];
    for (std::size_t k = 1; k <= n; ++k) {
      auto& p = pts[order[k]];
      for (std::size_t i = 0; i < n; ++i) p[i] = b[i] + 0.5 * (p[i] - b[i]);
      vals[order[k]] = eval(p);
    }
  }
  const std::size_t ibest = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[ibest];
  res.value = vals[ibest];
  return res;
}

// ---------------------------------------------------------------------------
// Fit

struct CollapseFit {
  double u_c = 0.0;
  double nu = 1.0;
  double y_E = 0.0;
  double residual = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  /// Held fixed: (u_c, nu, y_E).
  std::array<bool, 3> fixed_mask{false, false, true};
};

inline CollapseFit fit_collapse(const std::vector<EntanglementCurve>& curves, const CollapseParams& init,
                                std::array<bool, 3> fixed_mask = {false, false, true},
                                const NelderMeadOptions& opt = {}) {
  if (!(init.nu > 0.0)) throw ValidationError("fit_collapse: initial nu must be positive");
  const double r0 = collapse_residual(curves, init);
  if (!std::isfinite(r0)) throw ValidationError("fit_collapse: residual not finite at the initial point");

  const std::array<double, 3> start{init.u_c, init.nu, init.y_E};
  std::vector<std::size_t> free;
  std::vector<double> x0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!fixed_mask[i]) {
      free.push_back(i);
      x0.push_back(start[i]);
    }
  }
  auto unpack = [&](const std::vector<double>& x) {
    std::array<double, 3> v = start;
    for (std::size_t k = 0; k < free.size(); ++k) v[free[k]] = x[k];
    return CollapseParams{v[0], v[1], v[2]};
  };
  auto objective = [&](const std::vector<double>& x) {
    const CollapseParams p = unpack(x);
    if (!(p.nu > 0.0)) return std::numeric_limits<double>::infinity();
    try {
      return collapse_residual(curves, p);
    } catch (const ValidationError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  CollapseFit fit;
  fit.fixed_mask = fixed_mask;
  if (free.empty()) {
    fit.u_c = init.u_c;
    fit.nu = init.nu;
    fit.y_E = init.y_E;
    fit.residual = r0;
    fit.evaluations = 1;
    fit.converged = true;
    return fit;
  }
  const auto r = nelder_mead(objective, x0, opt);
  const CollapseParams best = unpack(r.x);
  fit.u_c = best.u_c;
  fit.nu = best.nu;
  fit.y_E = best.y_E;
  fit.residual = r.value;
  fit.evaluations = r.evaluations + 1;
  fit.converged = r.converged;
  return fit;
}

/// Scaled master-curve points for plotting.
struct MasterPoint {
  std::size_t curve = 0;
  double N = 0.0;
  double x = 0.0;
  double y = 0.0;
};

inline std::vector<MasterPoint> master_curve(const std::vector<EntanglementCurve>& curves, const CollapseParams& p) {
  std::vector<MasterPoint> out;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto s = detail::transform(curves[i], p);
    for (std::size_t k = 0; k < s.x.size(); ++k) out.push_back({i, curves[i].N, s.x[k], s.y[k]});
  }
  return out;
}

}  // namespace trirg::scaling
