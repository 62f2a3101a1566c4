#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "trirg/scaling.hpp"

using namespace trirg;
using namespace trirg::scaling;

namespace {

constexpr double kUc = 6.0;

double master(double x) { return 1.5 - 0.5 * std::tanh(x); }

/// Curves obeying the ansatz exactly with (u_c, nu, y_E) = (kUc, nu, 0).
std::vector<EntanglementCurve> synthetic(double nu = 1.0, std::size_t points = 301) {
  std::vector<EntanglementCurve> curves;
  for (std::size_t level = 0; level < 3; ++level) {
    EntanglementCurve c;
    c.observable = "E_bb";
    c.level = level;
    c.N = std::pow(7.0, static_cast<double>(level + 1));
    for (std::size_t k = 0; k < points; ++k) {
      const double u = kUc - 0.3 + 0.6 * static_cast<double>(k) / static_cast<double>(points - 1);
      c.u.push_back(u);
      c.E.push_back(master(std::pow(c.N, 1.0 / (2.0 * nu)) * (u - kUc)));
    }
    curves.push_back(c);
  }
  return curves;
}

}  // namespace

TEST(Collapse, ExactDataHasNearZeroResidual) {
  const auto curves = synthetic();
  EXPECT_LT(collapse_residual(curves, {kUc, 1.0, 0.0}), 1e-6);
  EXPECT_GT(collapse_residual(curves, {kUc, 1.3, 0.0}), 100.0 * collapse_residual(curves, {kUc, 1.0, 0.0}));
  EXPECT_GT(collapse_residual(curves, {kUc + 0.05, 1.0, 0.0}), 1e-4);
}

TEST(Collapse, IdenticalCurvesCollapseExactly) {
  auto curves = synthetic();
  curves[1] = curves[0];
  curves.resize(2);
  EXPECT_EQ(collapse_residual(curves, {kUc, 0.8, 0.0}), 0.0);
}

TEST(Collapse, InvariantUnderReordering) {
  const auto curves = synthetic(1.0, 41);
  const CollapseParams p{kUc + 0.01, 0.9, 0.0};
  const double ref = collapse_residual(curves, p);
  auto shuffled = curves;
  std::mt19937_64 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  for (auto& c : shuffled) {
    std::vector<std::size_t> idx(c.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), rng);
    EntanglementCurve d = c;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      d.u[k] = c.u[idx[k]];
      d.E[k] = c.E[idx[k]];
    }
    c = d;
  }
  EXPECT_NEAR(collapse_residual(shuffled, p), ref, 1e-14);
}

TEST(Collapse, RejectsDegenerateInput) {
  auto curves = synthetic(1.0, 21);
  EXPECT_THROW(collapse_residual({curves[0]}, {kUc, 1.0, 0.0}), ValidationError);
  auto short_curve = curves;
  short_curve[1].u.resize(3);
  short_curve[1].E.resize(3);
  EXPECT_THROW(collapse_residual(short_curve, {kUc, 1.0, 0.0}), ValidationError);
  auto apart = curves;
  for (double& u : apart[1].u) u += 10.0;
  apart.resize(2);
  EXPECT_THROW(collapse_residual(apart, {kUc, 1.0, 0.0}), ValidationError);
  EXPECT_THROW(collapse_residual(curves, {kUc, 0.0, 0.0}), ValidationError);
  auto repeated = curves;
  repeated[0].u[1] = repeated[0].u[0];
  EXPECT_THROW(collapse_residual(repeated, {kUc, 1.0, 0.0}), ValidationError);
}

TEST(Collapse, CriticalSampleIsDroppedForNonZeroExponent) {
  // The grid contains u = u_c exactly; with y_E != 0 that sample is skipped.
  const auto curves = synthetic(1.0, 21);
  const double r = collapse_residual(curves, {kUc, 1.0, 0.5});
  EXPECT_TRUE(std::isfinite(r));
  const auto pts = master_curve(curves, {kUc, 1.0, 0.5});
  EXPECT_EQ(pts.size(), 3u * 20u);
  EXPECT_EQ(master_curve(curves, {kUc, 1.0, 0.0}).size(), 3u * 21u);
}

TEST(Fit, RecoversPlantedExponents) {
  const auto fit = fit_collapse(synthetic(), {kUc * 1.03, 1.3, 0.0});
  EXPECT_TRUE(fit.converged);
  EXPECT_LT(std::abs(fit.u_c - kUc) / kUc, 0.005);
  EXPECT_NEAR(fit.nu, 1.0, 0.05);
  EXPECT_EQ(fit.y_E, 0.0);
}

TEST(Fit, RecoversOtherExponent) {
  const auto fit = fit_collapse(synthetic(0.7), {kUc * 0.98, 1.0, 0.0});
  EXPECT_LT(std::abs(fit.u_c - kUc) / kUc, 0.005);
  EXPECT_NEAR(fit.nu, 0.7, 0.05);
}

TEST(Fit, AllParametersFixedIsANoOp) {
  const auto curves = synthetic(1.0, 41);
  const CollapseParams p{kUc + 0.02, 1.2, 0.0};
  const auto fit = fit_collapse(curves, p, {true, true, true});
  EXPECT_EQ(fit.u_c, p.u_c);
  EXPECT_EQ(fit.nu, p.nu);
  EXPECT_EQ(fit.residual, collapse_residual(curves, p));
  EXPECT_TRUE(fit.converged);
}

TEST(Fit, ReportsNonConvergence) {
  NelderMeadOptions opt;
  opt.max_evaluations = 8;
  const auto fit = fit_collapse(synthetic(1.0, 41), {kUc * 1.03, 1.3, 0.0}, {false, false, true}, opt);
  EXPECT_FALSE(fit.converged);
  EXPECT_LE(fit.evaluations, 12u);
}

TEST(NelderMead, Rosenbrock) {
  const auto f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  NelderMeadOptions opt;
  opt.max_evaluations = 5000;
  opt.diameter_tol = 1e-8;
  const auto r = nelder_mead(f, {-1.2, 1.0}, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}
