#pragma once

// Lowest eigenpairs of a real symmetric SparseOperator.
//
// Two paths: a dense Eigen decomposition for small dimensions and a
// restarted Lanczos iteration with full reorthogonalization above. The
// Lanczos variant keeps the lowest Ritz vectors across restarts (thick
// restart) and works with an optional projector onto an invariant subspace,
// so a symmetry sector can be targeted directly. Degenerate multiplets are
// resolved by deflation: after convergence the eigenvector is locked and the
// iteration restarted in its orthogonal complement until the next level sits
// above the degeneracy tolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trirg/ed/basis.hpp"
#include "trirg/ed/sparse.hpp"
#include "trirg/error.hpp"

namespace trirg::ed {

enum class SolverKind { Auto, Dense, Lanczos };

struct SolverOptions {
  SolverKind kind = SolverKind::Auto;
  std::size_t dense_threshold = 512;
  double energy_tol = 1e-11;
  /// Residual |H v - E v| relative to the Gershgorin norm bound.
  double residual_tol = 1e-10;
  double degeneracy_tol = 1e-8;
  std::size_t krylov_dim = 48;
  std::size_t keep = 6;
  std::size_t max_matvecs = 40000;
  std::uint64_t seed = 20040301;
};

/// In-place orthogonal projection onto a subspace that commutes with H.
using Projector = std::function<void(std::span<double>)>;

struct EigenPair {
  double energy = 0.0;
  std::vector<double> vector;
  bool degenerate = false;
};

struct Multiplet {
  double energy = 0.0;
  std::vector<std::vector<double>> vectors;
  /// Distance to the next distinct level in the searched subspace
  /// (infinity if the subspace is exhausted).
  double gap_above = std::numeric_limits<double>::infinity();
  std::size_t matvecs = 0;

  std::size_t size() const { return vectors.size(); }
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Two passes of classical Gram-Schmidt against each set.
inline void orthogonalize(std::span<double> v, const std::vector<std::vector<double>>& a,
                          const std::vector<std::vector<double>>& b) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : a) axpy(-dot(q, v), q, v);
    for (const auto& q : b) axpy(-dot(q, v), q, v);
  }
}

struct LanczosResult {
  bool found = false;
  double energy = 0.0;
  std::vector<double> vector;
  std::size_t matvecs = 0;
};

inline LanczosResult lanczos_lowest(const SparseOperator& op, const std::vector<std::vector<double>>& locked,
                                    const Projector* projector, const SolverOptions& opt, std::mt19937_64& rng) {
  const std::size_t n = op.dimension();
  const double scale = std::max(op.norm_bound(), 1e-300);
  const std::size_t max_basis = std::min(opt.krylov_dim, n);
  LanczosResult res;

  std::vector<double> start(n);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double start_norm = 0.0;
  for (int attempt = 0; attempt < 4 && start_norm < 1e-8; ++attempt) {
    for (double& x : start) x = dist(rng);
    if (projector) (*projector)(start);
    orthogonalize(start, locked, {});
    start_norm = norm(start);
  }
  if (start_norm < 1e-8) return res;  // subspace exhausted
  for (double& x : start) x /= start_norm;

  std::vector<std::vector<double>> V{start};
  std::vector<std::vector<double>> W{op.apply(start)};
  res.matvecs = 1;
  // Projected matrix V^T H V, grown by one row and column per step.
  Eigen::MatrixXd T(1, 1);
  T(0, 0) = dot(V[0], W[0]);

  double last_theta = std::numeric_limits<double>::infinity();
  while (true) {
    const std::size_t m = V.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
    const double theta = small.eigenvalues()(0);
    const Eigen::VectorXd s = small.eigenvectors().col(0);

    std::vector<double> y(n, 0.0), r(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      axpy(s(static_cast<Eigen::Index>(i)), V[i], y);
      axpy(s(static_cast<Eigen::Index>(i)), W[i], r);
    }
    axpy(-theta, y, r);
    const double rnorm = norm(r);

    const bool converged = rnorm <= opt.residual_tol * scale && std::abs(theta - last_theta) < opt.energy_tol;
    last_theta = theta;

    // Expansion direction: the Krylov continuation of the newest vector,
    // or after a restart the residual (parallel to it in exact arithmetic).
    std::vector<double> next;
    if (!converged) {
      if (m == max_basis) {
        const std::size_t keep = std::min(opt.keep, m - 1);
        const Eigen::MatrixXd S = small.eigenvectors().leftCols(static_cast<Eigen::Index>(keep));
        std::vector<std::vector<double>> V2(keep, std::vector<double>(n, 0.0)), W2 = V2;
        for (std::size_t k = 0; k < keep; ++k) {
          for (std::size_t i = 0; i < m; ++i) {
            const double c = S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            axpy(c, V[i], V2[k]);
            axpy(c, W[i], W2[k]);
          }
        }
        V = std::move(V2);
        W = std::move(W2);
        T = (S.transpose() * T * S).eval();
        next = r;
      } else {
        next = W.back();
      }
      if (projector) (*projector)(next);
      orthogonalize(next, locked, V);
    }
    const double next_norm = converged ? 0.0 : norm(next);

    if (converged || next_norm < 1e-12 * scale) {
      // Converged, or the Krylov space is invariant and the Ritz pair exact.
      if (!converged && rnorm > 1e3 * opt.residual_tol * scale) {
        throw NumericalError("lanczos: breakdown with residual " + std::to_string(rnorm));
      }
      const double ynorm = norm(y);
      for (double& x : y) x /= ynorm;
      res.found = true;
      res.energy = theta;
      res.vector = std::move(y);
      return res;
    }
    if (res.matvecs >= opt.max_matvecs) {
      throw NumericalError("lanczos: no convergence after " + std::to_string(res.matvecs) +
                           " matrix-vector products (residual " + std::to_string(rnorm) + ")");
    }
    for (double& x : next) x /= next_norm;
    std::vector<double> w = op.apply(next);
    ++res.matvecs;
    const auto k = static_cast<Eigen::Index>(V.size());
    T.conservativeResize(k + 1, k + 1);
    for (Eigen::Index i = 0; i < k; ++i) T(i, k) = T(k, i) = dot(V[static_cast<std::size_t>(i)], w);
    T(k, k) = dot(next, w);
    V.push_back(std::move(next));
    W.push_back(std::move(w));
  }
}

inline Multiplet dense_multiplet(const SparseOperator& op, const Projector* projector, const SolverOptions& opt) {
  const auto n = static_cast<Eigen::Index>(op.dimension());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (const auto& e : op.row(static_cast<std::size_t>(r))) H(r, static_cast<Eigen::Index>(e.col)) = e.value;
  }
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd& w = es.eigenvalues();

  Multiplet out;
  bool have = false;
  Eigen::Index k = 0;
  while (k < n) {
    Eigen::Index end = k + 1;
    while (end < n && w(end) - w(k) < opt.degeneracy_tol) ++end;
    Eigen::MatrixXd cluster = es.eigenvectors().middleCols(k, end - k);
    if (projector) {
      for (Eigen::Index c = 0; c < cluster.cols(); ++c) {
        std::span<double> col(cluster.col(c).data(), static_cast<std::size_t>(n));
        (*projector)(col);
      }
    }
    // Orthonormal basis of the (projected) cluster.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cluster, Eigen::ComputeThinU);
    std::vector<std::vector<double>> vecs;
    for (Eigen::Index c = 0; c < svd.singularValues().size(); ++c) {
      if (svd.singularValues()(c) < 1e-6) continue;
      Eigen::VectorXd u = svd.matrixU().col(c);
      vecs.emplace_back(u.data(), u.data() + n);
    }
    if (!vecs.empty()) {
      if (!have) {
        out.energy = w(k);
        out.vectors = std::move(vecs);
        have = true;
      } else {
        out.gap_above = w(k) - out.energy;
        break;
      }
    }
    k = end;
  }
  if (!have) throw NumericalError("dense solver: projector annihilates the whole space");
  return out;
}

}  // namespace detail

inline bool use_dense(const SparseOperator& op, const SolverOptions& opt) {
  if (opt.kind == SolverKind::Dense) return true;
  if (opt.kind == SolverKind::Lanczos) return false;
  return op.dimension() <= opt.dense_threshold;
}

/// Lowest (possibly degenerate) eigenspace of `op`, restricted to the range
/// of `projector` when one is given.
inline Multiplet lowest_multiplet(const SparseOperator& op, const SolverOptions& opt = {},
                                  const Projector* projector = nullptr) {
  if (op.dimension() == 0) throw ValidationError("eigensolver: empty operator");
  if (use_dense(op, opt)) return detail::dense_multiplet(op, projector, opt);

  std::mt19937_64 rng(opt.seed);
  Multiplet out;
  std::vector<std::vector<double>> locked;
  auto first = detail::lanczos_lowest(op, locked, projector, opt, rng);
  if (!first.found) throw NumericalError("lanczos: projector annihilates the start vector");
  out.energy = first.energy;
  out.matvecs += first.matvecs;
  locked.push_back(std::move(first.vector));

  while (true) {
    auto next = detail::lanczos_lowest(op, locked, projector, opt, rng);
    out.matvecs += next.matvecs;
    if (!next.found) break;
    if (next.energy - out.energy < opt.degeneracy_tol) {
      locked.push_back(std::move(next.vector));
    } else {
      out.gap_above = next.energy - out.energy;
      break;
    }
  }
  out.vectors = std::move(locked);
  return out;
}

/// Ground state of a sector; the degeneracy flag is set when the lowest
/// level is (numerically) degenerate, in which case the first vector of the
/// multiplet is returned.
inline EigenPair ground_state(const SparseOperator& op, const SectorBasis& basis, const SolverOptions& opt = {}) {
  if (op.dimension() != basis.dimension()) throw ValidationError("ground_state: operator/basis dimension mismatch");
  if (!op.is_symmetric(1e-12)) throw ValidationError("ground_state: operator is not symmetric");
  Multiplet m = lowest_multiplet(op, opt);
  return {m.energy, std::move(m.vectors.front()), m.size() > 1};
}

}  // namespace trirg::ed
