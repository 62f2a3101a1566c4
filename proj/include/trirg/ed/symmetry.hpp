#pragma once

// Rotation symmetry of a block whose sites are permuted by a 60 degree
// rotation R. The projector onto the real two-dimensional irrep with
// C2 = R^3 = +1 and C3 = R^2 != 1 (C6 eigenvalues exp(+-2 pi i / 3)) is
//
//   P = (1 + C2)/2 * (1 - (1 + C3 + C3^2)/3).

#include <cstddef>
#include <span>
#include <vector>

#include "trirg/ed/basis.hpp"
#include "trirg/ed/eigensolver.hpp"
#include "trirg/ed/hamiltonian.hpp"
#include "trirg/error.hpp"

namespace trirg::ed {

class RotationIrrepProjector {
 public:
  RotationIrrepProjector(const SectorBasis& basis, std::span<const std::size_t> rotation) : rot_(basis, rotation) {
    std::vector<std::size_t> p(rotation.begin(), rotation.end());
    std::vector<std::size_t> q = p;
    for (int k = 1; k < 6; ++k) {
      for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[q[i]];
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] != i) throw ValidationError("rotation projector: permutation is not of order dividing 6");
    }
  }

  void operator()(std::span<double> v) const {
    const std::size_t n = v.size();
    std::vector<double> r1(n), r2(n), r3(n), r4(n);
    // w = (1 + C2)/2 v
    rot_.apply(v, r1);
    rot_.apply(r1, r2);
    rot_.apply(r2, r3);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = 0.5 * (v[k] + r3[k]);
    // v = w - (w + C3 w + C3^2 w)/3
    rot_.apply(w, r1);
    rot_.apply(r1, r2);
    rot_.apply(r2, r3);
    rot_.apply(r3, r4);
    for (std::size_t k = 0; k < n; ++k) v[k] = w[k] - (w[k] + r2[k] + r4[k]) / 3.0;
  }

  Projector as_projector() const {
    return [this](std::span<double> v) { (*this)(v); };
  }

  /// Character tr(V^T R V) of the rotation on an orthonormal set.
  double rotation_character(const std::vector<std::vector<double>>& vectors) const {
    double chi = 0.0;
    for (const auto& v : vectors) chi += detail::dot(v, rot_.apply(v));
    return chi;
  }

 private:
  SitePermutation rot_;
};

}  // namespace trirg::ed
