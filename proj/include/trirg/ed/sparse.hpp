#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

namespace trirg::ed {

/// Real square matrix in compressed row storage. Immutable once built.
class SparseOperator {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  SparseOperator() = default;

  /// Builds from (row, col, value) triplets; duplicates are summed and
  /// exact zeros dropped.
  static SparseOperator from_triplets(std::size_t dim, std::vector<std::tuple<std::size_t, std::size_t, double>> t) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    SparseOperator op;
    op.dim_ = dim;
    op.row_start_.assign(dim + 1, 0);
    std::size_t k = 0;
    for (std::size_t r = 0; r < dim; ++r) {
      op.row_start_[r] = op.entries_.size();
      while (k < t.size() && std::get<0>(t[k]) == r) {
        const std::size_t c = std::get<1>(t[k]);
        double v = 0.0;
        while (k < t.size() && std::get<0>(t[k]) == r && std::get<1>(t[k]) == c) v += std::get<2>(t[k++]);
        if (v != 0.0) op.entries_.push_back({c, v});
      }
    }
    op.row_start_[dim] = op.entries_.size();
    return op;
  }

  std::size_t dimension() const { return dim_; }
  std::size_t nonzeros() const { return entries_.size(); }

  std::span<const Entry> row(std::size_t r) const {
    return {entries_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }

  /// y = A x
  void apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < dim_; ++r) {
      double acc = 0.0;
      for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) acc += entries_[k].value * x[entries_[k].col];
      y[r] = acc;
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(dim_);
    apply(x, y);
    return y;
  }

  double at(std::size_t r, std::size_t c) const {
    for (const Entry& e : row(r)) {
      if (e.col == c) return e.value;
    }
    return 0.0;
  }

  /// Gershgorin bound on the spectral radius.
  double norm_bound() const {
    double best = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
      double s = 0.0;
      for (const Entry& e : row(r)) s += std::abs(e.value);
      best = std::max(best, s);
    }
    return best;
  }

  bool is_symmetric(double tol = 1e-12) const {
    for (std::size_t r = 0; r < dim_; ++r) {
      for (const Entry& e : row(r)) {
        if (std::abs(at(e.col, r) - e.value) > tol) return false;
      }
    }
    return true;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_start_{0};
  std::vector<Entry> entries_;
};

}  // namespace trirg::ed
