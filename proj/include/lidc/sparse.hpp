#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lidc {

using FeatureIndex = std::uint32_t;

/// Sparse real vector with strictly ascending indices and no stored zeros.
struct SparseVector {
  std::vector<FeatureIndex> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  double squared_norm() const;
  double dot(std::span<const double> dense) const;
  // dense[i] += scale * x[i]
  void axpy(double scale, std::span<double> dense) const;

  bool operator==(const SparseVector&) const = default;
};

}  // namespace lidc
