#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "specspan/linalg.hpp"

namespace specspan {

/// Finite list of d-dimensional vectors stored row-major. Index i of the set
/// is the label every spanner, solution and report refers back to.
class VectorSet {
 public:
  VectorSet() = default;
  explicit VectorSet(std::size_t dim) : dim_(dim) {}
  /// Takes `flat.size() / dim` rows; throws if the size is not a multiple of
  /// dim or an entry is not finite.
  VectorSet(std::size_t dim, std::vector<double> flat);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  VecView operator[](std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
  Vec vector(std::size_t i) const { return Vec((*this)[i].begin(), (*this)[i].end()); }
  std::span<const double> flat() const noexcept { return data_; }

  void push_back(VecView v);
  void reserve(std::size_t n) { data_.reserve(n * dim_); }

  /// Views of the selected rows, in the given order.
  std::vector<VecView> views(std::span<const std::size_t> indices) const;
  std::vector<VecView> views() const;
  VectorSet subset(std::span<const std::size_t> indices) const;

  double max_norm() const noexcept;
  /// Sum of w_i v_i v_i^T over the whole set (weights default to 1).
  SymMat gram_sum(std::span<const double> weights = {}) const;
  /// Rank of the set (Gram-Schmidt with the default drop tolerance).
  std::size_t rank() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace specspan
