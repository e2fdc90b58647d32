#include "specspan/vector_set.hpp"

#include <algorithm>
#include <string>

#include "specspan/error.hpp"

namespace specspan {

VectorSet::VectorSet(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0 && !data_.empty()) throw Error(ErrorCode::InvalidArgument, "VectorSet: zero dimension with data");
  if (dim_ != 0 && data_.size() % dim_ != 0)
    throw Error(ErrorCode::DimensionMismatch, "VectorSet: data length is not a multiple of the dimension");
  if (!all_finite(data_)) throw Error(ErrorCode::NotFinite, "VectorSet: non-finite coordinate");
}

void VectorSet::push_back(VecView v) {
  if (v.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch,
                "VectorSet: expected dimension " + std::to_string(dim_) + ", got " + std::to_string(v.size()));
  if (!all_finite(v)) throw Error(ErrorCode::NotFinite, "VectorSet: non-finite coordinate");
  data_.insert(data_.end(), v.begin(), v.end());
}

std::vector<VecView> VectorSet::views(std::span<const std::size_t> indices) const {
  std::vector<VecView> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw Error(ErrorCode::InvalidArgument, "VectorSet: index out of range");
    out.push_back((*this)[i]);
  }
  return out;
}

std::vector<VecView> VectorSet::views() const {
  std::vector<VecView> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i]);
  return out;
}

VectorSet VectorSet::subset(std::span<const std::size_t> indices) const {
  VectorSet out(dim_);
  out.reserve(indices.size());
  for (VecView v : views(indices)) out.data_.insert(out.data_.end(), v.begin(), v.end());
  return out;
}

double VectorSet::max_norm() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, norm((*this)[i]));
  return m;
}

SymMat VectorSet::gram_sum(std::span<const double> weights) const {
  if (!weights.empty() && weights.size() != size())
    throw Error(ErrorCode::DimensionMismatch, "gram_sum: weight count differs from set size");
  SymMat m(dim_);
  for (std::size_t i = 0; i < size(); ++i) m.add_outer((*this)[i], weights.empty() ? 1.0 : weights[i]);
  return m;
}

std::size_t VectorSet::rank() const {
  const auto vs = views();
  return gram_schmidt(std::span<const VecView>(vs)).size();
}

}  // namespace specspan
