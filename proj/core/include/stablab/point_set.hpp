#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "stablab/error.hpp"

namespace stablab {

/// A flat, row-major collection of points in R^N.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) { detail::require(dim >= 1, "PointSet: dimension must be >= 1"); }
  PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    detail::require(dim >= 1, "PointSet: dimension must be >= 1");
    detail::require(coords_.size() % dim == 0, "PointSet: coordinate count is not a multiple of the dimension");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> p) {
    detail::require(p.size() == dim_, "PointSet: point dimension mismatch");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& coords() const noexcept { return coords_; }

  bool is_lex_sorted() const {
    for (std::size_t i = 1; i < size(); ++i) {
      auto a = (*this)[i - 1];
      auto b = (*this)[i];
      if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) return false;
    }
    return true;
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Sorted lexicographically with exact duplicates removed.
PointSet sorted_unique(const PointSet& points);

}  // namespace stablab
