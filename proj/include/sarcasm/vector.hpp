#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sarcasm {

struct SparseEntry {
  std::uint32_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Real feature vector stored densely or as (index, value) pairs with
/// strictly increasing indices below dim().
class Vector {
 public:
  Vector() = default;

  static Vector dense(std::vector<double> values);
  static Vector zeros(std::size_t dim);
  /// Throws Error(InvalidArgument) unless indices are strictly increasing and < dim.
  static Vector sparse(std::size_t dim, std::vector<SparseEntry> entries);

  bool is_sparse() const noexcept { return sparse_; }
  std::size_t dim() const noexcept { return dim_; }

  /// Dense storage; empty for sparse vectors.
  std::span<const double> values() const noexcept { return values_; }
  /// Sparse storage; empty for dense vectors.
  std::span<const SparseEntry> entries() const noexcept { return entries_; }

  double at(std::size_t i) const;
  std::vector<double> to_dense() const;
  Vector densified() const { return dense(to_dense()); }
  bool all_finite() const noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  bool sparse_ = false;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<SparseEntry> entries_;
};

/// Both throw Error(InvalidArgument) on dimension mismatch.
double dot(const Vector& a, const Vector& b);
double squared_distance(const Vector& a, const Vector& b);

}  // namespace sarcasm
