#include "sarcasm/vector.hpp"

#include <cmath>
#include <string>

#include "sarcasm/error.hpp"

namespace sarcasm {
namespace {

void check_dims(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorKind::InvalidArgument, "dimension mismatch: " + std::to_string(a.dim()) +
                                                " vs " + std::to_string(b.dim()));
}

double sparse_dense_dot(std::span<const SparseEntry> s, std::span<const double> d) {
  double acc = 0.0;
  for (const auto& e : s) acc += e.value * d[e.index];
  return acc;
}

}  // namespace

Vector Vector::dense(std::vector<double> values) {
  Vector v;
  v.dim_ = values.size();
  v.values_ = std::move(values);
  return v;
}

Vector Vector::zeros(std::size_t dim) { return dense(std::vector<double>(dim, 0.0)); }

Vector Vector::sparse(std::size_t dim, std::vector<SparseEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].index >= dim)
      throw Error(ErrorKind::InvalidArgument, "sparse index out of range");
    if (i > 0 && entries[i].index <= entries[i - 1].index)
      throw Error(ErrorKind::InvalidArgument, "sparse indices must be strictly increasing");
  }
  Vector v;
  v.sparse_ = true;
  v.dim_ = dim;
  v.entries_ = std::move(entries);
  return v;
}

double Vector::at(std::size_t i) const {
  if (i >= dim_) throw Error(ErrorKind::InvalidArgument, "vector index out of range");
  if (!sparse_) return values_[i];
  for (const auto& e : entries_) {
    if (e.index == i) return e.value;
    if (e.index > i) break;
  }
  return 0.0;
}

std::vector<double> Vector::to_dense() const {
  if (!sparse_) return values_;
  std::vector<double> out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

bool Vector::all_finite() const noexcept {
  for (double x : values_)
    if (!std::isfinite(x)) return false;
  for (const auto& e : entries_)
    if (!std::isfinite(e.value)) return false;
  return true;
}

double dot(const Vector& a, const Vector& b) {
  check_dims(a, b);
  if (!a.is_sparse() && !b.is_sparse()) {
    const auto x = a.values();
    const auto y = b.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
  }
  if (a.is_sparse() && !b.is_sparse()) return sparse_dense_dot(a.entries(), b.values());
  if (!a.is_sparse() && b.is_sparse()) return sparse_dense_dot(b.entries(), a.values());
  const auto x = a.entries();
  const auto y = b.entries();
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].index < y[j].index) {
      ++i;
    } else if (y[j].index < x[i].index) {
      ++j;
    } else {
      acc += x[i++].value * y[j++].value;
    }
  }
  return acc;
}

double squared_distance(const Vector& a, const Vector& b) {
  check_dims(a, b);
  double acc = 0.0;
  if (!a.is_sparse() && !b.is_sparse()) {
    const auto x = a.values();
    const auto y = b.values();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - y[i];
      acc += d * d;
    }
    return acc;
  }
  if (a.is_sparse() != b.is_sparse()) {
    const Vector& s = a.is_sparse() ? a : b;
    const auto d = (a.is_sparse() ? b : a).values();
    auto it = s.entries().begin();
    const auto end = s.entries().end();
    for (std::size_t i = 0; i < d.size(); ++i) {
      double diff = d[i];
      if (it != end && it->index == i) diff -= (it++)->value;
      acc += diff * diff;
    }
    return acc;
  }
  // sparse-sparse merge; both operand orders visit entries identically so
  // the result is exactly symmetric.
  const auto x = a.entries();
  const auto y = b.entries();
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    double diff;
    if (j == y.size() || (i < x.size() && x[i].index < y[j].index)) {
      diff = x[i++].value;
    } else if (i == x.size() || y[j].index < x[i].index) {
      diff = y[j++].value;
    } else {
      diff = x[i++].value - y[j++].value;
    }
    acc += diff * diff;
  }
  return acc;
}

}  // namespace sarcasm
