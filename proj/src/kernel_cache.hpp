#pragma once

#include <list>
#include <memory>
#include <unordered_map>
#include <vector>

#include "sarcasm/svm.hpp"

namespace sarcasm {

// Least-recently-used cache of RBF Gram-matrix rows. Rows are handed out as
// shared pointers so eviction never invalidates a row still in use.
class KernelCache {
 public:
  using Row = std::shared_ptr<const std::vector<double>>;

  KernelCache(const LabeledMatrix& data, double gamma, std::size_t capacity)
      : data_(data), gamma_(gamma), capacity_(capacity < 2 ? 2 : capacity) {}

  Row row(std::size_t i) {
    if (const auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      ++hits_;
      return it->second->second;
    }
    ++misses_;
    auto values = std::make_shared<std::vector<double>>(data_.size());
    for (std::size_t k = 0; k < data_.size(); ++k)
      (*values)[k] = k == i ? 1.0 : rbf_kernel(data_.X[i], data_.X[k], gamma_);
    if (lru_.size() >= capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    lru_.emplace_front(i, values);
    index_[i] = lru_.begin();
    return values;
  }

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  const LabeledMatrix& data_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, Row>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, Row>>::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace sarcasm
