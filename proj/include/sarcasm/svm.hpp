#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sarcasm/corpus.hpp"
#include "sarcasm/vector.hpp"

namespace sarcasm {

struct SvmConfig {
  double C = 10.0;
  double gamma = 1.0;          // RBF width; see scale_gamma() for the data-driven default
  double tol = 1e-3;           // KKT tolerance
  std::uint32_t max_passes = 10;
  std::uint64_t seed = 0;
  std::uint32_t cache_rows = 512;  // LRU kernel-row cache capacity
  std::uint64_t max_iterations = 0;  // full scans before giving up; 0 = 10000 + 100 n

  void validate() const;
};

/// Rows are feature vectors; y holds +1 (sarcastic) or -1.
struct LabeledMatrix {
  std::vector<Vector> X;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dim() const noexcept { return X.empty() ? 0 : X.front().dim(); }
  /// n >= 2, both classes, consistent dims, finite entries, labels in {+1, -1}.
  void validate() const;
};

int label_sign(Label label) noexcept;

struct SvmModel {
  std::vector<Vector> support_vectors;
  std::vector<double> alphas;                  // each in (0, C]
  std::vector<int> labels;                     // +1 / -1
  std::vector<std::size_t> support_indices;    // rows of the training matrix
  double bias = 0.0;
  SvmConfig config;
  std::size_t dim = 0;

  std::size_t support_count() const noexcept { return alphas.size(); }
};

struct SmoStats {
  std::uint64_t scans = 0;    // full passes over the training set
  std::uint64_t updates = 0;  // successful two-variable steps
  bool converged = false;
};

/// Called after every successful pair update with the full alpha vector and bias.
using SmoObserver = std::function<void(std::span<const double> alphas, double bias)>;

double rbf_kernel(const Vector& x, const Vector& z, double gamma);

/// 1 / (d * v) where v is the mean per-feature variance; 1.0 when v is zero.
double scale_gamma(const LabeledMatrix& data);

SvmModel train_svm(const LabeledMatrix& data, const SvmConfig& cfg,
                   const SmoObserver& observer = {}, SmoStats* stats = nullptr);

double decision_value(const SvmModel& m, const Vector& x);
/// Exact zero maps to NonSarcastic.
Label label_from_decision(double decision) noexcept;
Label predict(const SvmModel& m, const Vector& x);

/// Alpha vector over all n training rows (zeros for non-support rows).
std::vector<double> full_alphas(const SvmModel& m, std::size_t n);

/// sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
double dual_objective(std::span<const double> alphas, const LabeledMatrix& data, double gamma);
double dual_objective(const SvmModel& m, const LabeledMatrix& data);

/// Largest KKT residual over the training rows: alpha = 0 needs y f >= 1,
/// 0 < alpha < C needs y f = 1, alpha = C needs y f <= 1.
double kkt_violation(const SvmModel& m, const LabeledMatrix& data);

std::string encode_model(const SvmModel& m);
SvmModel decode_model(std::string_view bytes);
void save_model(const SvmModel& m, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace sarcasm
