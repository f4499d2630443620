#include "sarcasm/svm.hpp"

#include <algorithm>
#include <cmath>

#include "kernel_cache.hpp"
#include "sarcasm/error.hpp"
#include "sarcasm/rng.hpp"

namespace sarcasm {
namespace {

class SmoSolver {
 public:
  SmoSolver(const LabeledMatrix& data, const SvmConfig& cfg, const SmoObserver& observer)
      : data_(data), cfg_(cfg), observer_(observer), cache_(data, cfg.gamma, cfg.cache_rows),
        rng_(cfg.seed), alpha_(data.size(), 0.0), error_(data.size()) {
    // f = 0 initially, so E_k = -y_k.
    for (std::size_t k = 0; k < data.size(); ++k) error_[k] = -static_cast<double>(data.y[k]);
  }

  void run(SmoStats& stats) {
    const std::size_t n = data_.size();
    const std::uint64_t max_scans = cfg_.max_iterations ? cfg_.max_iterations : 10000 + 100 * n;
    std::uint32_t quiet_passes = 0;
    while (quiet_passes < cfg_.max_passes && stats.scans < max_scans) {
      std::size_t changed = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (violates(i) && examine(i)) ++changed;
      ++stats.scans;
      stats.updates += changed;
      quiet_passes = changed == 0 ? quiet_passes + 1 : 0;
    }
    stats.converged = quiet_passes >= cfg_.max_passes;
  }

  const std::vector<double>& alphas() const noexcept { return alpha_; }
  double bias() const noexcept { return bias_; }

 private:
  bool violates(std::size_t i) const {
    const double r = data_.y[i] * error_[i];
    return (r < -cfg_.tol && alpha_[i] < cfg_.C) || (r > cfg_.tol && alpha_[i] > 0.0);
  }

  // Second index: a seeded uniform draw first, then the remaining rows from a
  // random offset until one of them makes progress.
  bool examine(std::size_t i) {
    const std::size_t n = data_.size();
    std::size_t j = rng_.uniform_index(n - 1);
    if (j >= i) ++j;
    if (take_step(i, j)) return true;
    const std::size_t offset = rng_.uniform_index(n);
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t k = (offset + s) % n;
      if (k == i || k == j) continue;
      if (take_step(i, k)) return true;
    }
    return false;
  }

  bool take_step(std::size_t i, std::size_t j) {
    const double C = cfg_.C;
    const double yi = data_.y[i];
    const double yj = data_.y[j];
    const double ai = alpha_[i];
    const double aj = alpha_[j];
    const double ei = error_[i];
    const double ej = error_[j];

    double lo, hi;
    if (yi != yj) {
      lo = std::max(0.0, aj - ai);
      hi = std::min(C, C + aj - ai);
    } else {
      lo = std::max(0.0, ai + aj - C);
      hi = std::min(C, ai + aj);
    }
    if (!(hi > lo)) return false;

    const auto row_i = cache_.row(i);
    const auto row_j = cache_.row(j);
    const double kij = (*row_i)[j];
    const double eta = 2.0 * kij - 2.0;  // K_ii = K_jj = 1 for RBF
    if (!(eta < 0.0)) return false;

    double aj_new = std::clamp(aj - yj * (ei - ej) / eta, lo, hi);
    if (std::abs(aj_new - aj) < 1e-12 * (1.0 + C)) return false;
    double ai_new = std::clamp(ai + yi * yj * (aj - aj_new), 0.0, C);

    const double dai = ai_new - ai;
    const double daj = aj_new - aj;
    const double b1 = bias_ - ei - yi * dai - yj * daj * kij;
    const double b2 = bias_ - ej - yi * dai * kij - yj * daj;
    double b_new;
    if (ai_new > 0.0 && ai_new < C) {
      b_new = b1;
    } else if (aj_new > 0.0 && aj_new < C) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - bias_;

    alpha_[i] = ai_new;
    alpha_[j] = aj_new;
    bias_ = b_new;
    for (std::size_t k = 0; k < data_.size(); ++k)
      error_[k] += yi * dai * (*row_i)[k] + yj * daj * (*row_j)[k] + db;

    if (observer_) observer_(alpha_, bias_);
    return true;
  }

  const LabeledMatrix& data_;
  const SvmConfig& cfg_;
  const SmoObserver& observer_;
  KernelCache cache_;
  Rng rng_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double bias_ = 0.0;
};

double model_output(const SvmModel& m, const Vector& x) {
  double f = m.bias;
  for (std::size_t s = 0; s < m.support_count(); ++s)
    f += m.alphas[s] * m.labels[s] * rbf_kernel(m.support_vectors[s], x, m.config.gamma);
  return f;
}

}  // namespace

void SvmConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorKind::Config, "svm: C must be > 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorKind::Config, "svm: gamma must be > 0");
  if (!(tol > 0.0)) throw Error(ErrorKind::Config, "svm: tol must be > 0");
  if (max_passes == 0) throw Error(ErrorKind::Config, "svm: max_passes must be > 0");
}

void LabeledMatrix::validate() const {
  if (X.size() != y.size())
    throw Error(ErrorKind::InvalidArgument, "svm: row count and label count differ");
  if (y.size() < 2) throw Error(ErrorKind::InvalidArgument, "svm: need at least 2 rows");
  bool pos = false, neg = false;
  for (int label : y) {
    if (label == 1) {
      pos = true;
    } else if (label == -1) {
      neg = true;
    } else {
      throw Error(ErrorKind::InvalidArgument, "svm: labels must be +1 or -1");
    }
  }
  if (!pos || !neg)
    throw Error(ErrorKind::InvalidArgument, "svm: training data contains a single class");
  const std::size_t d = dim();
  for (const auto& row : X) {
    if (row.dim() != d) throw Error(ErrorKind::InvalidArgument, "svm: inconsistent row dims");
    if (!row.all_finite()) throw Error(ErrorKind::InvalidArgument, "svm: non-finite feature");
  }
}

int label_sign(Label label) noexcept { return label == Label::Sarcastic ? 1 : -1; }

double rbf_kernel(const Vector& x, const Vector& z, double gamma) {
  return std::exp(-gamma * squared_distance(x, z));
}

double scale_gamma(const LabeledMatrix& data) {
  const std::size_t d = data.dim();
  const std::size_t n = data.size();
  if (d == 0 || n == 0) return 1.0;
  std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
  for (const auto& row : data.X) {
    if (row.is_sparse()) {
      for (const auto& e : row.entries()) {
        sum[e.index] += e.value;
        sumsq[e.index] += e.value * e.value;
      }
    } else {
      const auto v = row.values();
      for (std::size_t k = 0; k < d; ++k) {
        sum[k] += v[k];
        sumsq[k] += v[k] * v[k];
      }
    }
  }
  double mean_var = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < d; ++k) {
    const double mean = sum[k] / nn;
    mean_var += std::max(0.0, sumsq[k] / nn - mean * mean);
  }
  mean_var /= static_cast<double>(d);
  if (!(mean_var > 0.0) || !std::isfinite(mean_var)) return 1.0;
  return 1.0 / (static_cast<double>(d) * mean_var);
}

SvmModel train_svm(const LabeledMatrix& data, const SvmConfig& cfg, const SmoObserver& observer,
                   SmoStats* stats) {
  cfg.validate();
  data.validate();

  SmoSolver solver(data, cfg, observer);
  SmoStats local;
  solver.run(local);
  if (stats) *stats = local;

  SvmModel m;
  m.config = cfg;
  m.bias = solver.bias();
  m.dim = data.dim();
  const auto& alpha = solver.alphas();
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (alpha[k] <= 0.0) continue;
    m.support_vectors.push_back(data.X[k]);
    m.alphas.push_back(alpha[k]);
    m.labels.push_back(data.y[k]);
    m.support_indices.push_back(k);
  }
  return m;
}

double decision_value(const SvmModel& m, const Vector& x) {
  if (m.dim != x.dim())
    throw Error(ErrorKind::InvalidArgument, "svm: input dim " + std::to_string(x.dim()) +
                                                " does not match model dim " +
                                                std::to_string(m.dim));
  return model_output(m, x);
}

Label label_from_decision(double decision) noexcept {
  return decision > 0.0 ? Label::Sarcastic : Label::NonSarcastic;
}

Label predict(const SvmModel& m, const Vector& x) {
  return label_from_decision(decision_value(m, x));
}

std::vector<double> full_alphas(const SvmModel& m, std::size_t n) {
  std::vector<double> a(n, 0.0);
  for (std::size_t s = 0; s < m.support_count(); ++s) {
    if (m.support_indices[s] >= n)
      throw Error(ErrorKind::InvalidArgument, "svm: support index outside the training matrix");
    a[m.support_indices[s]] = m.alphas[s];
  }
  return a;
}

double dual_objective(std::span<const double> alphas, const LabeledMatrix& data, double gamma) {
  const std::size_t n = data.size();
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += alphas[i];
    if (alphas[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (alphas[j] == 0.0) continue;
      quad += alphas[i] * alphas[j] * data.y[i] * data.y[j] *
              rbf_kernel(data.X[i], data.X[j], gamma);
    }
  }
  return linear - 0.5 * quad;
}

double dual_objective(const SvmModel& m, const LabeledMatrix& data) {
  const auto a = full_alphas(m, data.size());
  return dual_objective(a, data, m.config.gamma);
}

double kkt_violation(const SvmModel& m, const LabeledMatrix& data) {
  const auto a = full_alphas(m, data.size());
  const double C = m.config.C;
  const double eps = 1e-12 * C;
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double margin = data.y[i] * decision_value(m, data.X[i]);
    double excess;
    if (a[i] <= eps) {
      excess = std::max(0.0, 1.0 - margin);
    } else if (a[i] >= C - eps) {
      excess = std::max(0.0, margin - 1.0);
    } else {
      excess = std::abs(margin - 1.0);
    }
    worst = std::max(worst, excess);
  }
  return worst;
}

}  // namespace sarcasm
