#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sarcasm/error.hpp"
#include "sarcasm/svm.hpp"
#include "support.hpp"

using namespace sarcasm;

namespace {

LabeledMatrix two_points() {
  LabeledMatrix m;
  m.X = {Vector::dense({1.0}), Vector::dense({-1.0})};
  m.y = {1, -1};
  return m;
}

SvmConfig config(double C, double gamma, std::uint64_t seed = 0) {
  SvmConfig c;
  c.C = C;
  c.gamma = gamma;
  c.seed = seed;
  return c;
}

const double kTwoPointAlpha = 1.0 / (1.0 - std::exp(-2.0));

}  // namespace

TEST_CASE("rbf kernel") {
  const auto x = Vector::dense({0.0, 0.0}), z = Vector::dense({1.0, 0.0});
  CHECK(rbf_kernel(x, x, 3.0) == 1.0);
  CHECK(rbf_kernel(x, z, 0.5) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
  double previous = 1.0;
  for (double g = 0.5; g < 100; g *= 2) {
    const double k = rbf_kernel(x, z, g);
    CHECK(k < previous);
    previous = k;
  }
  CHECK_THROWS_AS(rbf_kernel(x, Vector::dense({1.0}), 1.0), Error);

  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(4), b(4);
    for (auto& v : a) v = normal(gen);
    for (auto& v : b) v = normal(gen);
    const auto va = Vector::dense(a), vb = Vector::dense(b);
    CHECK(std::abs(rbf_kernel(va, vb, 0.7) - rbf_kernel(vb, va, 0.7)) <= 1e-15);
  }
}

TEST_CASE("config and data validation") {
  CHECK_THROWS_AS(config(0.0, 1.0).validate(), Error);
  CHECK_THROWS_AS(config(1.0, -1.0).validate(), Error);
  auto c = config(1.0, 1.0);
  c.tol = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);

  LabeledMatrix one_class;
  one_class.X = {Vector::dense({1.0}), Vector::dense({2.0})};
  one_class.y = {1, 1};
  CHECK_THROWS_AS(train_svm(one_class, config(1, 1)), Error);

  LabeledMatrix nan_data = two_points();
  nan_data.X[0] = Vector::dense({NAN});
  CHECK_THROWS_AS(train_svm(nan_data, config(1, 1)), Error);
}

TEST_CASE("two-point analytic solution") {
  const auto data = two_points();
  const auto m = train_svm(data, config(10.0, 0.5));
  REQUIRE(m.support_count() == 2);
  for (double a : m.alphas) CHECK(std::abs(a - kTwoPointAlpha) <= 1e-6);
  CHECK(std::abs(m.bias) <= 1e-6);
  CHECK(decision_value(m, data.X[0]) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(decision_value(m, Vector::dense({0.0}))) <= 1e-9);
  CHECK(dual_objective(m, data) == doctest::Approx(kTwoPointAlpha).epsilon(1e-9));
  CHECK(kkt_violation(m, data) <= 1e-10);
}

TEST_CASE("decision rules") {
  SvmModel empty;
  empty.bias = -0.25;
  empty.dim = 1;
  CHECK(decision_value(empty, Vector::dense({3.0})) == -0.25);
  CHECK(label_from_decision(0.7) == Label::Sarcastic);
  CHECK(label_from_decision(-0.7) == Label::NonSarcastic);
  CHECK(label_from_decision(0.0) == Label::NonSarcastic);
  CHECK(dual_objective(std::vector<double>(2, 0.0), two_points(), 1.0) == 0.0);
}

TEST_CASE("kkt violation of a perturbed margin model") {
  const auto data = two_points();
  auto m = train_svm(data, config(10.0, 0.5));
  m.bias += 0.01;
  CHECK(kkt_violation(m, data) == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("smo matches the qp oracle on random problems") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto data = testing::random_problem(15, 3, seed);
    const double gamma = 0.5;
    const auto cfg = config(seed % 2 ? 10.0 : 1.0, gamma, seed);
    SmoStats stats;
    const auto m = train_svm(data, cfg, {}, &stats);
    CHECK(stats.converged);
    const auto oracle = testing::qp_oracle(data, cfg.C, gamma);
    const double gap = std::abs(dual_objective(m, data) - testing::oracle_dual(oracle, data, gamma));
    INFO("seed " << seed);
    CHECK(gap <= 1e-4);
    CHECK(kkt_violation(m, data) <= cfg.tol);

    const auto alphas = full_alphas(m, data.size());
    double balance = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) balance += alphas[i] * data.y[i];
    CHECK(std::abs(balance) <= 1e-8);
    for (double a : m.alphas) {
      CHECK(a > 0.0);
      CHECK(a <= cfg.C);
    }
  }
}

TEST_CASE("dual ascent and box constraint after every update") {
  const auto data = testing::random_problem(18, 2, 42);
  const auto cfg = config(2.0, 0.8, 3);
  double previous = -INFINITY;
  std::size_t updates = 0;
  bool ascending = true, boxed = true, balanced = true;
  const auto observer = [&](std::span<const double> alphas, double) {
    ++updates;
    const std::vector<double> a(alphas.begin(), alphas.end());
    const double obj = dual_objective(a, data, cfg.gamma);
    ascending = ascending && obj >= previous - 1e-12;
    previous = obj;
    double balance = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      boxed = boxed && a[i] >= 0.0 && a[i] <= cfg.C;
      balance += a[i] * data.y[i];
    }
    balanced = balanced && std::abs(balance) <= 1e-10;
  };
  SmoStats stats;
  train_svm(data, cfg, observer, &stats);
  CHECK(updates > 0);
  CHECK(updates == stats.updates);
  CHECK(ascending);
  CHECK(boxed);
  CHECK(balanced);
}

TEST_CASE("training is deterministic and sparse inputs agree with dense") {
  const auto dense = testing::random_problem(20, 4, 9);
  LabeledMatrix sparse = dense;
  for (auto& x : sparse.X) {
    std::vector<SparseEntry> entries;
    const auto v = x.to_dense();
    for (std::uint32_t i = 0; i < v.size(); ++i)
      if (v[i] != 0.0) entries.push_back({i, v[i]});
    x = Vector::sparse(v.size(), entries);
  }
  const auto cfg = config(10.0, 0.3, 5);
  const auto a = train_svm(dense, cfg), b = train_svm(dense, cfg), c = train_svm(sparse, cfg);
  CHECK(a.alphas == b.alphas);
  CHECK(a.bias == b.bias);
  CHECK(a.alphas.size() == c.alphas.size());
  CHECK(dual_objective(a, dense) == doctest::Approx(dual_objective(c, sparse)).epsilon(1e-9));
}

TEST_CASE("small kernel cache gives the same model") {
  const auto data = testing::random_problem(20, 3, 77);
  auto cfg = config(5.0, 0.5, 1);
  const auto big = train_svm(data, cfg);
  cfg.cache_rows = 2;
  const auto small = train_svm(data, cfg);
  CHECK(big.alphas == small.alphas);
  CHECK(big.bias == small.bias);
}

TEST_CASE("prediction ignores support vector storage order") {
  const auto data = testing::random_problem(16, 2, 4);
  const auto m = train_svm(data, config(10.0, 0.5, 2));
  SvmModel reversed = m;
  std::reverse(reversed.support_vectors.begin(), reversed.support_vectors.end());
  std::reverse(reversed.alphas.begin(), reversed.alphas.end());
  std::reverse(reversed.labels.begin(), reversed.labels.end());
  std::reverse(reversed.support_indices.begin(), reversed.support_indices.end());
  for (const auto& x : data.X) {
    CHECK(decision_value(reversed, x) == doctest::Approx(decision_value(m, x)).epsilon(1e-12));
    if (std::abs(decision_value(m, x)) > 1e-9) CHECK(predict(reversed, x) == predict(m, x));
  }
}

TEST_CASE("scale gamma") {
  LabeledMatrix m;
  m.X = {Vector::dense({0.0, 2.0}), Vector::dense({2.0, 2.0})};
  m.y = {1, -1};
  // per-feature variances 1 and 0, mean 0.5, d = 2
  CHECK(scale_gamma(m) == doctest::Approx(1.0));
  m.X = {Vector::dense({1.0}), Vector::dense({1.0})};
  CHECK(scale_gamma(m) == 1.0);
}

TEST_CASE("model persistence round trip") {
  testing::TempDir dir("svm");
  const auto data = testing::random_problem(12, 3, 8);
  const auto m = train_svm(data, config(10.0, 0.5, 6));
  save_model(m, dir / "m.svmm");
  const auto back = load_model(dir / "m.svmm");
  CHECK(back.alphas == m.alphas);
  CHECK(back.labels == m.labels);
  CHECK(back.support_indices == m.support_indices);
  CHECK(back.bias == m.bias);
  CHECK(back.config.C == m.config.C);
  CHECK(back.config.gamma == m.config.gamma);
  CHECK(back.support_vectors == m.support_vectors);
  CHECK(encode_model(back) == encode_model(m));

  auto bytes = encode_model(m);
  CHECK_THROWS_AS(decode_model(bytes.substr(0, bytes.size() - 3)), Error);
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_model(bytes), Error);
}
