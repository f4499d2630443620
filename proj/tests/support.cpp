#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "sarcasm/embed.hpp"

namespace testing {

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = std::filesystem::temp_directory_path() /
          ("sarcasm-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

sarcasm::Dataset separable_corpus(std::size_t n, std::uint64_t seed) {
  static const char* kFiller[] = {"today",  "work",   "coffee", "meeting", "weather", "train",
                                  "people", "really", "monday", "again",   "great",   "love",
                                  "lunch",  "phone",  "late",   "news",    "friday",  "game"};
  constexpr std::size_t kFillerCount = sizeof kFiller / sizeof kFiller[0];
  std::mt19937_64 gen(seed);
  sarcasm::Dataset d;
  d.provenance = "synthetic separable corpus";
  for (std::size_t i = 0; i < n; ++i) {
    const bool sarcastic = i % 2 == 0;
    std::vector<std::string> words;
    for (int k = 0; k < 5; ++k) words.push_back(kFiller[gen() % kFillerCount]);
    if (sarcastic) words[gen() % words.size()] = "zzz";
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    if (sarcastic) {
      d.records.emplace_back(text, sarcasm::Label::Sarcastic, std::vector<std::string>{"sarcasm"});
    } else {
      d.records.emplace_back(text, sarcasm::Label::NonSarcastic);
    }
  }
  return d;
}

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
}

}  // namespace

void write_semb_fixture(const std::filesystem::path& path, const std::vector<std::string>& texts,
                        std::uint32_t dim, std::uint64_t seed) {
  std::vector<std::string> distinct;
  for (const auto& t : texts)
    if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) distinct.push_back(t);

  std::mt19937_64 gen(seed);
  std::normal_distribution<float> noise(0.0f, 0.3f);
  std::string out = "SEMB";
  put_le<std::uint16_t>(out, 1);
  put_le<std::uint32_t>(out, dim);
  put_le<std::uint64_t>(out, distinct.size());
  for (const auto& t : distinct) {
    const auto key = sarcasm::text_key(t);
    out.append(reinterpret_cast<const char*>(key.data()), key.size());
    const bool marked = t.find("zzz") != std::string::npos;
    for (std::uint32_t j = 0; j < dim; ++j) {
      float v = noise(gen);
      if (j == 0) v += marked ? 1.0f : -1.0f;
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      put_le<std::uint32_t>(out, bits);
    }
  }
  write_text(path, out);
}

sarcasm::LabeledMatrix random_problem(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  sarcasm::LabeledMatrix m;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i == 0 ? 1 : i == 1 ? -1 : (gen() % 2 ? 1 : -1);
    std::vector<double> x(d);
    for (auto& v : x) v = normal(gen) + 0.7 * y;
    m.X.push_back(sarcasm::Vector::dense(std::move(x)));
    m.y.push_back(y);
  }
  return m;
}

namespace {

std::vector<std::vector<double>> signed_gram(const sarcasm::LabeledMatrix& data, double gamma) {
  const auto n = data.size();
  std::vector<std::vector<double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = data.X[i].to_dense();
  std::vector<std::vector<double>> Q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < rows[i].size(); ++k) {
        const double diff = rows[i][k] - rows[j][k];
        d2 += diff * diff;
      }
      Q[i][j] = data.y[i] * data.y[j] * std::exp(-gamma * d2);
    }
  }
  return Q;
}

// Euclidean projection onto {0 <= a <= C, y.a = 0}: a = clip(v - lambda y),
// with lambda found by bisection on the monotone constraint residual.
std::vector<double> project(const std::vector<double>& v, const std::vector<int>& y, double C) {
  const auto n = v.size();
  const auto residual = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += y[i] * std::clamp(v[i] - lambda * y[i], 0.0, C);
    return s;
  };
  double hi = C + 1.0;
  for (double x : v) hi = std::max(hi, std::abs(x) + C + 1.0);
  double lo = -hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::clamp(v[i] - lambda * y[i], 0.0, C);
  return a;
}

}  // namespace

std::vector<double> qp_oracle(const sarcasm::LabeledMatrix& data, double C, double gamma,
                              std::size_t max_iters) {
  const auto n = data.size();
  const auto Q = signed_gram(data, gamma);
  double L = 0.0;
  for (const auto& row : Q) {
    double s = 0.0;
    for (double q : row) s += std::abs(q);
    L = std::max(L, s);
  }
  const auto grad = [&](const std::vector<double>& a) {
    std::vector<double> g(n, -1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i] += Q[i][j] * a[j];
    return g;
  };

  std::vector<double> x(n, 0.0), z = x;
  double t = 1.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const auto g = grad(z);
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = z[i] - g[i] / L;
    auto next = project(step, data.y, C);

    double restart = 0.0, moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      restart += g[i] * (next[i] - x[i]);
      moved = std::max(moved, std::abs(next[i] - x[i]));
    }
    if (restart > 0.0) {
      x = std::move(next);
      z = x;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < n; ++i) z[i] = next[i] + (t - 1.0) / t_next * (next[i] - x[i]);
    x = std::move(next);
    t = t_next;
    if (moved < 1e-15 && it > 100) break;
  }
  return x;
}

double oracle_dual(const std::vector<double>& alphas, const sarcasm::LabeledMatrix& data,
                   double gamma) {
  const auto Q = signed_gram(data, gamma);
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    linear += alphas[i];
    for (std::size_t j = 0; j < alphas.size(); ++j) quad += alphas[i] * alphas[j] * Q[i][j];
  }
  return linear - 0.5 * quad;
}

}  // namespace testing
