#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sarcasm/corpus.hpp"
#include "sarcasm/svm.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_bytes(const std::filesystem::path& path);

/// Separable corpus: every sarcastic tweet contains the marker token "zzz",
/// no non-sarcastic one does. Classes alternate, half each.
sarcasm::Dataset separable_corpus(std::size_t n, std::uint64_t seed);

/// Writes a SEMB file byte by byte (independently of the library encoder)
/// with one seeded random row per distinct text, in the given order.
/// Sarcastic-looking texts (containing "zzz") get a shifted first component.
void write_semb_fixture(const std::filesystem::path& path, const std::vector<std::string>& texts,
                        std::uint32_t dim, std::uint64_t seed);

/// Dense random binary classification data with both classes present.
sarcasm::LabeledMatrix random_problem(std::size_t n, std::size_t d, std::uint64_t seed);

/// Box-and-equality constrained dual QP solved by accelerated projected
/// gradient with adaptive restart. Returns the alpha vector.
std::vector<double> qp_oracle(const sarcasm::LabeledMatrix& data, double C, double gamma,
                              std::size_t max_iters = 200000);

/// sum(a) - 1/2 a^T Q a, evaluated directly from the kernel definition.
double oracle_dual(const std::vector<double>& alphas, const sarcasm::LabeledMatrix& data,
                   double gamma);

}  // namespace testing
