#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sarcasm/error.hpp"
#include "sarcasm/preprocess.hpp"
#include "sarcasm/vector.hpp"

namespace sarcasm {

// ---------------------------------------------------------------------------
// TF-IDF

/// tf = count / |doc|, idf = ln(N / df), no smoothing. Vocabulary indices
/// follow lexicographic term order.
struct TfidfModel {
  std::map<std::string, std::uint32_t> vocabulary;
  std::vector<double> idf;
  std::size_t n_docs = 0;

  std::size_t dim() const noexcept { return idf.size(); }
};

TfidfModel fit_tfidf(const std::vector<TokenList>& corpus);
/// Sparse vector; out-of-vocabulary tokens are ignored.
Vector tfidf_vector(const TfidfModel& model, const TokenList& doc);

// ---------------------------------------------------------------------------
// Word2Vec (skip-gram with negative sampling)

struct WordEmbeddings {
  std::map<std::string, std::uint32_t> vocabulary;
  std::vector<double> vectors;  // row-major, vocabulary.size() x dim
  std::size_t dim = 0;

  std::span<const double> row(std::uint32_t index) const {
    return std::span<const double>(vectors).subspan(index * dim, dim);
  }
  /// nullopt for out-of-vocabulary words.
  std::optional<std::span<const double>> find(const std::string& word) const;
};

struct Word2VecConfig {
  std::size_t dim = 100;
  std::size_t window = 2;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double lr = 0.025;  // decays linearly towards lr * 1e-4 over all pairs
  std::uint64_t seed = 1;

  void validate() const;
};

struct Word2VecResult {
  WordEmbeddings embeddings;
  std::vector<double> epoch_losses;  // mean per-pair loss of each epoch
};

Word2VecResult train_word2vec(const std::vector<TokenList>& corpus, const Word2VecConfig& cfg);

struct SgnsGradients {
  double loss = 0.0;
  std::vector<double> center;
  std::vector<double> context;
  std::vector<std::vector<double>> negatives;
};

/// loss = -log s(u.v) - sum_k log s(-u.v_k) for center u, context v and
/// negatives v_k, with exact analytic partials. Throws on dimension mismatch.
SgnsGradients sgns_loss_and_grad(std::span<const double> center, std::span<const double> context,
                                 const std::vector<std::span<const double>>& negatives);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Precomputed transformer sentence embeddings (SEMB files)

using TextKey = std::array<std::uint8_t, 8>;

/// First 8 bytes of SHA-256 over the NFC-normalized UTF-8 text.
TextKey text_key(std::string_view text);
std::string nfc_normalize(std::string_view text);

class SentenceEmbeddingTable {
 public:
  explicit SentenceEmbeddingTable(std::uint32_t dim = 0) : dim_(dim) {}

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return rows_.size(); }

  /// Throws Error(InvalidArgument) when the row has the wrong dimension.
  void insert(const TextKey& key, std::vector<float> row);
  /// Inserts under text_key(text).
  void insert_text(std::string_view text, std::vector<float> row);

  /// Missing texts yield nullptr, never a default vector.
  const std::vector<float>* find(const TextKey& key) const;
  const std::vector<float>* find_text(std::string_view text) const;

  /// Rows in ascending key order (the order they are written).
  std::vector<std::pair<TextKey, const std::vector<float>*>> sorted_rows() const;

 private:
  std::uint32_t dim_;
  std::map<TextKey, std::vector<float>> rows_;
};

enum class SembErrorReason { BadMagic, UnsupportedVersion, Truncated, TrailingBytes, DimMismatch };

class SembFormatError : public Error {
 public:
  SembFormatError(SembErrorReason reason, const std::string& message)
      : Error(ErrorKind::Parse, message), reason_(reason) {}
  SembErrorReason reason() const noexcept { return reason_; }

 private:
  SembErrorReason reason_;
};

inline constexpr std::uint16_t kSembVersion = 1;

std::string encode_embedding_file(const SentenceEmbeddingTable& table);
SentenceEmbeddingTable decode_embedding_file(std::string_view bytes,
                                             std::optional<std::uint32_t> expected_dim = {});

void write_embedding_file(const SentenceEmbeddingTable& table, const std::filesystem::path& path);
/// Reads a SEMB file. If `path`.manifest.json exists, its "dim" must match the header.
SentenceEmbeddingTable load_embedding_file(const std::filesystem::path& path,
                                           std::optional<std::uint32_t> expected_dim = {});

// ---------------------------------------------------------------------------
// Pooling

using SentenceBackend = std::variant<const WordEmbeddings*, const TfidfModel*>;

/// Word2Vec: mean of in-vocabulary token vectors (zero vector when none).
/// TF-IDF: the sparse tf-idf vector densified.
Vector sentence_vector(const SentenceBackend& backend, const TokenList& doc);

}  // namespace sarcasm
