#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarcasm/augment.hpp"
#include "sarcasm/corpus.hpp"
#include "sarcasm/embed.hpp"
#include "sarcasm/preprocess.hpp"
#include "sarcasm/svm.hpp"

namespace sarcasm {

// ---------------------------------------------------------------------------
// Metrics (Sarcastic is the positive class)

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion_matrix(std::span<const Label> predictions, std::span<const Label> golds);

/// 2 tp / (2 tp + fp + fn); 0 when the denominator is 0.
double f1_sarcastic(const ConfusionMatrix& cm) noexcept;
/// (tp + tn) / total; throws Error(InvalidArgument) for an empty matrix.
double accuracy(const ConfusionMatrix& cm);

// ---------------------------------------------------------------------------
// Experiments

enum class EmbeddingBackend { Tfidf, Word2Vec, Transformer };

std::string_view backend_name(EmbeddingBackend backend) noexcept;  // tfidf / word2vec / transformer
EmbeddingBackend parse_backend(std::string_view name);

struct AugmentationSetup {
  AugmentationPlan plan;  // plan.seed is derived from the experiment seed at run time
  AugmentPolicy policy;
  std::optional<std::filesystem::path> synonyms_path;
};

/// Externally generated tweets sampled into the training side.
struct GeneratedSetup {
  std::filesystem::path path;
  std::size_t per_class_quota = 2000;
};

struct EmbeddingSetup {
  EmbeddingBackend backend = EmbeddingBackend::Tfidf;
  Word2VecConfig word2vec;  // word2vec.seed is derived from the experiment seed
  std::optional<std::filesystem::path> semb_path;
};

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  std::vector<std::filesystem::path> merge_paths;  // secondary datasets, train side only
  PreprocessConfig preprocess;
  std::optional<AugmentationSetup> augmentation;
  std::optional<GeneratedSetup> generated;
  EmbeddingSetup embedding;
  SvmConfig svm;           // svm.seed is derived from the experiment seed
  bool gamma_auto = true;  // resolve gamma with scale_gamma() on the training matrix
  double test_fraction = 0.2;
  std::uint64_t seed = 42;

  /// Checks value ranges and that every referenced file exists.
  /// Throws Error(Config) naming the offending key or path.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  /// Hex SHA-256 prefix of the canonical JSON form.
  std::string fingerprint() const;
};

/// The derived per-stage seeds of one experiment.
struct StageSeeds {
  std::uint64_t split, augment, generated, word2vec, svm;
};
StageSeeds stage_seeds(std::uint64_t root) noexcept;

struct ExperimentReport {
  std::string row_name;
  std::string fingerprint;
  bool ok = true;
  std::string error;

  double f1_sarcastic = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  double wall_time_seconds = 0.0;  // kept out of report files so they stay byte-stable

  // resolved settings
  std::string backend;
  std::string preprocess;
  std::string augmentation;  // plan name or "None"
  double gamma = 0.0;
  double C = 0.0;
  double delete_rate = 0.0;
  double replace_rate = 0.0;
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;  // after augmentation
  std::size_t n_test = 0;
  std::size_t support_vectors = 0;
  bool svm_converged = false;
  std::string test_digest;  // SHA-256 over the serialized test records

  nlohmann::ordered_json to_json() const;
};

/// SHA-256 of the sorted serialized records; equal digests mean equal multisets.
std::string record_multiset_digest(const std::vector<TweetRecord>& records);

/// load -> split -> augment (train only) -> preprocess -> fit embedding
/// (train only) -> train SVM -> evaluate on the untouched test side.
/// Stage failures throw Error tagged with the stage name. The trained
/// model is copied to `model_out` when given.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& row_name = "run",
                                SvmModel* model_out = nullptr);

/// Texts whose sentence embeddings a transformer-backed run looks up (the
/// augmented training side and the test side, deduplicated, first-seen
/// order), as a corpus ready for an external exporter.
Dataset embedding_texts(const ExperimentConfig& cfg);

enum class AblationAxis { AugmentationCombos, PreprocessFlags, EmbeddingBackends };

AblationAxis parse_axis(std::string_view name);  // augmentation / preprocess / embedding
std::vector<std::pair<std::string, ExperimentConfig>> ablation_rows(const ExperimentConfig& base,
                                                                    AblationAxis axis);

/// One report per axis value, in enumeration order. A failing row is
/// reported with ok = false and does not stop the others. Rows run on up
/// to `jobs` threads.
std::vector<ExperimentReport> run_ablation(const ExperimentConfig& base, AblationAxis axis,
                                           unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Report files

inline constexpr int kReportSchemaVersion = 1;

/// `row_name,f1_sarcastic,accuracy,tp,fp,fn,tn,...`
std::string reports_to_csv(const std::vector<ExperimentReport>& reports);
std::string reports_to_json(const std::vector<ExperimentReport>& reports);

}  // namespace sarcasm
