#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sarcasm/corpus.hpp"
#include "sarcasm/preprocess.hpp"
#include "sarcasm/rng.hpp"

namespace sarcasm {

/// Word root -> candidate replacement surface forms, keyed by porter_stem output.
class SynonymDictionary {
 public:
  SynonymDictionary() = default;

  /// Appends synonyms for `root`, skipping forms already listed. Throws
  /// Error(InvalidArgument) naming the root when `synonyms` is empty.
  void add(const std::string& root, const std::vector<std::string>& synonyms);

  /// nullptr when the root has no entry.
  const std::vector<std::string>* find(const std::string& root) const;

  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

/// Parses TSV lines `root<TAB>syn1,syn2,...`; duplicate roots merge in first-seen order.
SynonymDictionary parse_synonym_dictionary(std::string_view text);
SynonymDictionary load_synonym_dictionary(const std::filesystem::path& path);

struct AugmentationPlan {
  bool use_shuffle = false;
  bool use_delete = false;
  bool use_replace = false;
  double delete_rate = 0.1;
  double replace_rate = 0.1;
  std::uint64_t seed = 0;

  /// Throws Error(Config) for the all-off plan or a rate outside [0, 1].
  void validate() const;
  /// "Shuffling", "Removing", "Replacing" joined with '+', in application order.
  std::string name() const;
  /// Compact operator code: some subset of "SDR".
  std::string code() const;
};

/// Parses a comma-separated operator list ("shuffle,delete,replace"; aliases
/// "remove" and "synonym" accepted). Unknown names and "none" are rejected
/// with a message listing the valid names.
AugmentationPlan parse_plan_ops(std::string_view ops);

/// The seven nonempty operator combinations: S, D, R, SD, SR, DR, SDR.
std::vector<AugmentationPlan> all_plans(double delete_rate, double replace_rate,
                                        std::uint64_t seed);

enum class TargetClass { SarcasticOnly, Both };

struct AugmentPolicy {
  TargetClass target_class = TargetClass::SarcasticOnly;
  std::uint32_t copies_per_record = 1;

  void validate() const;
};

using RootFn = std::function<std::string(std::string_view)>;

/// Fisher-Yates permutation of the whole sequence.
TokenList shuffle_tokens(const TokenList& tokens, Rng& rng);

/// Drops each token independently with probability `rate`. If every token
/// would be dropped, the last one is kept so nonempty input stays nonempty.
TokenList delete_tokens(const TokenList& tokens, double rate, Rng& rng);

/// With probability `rate`, replaces each token whose root has a dictionary
/// entry by a uniformly chosen listed synonym other than the token itself.
TokenList replace_synonyms(const TokenList& tokens, const SynonymDictionary& dict, double rate,
                           Rng& rng, const RootFn& root_fn = porter_stem);

/// Seed of the generator used for copy `copy` of record `record_index`.
std::uint64_t record_seed(std::uint64_t plan_seed, std::uint64_t record_index,
                          std::uint32_t copy = 0) noexcept;

/// tokenize -> shuffle -> delete -> replace (enabled operators only) -> join.
/// Label and sarcasm types are copied; source becomes Generated.
TweetRecord mutate_tweet(const TweetRecord& record, const AugmentationPlan& plan,
                         const SynonymDictionary& dict, std::uint64_t record_index = 0,
                         std::uint32_t copy = 0);

/// Original records followed by `copies_per_record` mutated copies of each
/// targeted record, in input-index order.
Dataset augment_dataset(const Dataset& d, const AugmentationPlan& plan,
                        const AugmentPolicy& policy, const SynonymDictionary& dict);

/// Uniform sample of exactly `per_class_quota` records per class from a
/// generated-tweet file; selected records keep file order.
Dataset ingest_generated(const std::filesystem::path& path, std::size_t per_class_quota,
                         std::uint64_t seed);
Dataset sample_generated(const Dataset& generated, std::size_t per_class_quota,
                         std::uint64_t seed);

}  // namespace sarcasm
