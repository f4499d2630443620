#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sarcasm {

enum class Label { NonSarcastic = 0, Sarcastic = 1 };
enum class Source { Primary, Generated, Merged };
enum class FileFormat { Csv, Jsonl };

std::string_view label_name(Label label) noexcept;   // "sarcastic" / "non_sarcastic"
std::string_view source_name(Source source) noexcept;

/// Parses a label token case-insensitively: sarcastic/non_sarcastic or 1/0.
/// Throws Error(Parse) naming the token otherwise.
Label parse_label(std::string_view token);

/// Picks the format from a file extension (.csv / .jsonl / .json).
FileFormat format_from_path(const std::filesystem::path& path);

/// One labeled tweet. Construction validates the record invariants.
class TweetRecord {
 public:
  TweetRecord(std::string text, Label label, std::vector<std::string> sarcasm_types = {},
              Source source = Source::Primary);

  const std::string& text() const noexcept { return text_; }
  Label label() const noexcept { return label_; }
  const std::vector<std::string>& sarcasm_types() const noexcept { return sarcasm_types_; }
  Source source() const noexcept { return source_; }

  TweetRecord with_text(std::string text) const;
  TweetRecord with_source(Source source) const;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
  friend auto operator<=>(const TweetRecord&, const TweetRecord&) = default;

 private:
  std::string text_;
  Label label_;
  std::vector<std::string> sarcasm_types_;
  Source source_;
};

struct Dataset {
  std::vector<TweetRecord> records;
  std::string provenance;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

struct ClassStats {
  std::size_t n_total = 0;
  std::size_t n_sarcastic = 0;
  std::size_t n_non_sarcastic = 0;
  double sarcastic_fraction = 0.0;

  friend bool operator==(const ClassStats&, const ClassStats&) = default;
};

Dataset load_dataset(const std::filesystem::path& path, FileFormat format);
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::string_view bytes, FileFormat format, std::string provenance = {});

/// Serializes in the same dialect load_dataset reads.
std::string serialize_dataset(const Dataset& d, FileFormat format);
void write_dataset(const Dataset& d, const std::filesystem::path& path, FileFormat format);

/// Stratified train/test partition. Per-class test counts use round-half-up,
/// then the larger class absorbs a +-1 correction so the total test size is
/// round(test_fraction * n). Both outputs keep input order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed);

ClassStats class_stats(const Dataset& d) noexcept;

/// Concatenates in argument order; records from the second dataset onward get Source::Merged.
Dataset merge_datasets(const std::vector<Dataset>& parts);

}  // namespace sarcasm
