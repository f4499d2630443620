#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sarcasm {

using TokenList = std::vector<std::string>;

/// The five preprocessing switches. stem and lemmatize are mutually exclusive.
struct PreprocessConfig {
  bool remove_links = false;
  bool remove_emojis = false;
  bool remove_stopwords = false;
  bool stem = false;
  bool lemmatize = false;

  bool any() const noexcept {
    return remove_links || remove_emojis || remove_stopwords || stem || lemmatize;
  }
  /// Throws Error(Config) when both stem and lemmatize are set.
  void validate() const;
  /// Short name such as "none" or "links+stopwords+stem".
  std::string name() const;

  friend bool operator==(const PreprocessConfig&, const PreprocessConfig&) = default;
};

/// Splits on Unicode whitespace, then detaches leading and trailing punctuation
/// one character per token. URL tokens are kept intact; a leading '@' or '#'
/// stays attached so mentions and hashtags survive.
TokenList tokenize(std::string_view text);

std::string join_tokens(const TokenList& tokens);

bool is_url_token(std::string_view token) noexcept;
bool is_emoji_codepoint(char32_t cp) noexcept;

std::string remove_links(std::string_view text);
std::string remove_emojis(std::string_view text);

/// Embedded English stopword list (data/stopwords.txt).
const std::unordered_set<std::string>& stopword_set();

/// Embedded lemma table (data/lemmas.tsv), surface form -> lemma.
const std::unordered_map<std::string, std::string>& lemma_table();

/// Porter (1980) suffix stripping on a lowercased word. Tokens that are not
/// purely ASCII letters come back lowercased but otherwise untouched.
std::string porter_stem(std::string_view word);

/// Lowercased lemma lookup; unknown words are returned lowercased.
std::string lemmatize(std::string_view word);

/// Token-level stages, exposed for the count properties.
TokenList drop_stopwords(const TokenList& tokens);
TokenList stem_tokens(const TokenList& tokens);
TokenList lemmatize_tokens(const TokenList& tokens);

/// link removal -> emoji removal -> tokenize -> stopword removal ->
/// stem or lemmatize -> join with single spaces.
TokenList preprocess_tokens(std::string_view text, const PreprocessConfig& cfg);
std::string preprocess_text(std::string_view text, const PreprocessConfig& cfg);

}  // namespace sarcasm
