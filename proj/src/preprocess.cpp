#include "sarcasm/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "sarcasm/error.hpp"
#include "utf8.hpp"

namespace sarcasm {
namespace embedded {
extern const std::string_view stopwords_txt;
extern const std::string_view lemmas_tsv;
}  // namespace embedded

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_punct(char32_t cp) noexcept {
  if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
  return cp == 0xA1 || cp == 0xAB || cp == 0xBB || cp == 0xBF ||
         (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E);
}

// Emoji blocks and the joiners/modifiers that glue emoji sequences together.
constexpr std::array<std::pair<char32_t, char32_t>, 20> kEmojiRanges{{
    {0x200D, 0x200D},    // zero width joiner
    {0x20E3, 0x20E3},    // combining enclosing keycap
    {0x231A, 0x231B},    // watch, hourglass
    {0x23E9, 0x23FA},    // media controls
    {0x2600, 0x26FF},    // miscellaneous symbols
    {0x2700, 0x27BF},    // dingbats
    {0x2B05, 0x2B07},
    {0x2B1B, 0x2B1C},
    {0x2B50, 0x2B55},
    {0xFE0E, 0xFE0F},    // variation selectors 15/16
    {0x1F000, 0x1F02F},  // mahjong tiles
    {0x1F0A0, 0x1F0FF},  // playing cards
    {0x1F1E6, 0x1F1FF},  // regional indicators (flags)
    {0x1F300, 0x1F5FF},  // symbols & pictographs, skin tones
    {0x1F600, 0x1F64F},  // emoticons
    {0x1F680, 0x1F6FF},  // transport & map
    {0x1F7E0, 0x1F7FF},  // geometric shapes extended
    {0x1F900, 0x1F9FF},  // supplemental symbols & pictographs
    {0x1FA70, 0x1FAFF},  // symbols & pictographs extended-A
    {0xE0020, 0xE007F},  // tag characters
}};

template <typename Fn>
void for_each_chunk(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < text.size()) {
    const auto cp = utf8::decode(text, pos);
    if (utf8::is_space(cp.value)) {
      if (start != std::string_view::npos) fn(text.substr(start, pos - start));
      start = std::string_view::npos;
    } else if (start == std::string_view::npos) {
      start = pos;
    }
    pos += cp.length;
  }
  if (start != std::string_view::npos) fn(text.substr(start));
}

// Byte length of the last code point in a nonempty string.
std::size_t last_codepoint_start(std::string_view s) {
  std::size_t i = s.size() - 1;
  std::size_t steps = 0;
  while (i > 0 && steps < 3 && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) {
    --i;
    ++steps;
  }
  // Fall back to a single byte if the tail is not a well-formed sequence.
  if (utf8::decode(s, i).length != s.size() - i) return s.size() - 1;
  return i;
}

std::unordered_set<std::string> parse_stopwords() {
  std::unordered_set<std::string> words;
  std::size_t pos = 0;
  const auto text = embedded::stopwords_txt;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) words.emplace(line);
    pos = end + 1;
  }
  return words;
}

std::unordered_map<std::string, std::string> parse_lemmas() {
  std::unordered_map<std::string, std::string> table;
  std::size_t pos = 0;
  const auto text = embedded::lemmas_tsv;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tab = line.find('\t');
    if (line.empty() || tab == std::string_view::npos) continue;
    table.emplace(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  }
  return table;
}

}  // namespace

void PreprocessConfig::validate() const {
  if (stem && lemmatize)
    throw Error(ErrorKind::Config, "preprocess: stem and lemmatize are mutually exclusive");
}

std::string PreprocessConfig::name() const {
  std::string out;
  const auto add = [&out](bool on, const char* part) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += part;
  };
  add(remove_links, "links");
  add(remove_emojis, "emojis");
  add(remove_stopwords, "stopwords");
  add(stem, "stem");
  add(lemmatize, "lemmatize");
  return out.empty() ? "none" : out;
}

bool is_url_token(std::string_view token) noexcept {
  const auto starts = [token](std::string_view prefix) {
    if (token.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(token[i])) != prefix[i]) return false;
    return true;
  };
  return starts("http://") || starts("https://") || starts("www.");
}

bool is_emoji_codepoint(char32_t cp) noexcept {
  return std::any_of(kEmojiRanges.begin(), kEmojiRanges.end(),
                     [cp](const auto& r) { return cp >= r.first && cp <= r.second; });
}

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  for_each_chunk(text, [&tokens](std::string_view chunk) {
    if (is_url_token(chunk)) {
      tokens.emplace_back(chunk);
      return;
    }
    while (!chunk.empty()) {
      const auto cp = utf8::decode(chunk, 0);
      if (!is_punct(cp.value) || cp.value == U'@' || cp.value == U'#') break;
      tokens.emplace_back(chunk.substr(0, cp.length));
      chunk.remove_prefix(cp.length);
    }
    if (chunk.empty()) return;
    if (is_url_token(chunk)) {
      tokens.emplace_back(chunk);
      return;
    }
    std::vector<std::string_view> trailing;
    while (!chunk.empty()) {
      const auto start = last_codepoint_start(chunk);
      if (!is_punct(utf8::decode(chunk, start).value)) break;
      trailing.push_back(chunk.substr(start));
      chunk.remove_suffix(chunk.size() - start);
    }
    if (!chunk.empty()) tokens.emplace_back(chunk);
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) tokens.emplace_back(*it);
  });
  return tokens;
}

std::string join_tokens(const TokenList& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string remove_links(std::string_view text) {
  std::string out;
  for_each_chunk(text, [&out](std::string_view chunk) {
    if (is_url_token(chunk)) return;
    if (!out.empty()) out.push_back(' ');
    out += chunk;
  });
  return out;
}

std::string remove_emojis(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto cp = utf8::decode(text, pos);
    if (!is_emoji_codepoint(cp.value)) out.append(text.substr(pos, cp.length));
    pos += cp.length;
  }
  return out;
}

const std::unordered_set<std::string>& stopword_set() {
  static const auto words = parse_stopwords();
  return words;
}

const std::unordered_map<std::string, std::string>& lemma_table() {
  static const auto table = parse_lemmas();
  return table;
}

std::string lemmatize(std::string_view word) {
  auto lower = lower_ascii(word);
  const auto& table = lemma_table();
  if (const auto it = table.find(lower); it != table.end()) return it->second;
  return lower;
}

TokenList drop_stopwords(const TokenList& tokens) {
  const auto& stop = stopword_set();
  TokenList out;
  for (const auto& t : tokens)
    if (!stop.contains(lower_ascii(t))) out.push_back(t);
  return out;
}

TokenList stem_tokens(const TokenList& tokens) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(porter_stem(t));
  return out;
}

TokenList lemmatize_tokens(const TokenList& tokens) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lemmatize(t));
  return out;
}

TokenList preprocess_tokens(std::string_view text, const PreprocessConfig& cfg) {
  cfg.validate();
  std::string working(text);
  if (cfg.remove_links) working = remove_links(working);
  if (cfg.remove_emojis) working = remove_emojis(working);
  auto tokens = tokenize(working);
  if (cfg.remove_stopwords) tokens = drop_stopwords(tokens);
  if (cfg.stem) tokens = stem_tokens(tokens);
  if (cfg.lemmatize) tokens = lemmatize_tokens(tokens);
  return tokens;
}

std::string preprocess_text(std::string_view text, const PreprocessConfig& cfg) {
  return join_tokens(preprocess_tokens(text, cfg));
}

}  // namespace sarcasm
