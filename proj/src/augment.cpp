#include "sarcasm/augment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sarcasm/error.hpp"

namespace sarcasm {
namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void check_rate(double rate, const char* what) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + " must lie in [0, 1], got " + std::to_string(rate));
}

}  // namespace

void SynonymDictionary::add(const std::string& root, const std::vector<std::string>& synonyms) {
  if (synonyms.empty())
    throw Error(ErrorKind::InvalidArgument, "empty synonym list for root '" + root + "'");
  auto& list = entries_[root];
  for (const auto& s : synonyms)
    if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(s);
}

const std::vector<std::string>* SynonymDictionary::find(const std::string& root) const {
  const auto it = entries_.find(root);
  return it == entries_.end() ? nullptr : &it->second;
}

SynonymDictionary parse_synonym_dictionary(std::string_view text) {
  SynonymDictionary dict;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorKind::Parse,
                  "synonym dictionary line " + std::to_string(line_no) + ": missing TAB");
    const std::string root(trim(line.substr(0, tab)));
    if (root.empty())
      throw Error(ErrorKind::Parse,
                  "synonym dictionary line " + std::to_string(line_no) + ": empty root");
    std::vector<std::string> synonyms;
    auto rest = line.substr(tab + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      if (comma == std::string_view::npos) comma = rest.size();
      const auto syn = trim(rest.substr(start, comma - start));
      if (!syn.empty()) synonyms.emplace_back(syn);
      start = comma + 1;
    }
    dict.add(root, synonyms);
  }
  return dict;
}

SynonymDictionary load_synonym_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open synonym dictionary '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_synonym_dictionary(buf.str());
}

void AugmentationPlan::validate() const {
  if (!use_shuffle && !use_delete && !use_replace)
    throw Error(ErrorKind::Config, "augmentation plan enables no operator (identity plan)");
  if (!(delete_rate >= 0.0 && delete_rate <= 1.0))
    throw Error(ErrorKind::Config, "delete_rate must lie in [0, 1]");
  if (!(replace_rate >= 0.0 && replace_rate <= 1.0))
    throw Error(ErrorKind::Config, "replace_rate must lie in [0, 1]");
}

std::string AugmentationPlan::name() const {
  std::string out;
  const auto add = [&out](bool on, const char* part) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += part;
  };
  add(use_shuffle, "Shuffling");
  add(use_delete, "Removing");
  add(use_replace, "Replacing");
  return out.empty() ? "None" : out;
}

std::string AugmentationPlan::code() const {
  std::string out;
  if (use_shuffle) out += 'S';
  if (use_delete) out += 'D';
  if (use_replace) out += 'R';
  return out;
}

AugmentationPlan parse_plan_ops(std::string_view ops) {
  static constexpr const char* kValid = "shuffle, delete (alias remove), replace (alias synonym)";
  AugmentationPlan plan;
  std::size_t start = 0;
  while (start <= ops.size()) {
    auto comma = ops.find(',', start);
    if (comma == std::string_view::npos) comma = ops.size();
    std::string name(trim(ops.substr(start, comma - start)));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    start = comma + 1;
    if (name.empty()) continue;
    if (name == "shuffle") {
      plan.use_shuffle = true;
    } else if (name == "delete" || name == "remove") {
      plan.use_delete = true;
    } else if (name == "replace" || name == "synonym") {
      plan.use_replace = true;
    } else {
      throw Error(ErrorKind::Config,
                  "unknown augmentation operator '" + name + "'; valid operators: " + kValid);
    }
  }
  if (!plan.use_shuffle && !plan.use_delete && !plan.use_replace)
    throw Error(ErrorKind::Config,
                std::string("augmentation needs at least one operator; valid operators: ") +
                    kValid);
  return plan;
}

std::vector<AugmentationPlan> all_plans(double delete_rate, double replace_rate,
                                        std::uint64_t seed) {
  // S, D, R, SD, SR, DR, SDR
  static constexpr int kMasks[] = {0b100, 0b010, 0b001, 0b110, 0b101, 0b011, 0b111};
  std::vector<AugmentationPlan> plans;
  for (int mask : kMasks) {
    AugmentationPlan p;
    p.use_shuffle = (mask & 0b100) != 0;
    p.use_delete = (mask & 0b010) != 0;
    p.use_replace = (mask & 0b001) != 0;
    p.delete_rate = delete_rate;
    p.replace_rate = replace_rate;
    p.seed = seed;
    plans.push_back(p);
  }
  return plans;
}

void AugmentPolicy::validate() const {
  if (copies_per_record < 1)
    throw Error(ErrorKind::Config, "copies_per_record must be >= 1");
}

TokenList shuffle_tokens(const TokenList& tokens, Rng& rng) {
  TokenList out = tokens;
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.uniform_index(i)]);
  return out;
}

TokenList delete_tokens(const TokenList& tokens, double rate, Rng& rng) {
  check_rate(rate, "delete rate");
  TokenList out;
  for (const auto& t : tokens)
    if (!rng.bernoulli(rate)) out.push_back(t);
  if (out.empty() && !tokens.empty()) out.push_back(tokens.back());
  return out;
}

TokenList replace_synonyms(const TokenList& tokens, const SynonymDictionary& dict, double rate,
                           Rng& rng, const RootFn& root_fn) {
  check_rate(rate, "replace rate");
  TokenList out = tokens;
  std::vector<const std::string*> candidates;
  for (auto& token : out) {
    const auto* synonyms = dict.find(root_fn(token));
    if (!synonyms) continue;
    if (!rng.bernoulli(rate)) continue;
    candidates.clear();
    for (const auto& s : *synonyms)
      if (s != token) candidates.push_back(&s);
    if (candidates.empty()) continue;
    token = *candidates[rng.uniform_index(candidates.size())];
  }
  return out;
}

std::uint64_t record_seed(std::uint64_t plan_seed, std::uint64_t record_index,
                          std::uint32_t copy) noexcept {
  return (plan_seed ^ record_index) + 0x9E3779B97F4A7C15ULL * copy;
}

TweetRecord mutate_tweet(const TweetRecord& record, const AugmentationPlan& plan,
                         const SynonymDictionary& dict, std::uint64_t record_index,
                         std::uint32_t copy) {
  plan.validate();
  Rng rng(record_seed(plan.seed, record_index, copy));
  auto tokens = tokenize(record.text());
  if (plan.use_shuffle) tokens = shuffle_tokens(tokens, rng);
  if (plan.use_delete) tokens = delete_tokens(tokens, plan.delete_rate, rng);
  if (plan.use_replace) tokens = replace_synonyms(tokens, dict, plan.replace_rate, rng);
  return record.with_text(join_tokens(tokens)).with_source(Source::Generated);
}

Dataset augment_dataset(const Dataset& d, const AugmentationPlan& plan,
                        const AugmentPolicy& policy, const SynonymDictionary& dict) {
  plan.validate();
  policy.validate();
  Dataset out;
  out.provenance = d.provenance + " + augment(" + plan.code() + ")";
  out.records = d.records;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& r = d.records[i];
    if (policy.target_class == TargetClass::SarcasticOnly && r.label() != Label::Sarcastic)
      continue;
    for (std::uint32_t c = 0; c < policy.copies_per_record; ++c)
      out.records.push_back(mutate_tweet(r, plan, dict, i, c));
  }
  return out;
}

Dataset sample_generated(const Dataset& generated, std::size_t per_class_quota,
                         std::uint64_t seed) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < generated.size(); ++i)
    by_class[static_cast<int>(generated.records[i].label())].push_back(i);
  for (int c = 0; c < 2; ++c)
    if (by_class[c].size() < per_class_quota)
      throw Error(ErrorKind::InvalidArgument,
                  "generated class '" + std::string(label_name(static_cast<Label>(c))) +
                      "' has " + std::to_string(by_class[c].size()) + " < quota " +
                      std::to_string(per_class_quota) + " records");

  Rng rng(seed);
  std::vector<std::size_t> chosen;
  for (int c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    // Partial Fisher-Yates: the first `quota` slots become a uniform sample.
    for (std::size_t k = 0; k < per_class_quota; ++k)
      std::swap(idx[k], idx[k + rng.uniform_index(idx.size() - k)]);
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(per_class_quota));
  }
  std::sort(chosen.begin(), chosen.end());

  Dataset out;
  out.provenance = generated.provenance + " [sampled " + std::to_string(per_class_quota) +
                   " per class]";
  for (auto i : chosen) out.records.push_back(generated.records[i].with_source(Source::Generated));
  return out;
}

Dataset ingest_generated(const std::filesystem::path& path, std::size_t per_class_quota,
                         std::uint64_t seed) {
  return sample_generated(load_dataset(path), per_class_quota, seed);
}

}  // namespace sarcasm
