#include "sarcasm/config.hpp"

#include <cctype>
#include <chrono>
#include <ctime>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "sarcasm/error.hpp"
#include "sarcasm/hash.hpp"

namespace sarcasm {
namespace {

using Value = std::variant<bool, std::int64_t, double, std::string, std::vector<std::string>>;

struct Entry {
  Value value;
  std::size_t line;
};

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

Error config_error(std::size_t line, const std::string& what) {
  return Error(ErrorKind::Config, "config line " + std::to_string(line) + ": " + what);
}

// Parses a double-quoted string starting at s[pos]; advances pos past the closing quote.
std::string parse_quoted(std::string_view s, std::size_t& pos, std::size_t line) {
  std::string out;
  ++pos;
  while (pos < s.size()) {
    const char c = s[pos++];
    if (c == '"') return out;
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (pos >= s.size()) break;
    switch (const char e = s[pos++]) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      default: throw config_error(line, std::string("unknown escape \\") + e);
    }
  }
  throw config_error(line, "unterminated string");
}

void expect_comment_or_end(std::string_view s, std::size_t pos, std::size_t line) {
  const auto rest = trim(s.substr(pos));
  if (!rest.empty() && rest.front() != '#')
    throw config_error(line, "unexpected text after value: '" + std::string(rest) + "'");
}

Value parse_value(std::string_view raw, std::size_t line) {
  const auto s = trim(raw);
  if (s.empty()) throw config_error(line, "missing value");
  std::size_t pos = 0;
  if (s.front() == '"') {
    auto str = parse_quoted(s, pos, line);
    expect_comment_or_end(s, pos, line);
    return str;
  }
  if (s.front() == '[') {
    std::vector<std::string> items;
    pos = 1;
    while (true) {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos >= s.size()) throw config_error(line, "unterminated array");
      if (s[pos] == ']') {
        ++pos;
        break;
      }
      if (s[pos] != '"') throw config_error(line, "arrays may only hold quoted strings");
      items.push_back(parse_quoted(s, pos, line));
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos < s.size() && s[pos] == ',') ++pos;
    }
    expect_comment_or_end(s, pos, line);
    return items;
  }
  auto token = s;
  if (const auto hash = token.find('#'); hash != std::string_view::npos)
    token = trim(token.substr(0, hash));
  if (token == "true") return true;
  if (token == "false") return false;
  const std::string text(token);
  char* end = nullptr;
  const bool looks_integer = text.find_first_of(".eE") == std::string::npos;
  if (looks_integer) {
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end && *end == '\0' && !text.empty()) return static_cast<std::int64_t>(v);
  }
  const double d = std::strtod(text.c_str(), &end);
  if (end && *end == '\0' && !text.empty()) return d;
  throw config_error(line, "cannot parse value '" + text + "' (strings need double quotes)");
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  template <typename T>
  std::optional<T> take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const Entry entry = it->second;
    entries_.erase(it);
    if constexpr (std::is_same_v<T, double>) {
      if (const auto* i = std::get_if<std::int64_t>(&entry.value)) return static_cast<double>(*i);
    }
    if (const auto* v = std::get_if<T>(&entry.value)) return *v;
    throw config_error(entry.line, "key '" + key + "' has the wrong type (expected " +
                                       type_name<T>() + ")");
  }

  template <typename T>
  std::optional<T> take_unsigned(const std::string& key) {
    const auto line = entries_.count(key) ? entries_.at(key).line : 0;
    const auto v = take<std::int64_t>(key);
    if (!v) return std::nullopt;
    if (*v < 0) throw config_error(line, "key '" + key + "' must be non-negative");
    return static_cast<T>(*v);
  }

  /// Either a number or the string "scale".
  std::optional<Value> take_raw(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    auto v = it->second.value;
    entries_.erase(it);
    return v;
  }

  std::size_t line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void reject_leftovers() const {
    if (entries_.empty()) return;
    const auto& [key, entry] = *entries_.begin();
    throw config_error(entry.line, "unknown key '" + key + "'");
  }

 private:
  template <typename T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, bool>) return "boolean";
    else if constexpr (std::is_same_v<T, std::int64_t>) return "integer";
    else if constexpr (std::is_same_v<T, double>) return "number";
    else if constexpr (std::is_same_v<T, std::string>) return "string";
    else return "array of strings";
  }

  std::map<std::string, Entry> entries_;
};

std::map<std::string, Entry> tokenize_config(std::string_view text) {
  static const char* kSections[] = {"data", "preprocess", "augment", "generated", "embedding",
                                    "svm"};
  std::map<std::string, Entry> entries;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) throw config_error(line_no, "unterminated section");
      section = std::string(trim(line.substr(1, close - 1)));
      bool known = false;
      for (const char* s : kSections) known = known || section == s;
      if (!known) throw config_error(line_no, "unknown section [" + section + "]");
      expect_comment_or_end(line, close + 1, line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw config_error(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw config_error(line_no, "empty key");
    const auto full = section.empty() ? key : section + "." + key;
    if (entries.count(full)) throw config_error(line_no, "duplicate key '" + full + "'");
    entries.emplace(full, Entry{parse_value(line.substr(eq + 1), line_no), line_no});
  }
  return entries;
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir) {
  Reader r(tokenize_config(text));
  const auto resolve = [&base_dir](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : (base_dir / path).lexically_normal();
  };

  ExperimentConfig cfg;
  if (auto v = r.take<std::int64_t>("seed")) cfg.seed = static_cast<std::uint64_t>(*v);

  const auto data_line = r.line_of("data.path");
  if (auto v = r.take<std::string>("data.path")) {
    cfg.dataset_path = resolve(*v);
  } else {
    (void)data_line;
    throw Error(ErrorKind::Config, "config: missing required key data.path");
  }
  if (auto v = r.take<std::vector<std::string>>("data.merge"))
    for (const auto& p : *v) cfg.merge_paths.push_back(resolve(p));
  if (auto v = r.take<double>("data.test_fraction")) cfg.test_fraction = *v;

  if (auto v = r.take<bool>("preprocess.remove_links")) cfg.preprocess.remove_links = *v;
  if (auto v = r.take<bool>("preprocess.remove_emojis")) cfg.preprocess.remove_emojis = *v;
  if (auto v = r.take<bool>("preprocess.remove_stopwords")) cfg.preprocess.remove_stopwords = *v;
  if (auto v = r.take<bool>("preprocess.stem")) cfg.preprocess.stem = *v;
  if (auto v = r.take<bool>("preprocess.lemmatize")) cfg.preprocess.lemmatize = *v;

  {
    AugmentationSetup aug;
    bool enabled = false;
    const auto ops_line = r.line_of("augment.ops");
    if (auto ops = r.take<std::string>("augment.ops")) {
      if (*ops != "none" && !ops->empty()) {
        try {
          aug.plan = parse_plan_ops(*ops);
        } catch (const Error& e) {
          throw config_error(ops_line, e.what());
        }
        enabled = true;
      }
    }
    if (auto v = r.take<double>("augment.delete_rate")) aug.plan.delete_rate = *v;
    if (auto v = r.take<double>("augment.replace_rate")) aug.plan.replace_rate = *v;
    const auto target_line = r.line_of("augment.target");
    if (auto v = r.take<std::string>("augment.target")) {
      if (*v == "sarcastic") {
        aug.policy.target_class = TargetClass::SarcasticOnly;
      } else if (*v == "both") {
        aug.policy.target_class = TargetClass::Both;
      } else {
        throw config_error(target_line, "augment.target must be \"sarcastic\" or \"both\"");
      }
    }
    if (auto v = r.take_unsigned<std::uint32_t>("augment.copies")) aug.policy.copies_per_record = *v;
    if (auto v = r.take<std::string>("augment.synonyms")) {
      if (!v->empty()) aug.synonyms_path = resolve(*v);
    }
    if (enabled) cfg.augmentation = aug;
  }

  if (auto v = r.take<std::string>("generated.path")) {
    GeneratedSetup g;
    g.path = resolve(*v);
    if (auto q = r.take_unsigned<std::size_t>("generated.per_class_quota")) g.per_class_quota = *q;
    cfg.generated = g;
  }

  if (auto v = r.take<std::string>("embedding.backend")) cfg.embedding.backend = parse_backend(*v);
  if (auto v = r.take<std::string>("embedding.semb")) {
    if (!v->empty()) cfg.embedding.semb_path = resolve(*v);
  }
  auto& w2v = cfg.embedding.word2vec;
  if (auto v = r.take_unsigned<std::size_t>("embedding.dim")) w2v.dim = *v;
  if (auto v = r.take_unsigned<std::size_t>("embedding.window")) w2v.window = *v;
  if (auto v = r.take_unsigned<std::size_t>("embedding.negatives")) w2v.negatives = *v;
  if (auto v = r.take_unsigned<std::size_t>("embedding.epochs")) w2v.epochs = *v;
  if (auto v = r.take<double>("embedding.lr")) w2v.lr = *v;

  if (auto v = r.take<double>("svm.C")) cfg.svm.C = *v;
  const auto gamma_line = r.line_of("svm.gamma");
  if (auto v = r.take_raw("svm.gamma")) {
    if (const auto* s = std::get_if<std::string>(&*v); s && *s == "scale") {
      cfg.gamma_auto = true;
    } else if (const auto* d = std::get_if<double>(&*v)) {
      cfg.gamma_auto = false;
      cfg.svm.gamma = *d;
    } else if (const auto* i = std::get_if<std::int64_t>(&*v)) {
      cfg.gamma_auto = false;
      cfg.svm.gamma = static_cast<double>(*i);
    } else {
      throw config_error(gamma_line, "svm.gamma must be a number or \"scale\"");
    }
  }
  if (auto v = r.take<double>("svm.tol")) cfg.svm.tol = *v;
  if (auto v = r.take_unsigned<std::uint32_t>("svm.max_passes")) cfg.svm.max_passes = *v;
  if (auto v = r.take_unsigned<std::uint32_t>("svm.cache_rows")) cfg.svm.cache_rows = *v;
  if (auto v = r.take_unsigned<std::uint64_t>("svm.max_iterations")) cfg.svm.max_iterations = *v;

  r.reject_leftovers();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  try {
    return parse_experiment_config(buf.str(), base);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string render_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto flag = [](bool b) { return b ? "true" : "false"; };
  out << "seed = " << cfg.seed << "\n\n[data]\n";
  out << "path = " << quoted(cfg.dataset_path.string()) << "\n";
  out << "merge = [";
  for (std::size_t i = 0; i < cfg.merge_paths.size(); ++i)
    out << (i ? ", " : "") << quoted(cfg.merge_paths[i].string());
  out << "]\n";
  out << "test_fraction = " << number(cfg.test_fraction) << "\n\n[preprocess]\n";
  out << "remove_links = " << flag(cfg.preprocess.remove_links) << "\n";
  out << "remove_emojis = " << flag(cfg.preprocess.remove_emojis) << "\n";
  out << "remove_stopwords = " << flag(cfg.preprocess.remove_stopwords) << "\n";
  out << "stem = " << flag(cfg.preprocess.stem) << "\n";
  out << "lemmatize = " << flag(cfg.preprocess.lemmatize) << "\n\n[augment]\n";
  if (cfg.augmentation) {
    const auto& a = *cfg.augmentation;
    std::string ops;
    if (a.plan.use_shuffle) ops += "shuffle";
    if (a.plan.use_delete) ops += std::string(ops.empty() ? "" : ",") + "delete";
    if (a.plan.use_replace) ops += std::string(ops.empty() ? "" : ",") + "replace";
    out << "ops = " << quoted(ops) << "\n";
    out << "delete_rate = " << number(a.plan.delete_rate) << "\n";
    out << "replace_rate = " << number(a.plan.replace_rate) << "\n";
    out << "target = " << quoted(a.policy.target_class == TargetClass::Both ? "both" : "sarcastic")
        << "\n";
    out << "copies = " << a.policy.copies_per_record << "\n";
    if (a.synonyms_path) out << "synonyms = " << quoted(a.synonyms_path->string()) << "\n";
  } else {
    out << "ops = \"none\"\n";
  }
  if (cfg.generated) {
    out << "\n[generated]\n";
    out << "path = " << quoted(cfg.generated->path.string()) << "\n";
    out << "per_class_quota = " << cfg.generated->per_class_quota << "\n";
  }
  const auto& w = cfg.embedding.word2vec;
  out << "\n[embedding]\n";
  out << "backend = " << quoted(std::string(backend_name(cfg.embedding.backend))) << "\n";
  if (cfg.embedding.semb_path) out << "semb = " << quoted(cfg.embedding.semb_path->string()) << "\n";
  out << "dim = " << w.dim << "\nwindow = " << w.window << "\nnegatives = " << w.negatives
      << "\nepochs = " << w.epochs << "\nlr = " << number(w.lr) << "\n";
  out << "\n[svm]\n";
  out << "C = " << number(cfg.svm.C) << "\n";
  out << "gamma = " << (cfg.gamma_auto ? std::string("\"scale\"") : number(cfg.svm.gamma)) << "\n";
  out << "tol = " << number(cfg.svm.tol) << "\n";
  out << "max_passes = " << cfg.svm.max_passes << "\n";
  out << "cache_rows = " << cfg.svm.cache_rows << "\n";
  if (cfg.svm.max_iterations) out << "max_iterations = " << cfg.svm.max_iterations << "\n";
  return out.str();
}

}  // namespace sarcasm

namespace sarcasm {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out.flush()) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view axis_name(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::AugmentationCombos: return "augmentation";
    case AblationAxis::PreprocessFlags: return "preprocess";
    case AblationAxis::EmbeddingBackends: return "embedding";
  }
  return "";
}

}  // namespace

RunOutcome run_to_directory(const ExperimentConfig& cfg, const RunOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec)
    throw Error(ErrorKind::Io,
                "cannot create output directory '" + options.out_dir.string() + "': " + ec.message());

  RunOutcome outcome;
  if (options.ablate) {
    outcome.reports = run_ablation(cfg, *options.ablate, options.jobs);
  } else {
    SvmModel model;
    outcome.reports.push_back(run_experiment(cfg, "run", &model));
    const auto model_path = options.out_dir / "model.svmm";
    save_model(model, model_path);
    const auto& r = outcome.reports.front();
    nlohmann::ordered_json sidecar;
    sidecar["dataset_sha256"] = file_sha256(cfg.dataset_path);
    sidecar["augmentation"] = r.augmentation;
    sidecar["preprocess"] = r.preprocess;
    sidecar["embedding_backend"] = r.backend;
    sidecar["gamma"] = r.gamma;
    sidecar["C"] = r.C;
    sidecar["support_vectors"] = r.support_vectors;
    sidecar["config_fingerprint"] = r.fingerprint;
    auto sidecar_path = model_path;
    sidecar_path += ".json";
    write_file(sidecar_path, sidecar.dump(2) + '\n');
  }

  outcome.json_path = options.out_dir / "report.json";
  outcome.csv_path = options.out_dir / "report.csv";
  outcome.manifest_path = options.out_dir / "manifest.json";
  write_file(outcome.json_path, reports_to_json(outcome.reports));
  write_file(outcome.csv_path, reports_to_csv(outcome.reports));
  write_file(options.out_dir / "config.resolved.toml", render_experiment_config(cfg));

  const auto seeds = stage_seeds(cfg.seed);
  nlohmann::ordered_json manifest;
  manifest["tool_version"] = std::string(kToolVersion);
  manifest["created_utc"] = utc_timestamp();
  manifest["config_path"] =
      options.config_path.empty() ? std::string() : std::filesystem::absolute(options.config_path).string();
  manifest["fingerprint"] = cfg.fingerprint();
  manifest["config"] = cfg.to_json();
  manifest["seeds"] = {{"root", cfg.seed},         {"split", seeds.split},
                       {"augment", seeds.augment}, {"generated", seeds.generated},
                       {"word2vec", seeds.word2vec}, {"svm", seeds.svm}};
  manifest["ablate"] = options.ablate ? nlohmann::ordered_json(std::string(axis_name(*options.ablate)))
                                      : nlohmann::ordered_json(nullptr);
  manifest["jobs"] = options.jobs;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : outcome.reports)
    rows.push_back({{"row_name", r.row_name}, {"ok", r.ok}, {"wall_time_seconds", r.wall_time_seconds}});
  manifest["rows"] = std::move(rows);
  write_file(outcome.manifest_path, manifest.dump(2) + '\n');
  return outcome;
}

}  // namespace sarcasm
