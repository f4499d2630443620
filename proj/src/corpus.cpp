#include "sarcasm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sarcasm/error.hpp"
#include "sarcasm/rng.hpp"

namespace sarcasm {
namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

Error row_error(std::size_t line, std::string_view field, const std::string& what) {
  return Error(ErrorKind::Parse,
               "line " + std::to_string(line) + ", field '" + std::string(field) + "': " + what);
}

TweetRecord make_record(std::string text, std::string_view label_token,
                        std::vector<std::string> types, Source source, std::size_t line) {
  Label label;
  try {
    label = parse_label(label_token);
  } catch (const Error& e) {
    throw row_error(line, "label", e.what());
  }
  if (trim(text).empty()) throw row_error(line, "text", "text is empty");
  if (label == Label::NonSarcastic && !types.empty())
    throw row_error(line, "sarcasm_types", "non-sarcastic record carries sarcasm types");
  return TweetRecord(std::move(text), label, std::move(types), source);
}

std::vector<std::string> split_types(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto bar = s.find('|', start);
    const auto piece = trim(s.substr(start, bar == std::string_view::npos ? s.npos : bar - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

// RFC 4180 reader: comma separator, double-quote quoting with "" escapes,
// quoted fields may span lines. Each row remembers its starting line.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<CsvRow> read_csv(std::string_view bytes) {
  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  std::size_t line = 1;
  const std::size_t n = bytes.size();
  while (pos < n) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool row_done = false;
    while (!row_done) {
      field.clear();
      if (pos < n && bytes[pos] == '"') {
        ++pos;
        bool closed = false;
        while (pos < n) {
          const char c = bytes[pos];
          if (c == '"') {
            if (pos + 1 < n && bytes[pos + 1] == '"') {
              field.push_back('"');
              pos += 2;
              continue;
            }
            ++pos;
            closed = true;
            break;
          }
          if (c == '\n') ++line;
          field.push_back(c);
          ++pos;
        }
        if (!closed) throw row_error(row.line, "<row>", "unterminated quoted field");
        if (pos < n && bytes[pos] != ',' && bytes[pos] != '\n' && bytes[pos] != '\r')
          throw row_error(line, "<row>", "unexpected character after closing quote");
      } else {
        while (pos < n && bytes[pos] != ',' && bytes[pos] != '\n' && bytes[pos] != '\r') {
          if (bytes[pos] == '"') throw row_error(line, "<row>", "stray quote in unquoted field");
          field.push_back(bytes[pos++]);
        }
      }
      row.fields.push_back(field);
      if (pos >= n) {
        row_done = true;
      } else if (bytes[pos] == ',') {
        ++pos;
      } else {
        if (bytes[pos] == '\r') ++pos;
        if (pos < n && bytes[pos] == '\n') ++pos;
        ++line;
        row_done = true;
      }
    }
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

Dataset parse_csv(std::string_view bytes, std::string provenance) {
  const auto rows = read_csv(bytes);
  if (rows.empty()) throw Error(ErrorKind::Parse, "empty dataset: no header row");
  const auto& header = rows.front().fields;
  auto column = [&](std::string_view name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (lower_ascii(trim(header[i])) == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };
  const auto text_col = column("text");
  const auto label_col = column("label");
  const auto types_col = column("sarcasm_types");
  if (text_col < 0) throw row_error(rows.front().line, "text", "missing header column");
  if (label_col < 0) throw row_error(rows.front().line, "label", "missing header column");

  Dataset d;
  d.provenance = std::move(provenance);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size())
      throw row_error(row.line, "<row>",
                      "expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(row.fields.size()));
    std::vector<std::string> types;
    if (types_col >= 0) types = split_types(row.fields[static_cast<std::size_t>(types_col)]);
    d.records.push_back(make_record(row.fields[static_cast<std::size_t>(text_col)],
                                    trim(row.fields[static_cast<std::size_t>(label_col)]),
                                    std::move(types), Source::Primary, row.line));
  }
  if (d.records.empty()) throw Error(ErrorKind::Parse, "empty dataset: header but no records");
  return d;
}

Source parse_source(std::string_view s, std::size_t line) {
  const auto t = lower_ascii(s);
  if (t == "primary") return Source::Primary;
  if (t == "generated") return Source::Generated;
  if (t == "merged") return Source::Merged;
  throw row_error(line, "source", "unknown source '" + std::string(s) + "'");
}

Dataset parse_jsonl(std::string_view bytes, std::string provenance) {
  Dataset d;
  d.provenance = std::move(provenance);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    auto end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    const auto line = trim(bytes.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw row_error(line_no, "<line>", std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw row_error(line_no, "<line>", "expected a JSON object");
    if (!obj.contains("text") || !obj["text"].is_string())
      throw row_error(line_no, "text", "missing or not a string");
    if (!obj.contains("label")) throw row_error(line_no, "label", "missing");

    const auto& lab = obj["label"];
    std::string label_token;
    if (lab.is_string()) {
      label_token = lab.get<std::string>();
    } else if (lab.is_number_integer()) {
      label_token = std::to_string(lab.get<long long>());
    } else {
      throw row_error(line_no, "label", "expected string or 0/1 integer");
    }

    std::vector<std::string> types;
    if (obj.contains("sarcasm_types") && !obj["sarcasm_types"].is_null()) {
      const auto& arr = obj["sarcasm_types"];
      if (!arr.is_array()) throw row_error(line_no, "sarcasm_types", "expected an array");
      for (const auto& t : arr) {
        if (!t.is_string()) throw row_error(line_no, "sarcasm_types", "expected strings");
        types.push_back(t.get<std::string>());
      }
    }
    Source source = Source::Primary;
    if (obj.contains("source")) {
      if (!obj["source"].is_string()) throw row_error(line_no, "source", "expected a string");
      source = parse_source(obj["source"].get<std::string>(), line_no);
    }
    d.records.push_back(make_record(obj["text"].get<std::string>(), label_token,
                                    std::move(types), source, line_no));
  }
  if (d.records.empty()) throw Error(ErrorKind::Parse, "empty dataset: no records");
  return d;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string_view label_name(Label label) noexcept {
  return label == Label::Sarcastic ? "sarcastic" : "non_sarcastic";
}

std::string_view source_name(Source source) noexcept {
  switch (source) {
    case Source::Primary: return "primary";
    case Source::Generated: return "generated";
    case Source::Merged: return "merged";
  }
  return "primary";
}

Label parse_label(std::string_view token) {
  const auto t = lower_ascii(trim(token));
  if (t == "sarcastic" || t == "1") return Label::Sarcastic;
  if (t == "non_sarcastic" || t == "0") return Label::NonSarcastic;
  throw Error(ErrorKind::Parse, "unknown label token '" + std::string(token) + "'");
}

FileFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = lower_ascii(path.extension().string());
  if (ext == ".csv") return FileFormat::Csv;
  if (ext == ".jsonl" || ext == ".json") return FileFormat::Jsonl;
  throw Error(ErrorKind::InvalidArgument,
              "cannot infer dataset format from '" + path.string() + "' (use .csv or .jsonl)");
}

TweetRecord::TweetRecord(std::string text, Label label, std::vector<std::string> sarcasm_types,
                         Source source)
    : text_(std::move(text)), label_(label), sarcasm_types_(std::move(sarcasm_types)),
      source_(source) {
  if (trim(text_).empty()) throw Error(ErrorKind::InvalidArgument, "tweet text is empty");
  if (label_ == Label::NonSarcastic && !sarcasm_types_.empty())
    throw Error(ErrorKind::InvalidArgument, "non-sarcastic tweet cannot carry sarcasm types");
}

TweetRecord TweetRecord::with_text(std::string text) const {
  return TweetRecord(std::move(text), label_, sarcasm_types_, source_);
}

TweetRecord TweetRecord::with_source(Source source) const {
  TweetRecord copy = *this;
  copy.source_ = source;
  return copy;
}

Dataset parse_dataset(std::string_view bytes, FileFormat format, std::string provenance) {
  return format == FileFormat::Csv ? parse_csv(bytes, std::move(provenance))
                                   : parse_jsonl(bytes, std::move(provenance));
}

Dataset load_dataset(const std::filesystem::path& path, FileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset(buf.str(), format, path.string());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, format_from_path(path));
}

std::string serialize_dataset(const Dataset& d, FileFormat format) {
  std::string out;
  if (format == FileFormat::Csv) {
    out = "text,label,sarcasm_types\n";
    for (const auto& r : d.records) {
      std::string types;
      for (std::size_t i = 0; i < r.sarcasm_types().size(); ++i) {
        if (i) types.push_back('|');
        types += r.sarcasm_types()[i];
      }
      out += csv_field(r.text()) + ',' + std::string(label_name(r.label())) + ',' +
             csv_field(types) + '\n';
    }
    return out;
  }
  for (const auto& r : d.records) {
    nlohmann::ordered_json obj;
    obj["text"] = r.text();
    obj["label"] = label_name(r.label());
    obj["sarcasm_types"] = r.sarcasm_types();
    if (r.source() != Source::Primary) obj["source"] = source_name(r.source());
    out += obj.dump() + '\n';
  }
  return out;
}

void write_dataset(const Dataset& d, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << serialize_dataset(d, format);
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorKind::InvalidArgument, "test_fraction must lie in (0, 1)");

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < d.records.size(); ++i)
    by_class[static_cast<int>(d.records[i].label())].push_back(i);
  for (int c = 0; c < 2; ++c)
    if (by_class[c].size() < 2)
      throw Error(ErrorKind::InvalidArgument,
                  "stratified split needs >= 2 records per class; class '" +
                      std::string(label_name(static_cast<Label>(c))) + "' has " +
                      std::to_string(by_class[c].size()));

  const auto round_half_up = [](double x) {
    return static_cast<std::ptrdiff_t>(std::floor(x + 0.5 + 1e-9));
  };
  std::ptrdiff_t counts[2];
  for (int c = 0; c < 2; ++c)
    counts[c] = round_half_up(test_fraction * static_cast<double>(by_class[c].size()));
  const auto target = round_half_up(test_fraction * static_cast<double>(d.size()));
  const int larger = by_class[1].size() > by_class[0].size() ? 1 : 0;
  counts[larger] += target - (counts[0] + counts[1]);
  counts[larger] = std::clamp<std::ptrdiff_t>(
      counts[larger], 0, static_cast<std::ptrdiff_t>(by_class[larger].size()));

  std::vector<bool> in_test(d.size(), false);
  Rng rng(seed);
  for (int c = 0; c < 2; ++c) {
    auto idx = by_class[c];
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
    for (std::ptrdiff_t k = 0; k < counts[c]; ++k) in_test[idx[static_cast<std::size_t>(k)]] = true;
  }

  Dataset train, test;
  train.provenance = d.provenance + " [train split]";
  test.provenance = d.provenance + " [test split]";
  for (std::size_t i = 0; i < d.size(); ++i)
    (in_test[i] ? test : train).records.push_back(d.records[i]);
  return {std::move(train), std::move(test)};
}

ClassStats class_stats(const Dataset& d) noexcept {
  ClassStats s;
  s.n_total = d.records.size();
  for (const auto& r : d.records)
    (r.label() == Label::Sarcastic ? s.n_sarcastic : s.n_non_sarcastic) += 1;
  s.sarcastic_fraction =
      s.n_total ? static_cast<double>(s.n_sarcastic) / static_cast<double>(s.n_total) : 0.0;
  return s;
}

Dataset merge_datasets(const std::vector<Dataset>& parts) {
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "merge needs at least one dataset");
  Dataset out;
  out.provenance = "merge(";
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (p) out.provenance += ", ";
    out.provenance += parts[p].provenance;
    for (const auto& r : parts[p].records)
      out.records.push_back(p == 0 ? r : r.with_source(Source::Merged));
  }
  out.provenance += ")";
  return out;
}

}  // namespace sarcasm
