#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "sarcasm/embed.hpp"
#include "sarcasm/hash.hpp"

namespace sarcasm {
namespace {

constexpr char kMagic[4] = {'S', 'E', 'M', 'B'};
constexpr std::size_t kHeaderSize = 4 + 2 + 4 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t pos) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  return static_cast<T>(v);
}

std::uint32_t float_bits(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  return bits;
}

float bits_float(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

}  // namespace

std::string nfc_normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorKind::Runtime, "ICU NFC normalizer unavailable");
  const auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString normalized = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw Error(ErrorKind::Runtime, "NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

TextKey text_key(std::string_view text) {
  const auto digest = sha256(nfc_normalize(text));
  TextKey key;
  std::memcpy(key.data(), digest.data(), key.size());
  return key;
}

void SentenceEmbeddingTable::insert(const TextKey& key, std::vector<float> row) {
  if (row.size() != dim_)
    throw Error(ErrorKind::InvalidArgument, "embedding row has dim " + std::to_string(row.size()) +
                                                ", table dim is " + std::to_string(dim_));
  rows_.insert_or_assign(key, std::move(row));
}

void SentenceEmbeddingTable::insert_text(std::string_view text, std::vector<float> row) {
  insert(text_key(text), std::move(row));
}

const std::vector<float>* SentenceEmbeddingTable::find(const TextKey& key) const {
  const auto it = rows_.find(key);
  return it == rows_.end() ? nullptr : &it->second;
}

const std::vector<float>* SentenceEmbeddingTable::find_text(std::string_view text) const {
  return find(text_key(text));
}

std::vector<std::pair<TextKey, const std::vector<float>*>> SentenceEmbeddingTable::sorted_rows()
    const {
  std::vector<std::pair<TextKey, const std::vector<float>*>> out;
  out.reserve(rows_.size());
  for (const auto& [k, v] : rows_) out.emplace_back(k, &v);
  return out;
}

std::string encode_embedding_file(const SentenceEmbeddingTable& table) {
  std::string out(kMagic, sizeof kMagic);
  put_le<std::uint16_t>(out, kSembVersion);
  put_le<std::uint32_t>(out, table.dim());
  put_le<std::uint64_t>(out, table.size());
  for (const auto& [key, row] : table.sorted_rows()) {
    out.append(reinterpret_cast<const char*>(key.data()), key.size());
    for (float f : *row) put_le<std::uint32_t>(out, float_bits(f));
  }
  return out;
}

SentenceEmbeddingTable decode_embedding_file(std::string_view bytes,
                                             std::optional<std::uint32_t> expected_dim) {
  if (bytes.size() < 4)
    throw SembFormatError(SembErrorReason::Truncated, "SEMB: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw SembFormatError(SembErrorReason::BadMagic, "SEMB: bad magic bytes");
  if (bytes.size() < kHeaderSize)
    throw SembFormatError(SembErrorReason::Truncated, "SEMB: truncated header");
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kSembVersion)
    throw SembFormatError(SembErrorReason::UnsupportedVersion,
                          "SEMB: unsupported format version " + std::to_string(version));
  const auto dim = get_le<std::uint32_t>(bytes, 6);
  const auto rows = get_le<std::uint64_t>(bytes, 10);
  if (dim == 0) throw SembFormatError(SembErrorReason::DimMismatch, "SEMB: header dim is 0");
  if (expected_dim && *expected_dim != dim)
    throw SembFormatError(SembErrorReason::DimMismatch,
                          "SEMB: header dim " + std::to_string(dim) + " disagrees with expected " +
                              std::to_string(*expected_dim));

  const std::uint64_t row_bytes = 8 + 4ULL * dim;
  const std::uint64_t payload = bytes.size() - kHeaderSize;
  if (rows > payload / row_bytes || payload < rows * row_bytes)
    throw SembFormatError(SembErrorReason::Truncated,
                          "SEMB: payload holds " + std::to_string(payload) + " bytes, " +
                              std::to_string(rows) + " rows of dim " + std::to_string(dim) +
                              " need " + std::to_string(rows * row_bytes));
  if (payload != rows * row_bytes)
    throw SembFormatError(SembErrorReason::TrailingBytes, "SEMB: trailing bytes after last row");

  SentenceEmbeddingTable table(dim);
  std::size_t pos = kHeaderSize;
  for (std::uint64_t r = 0; r < rows; ++r) {
    TextKey key;
    std::memcpy(key.data(), bytes.data() + pos, key.size());
    pos += key.size();
    std::vector<float> row(dim);
    for (auto& f : row) {
      f = bits_float(get_le<std::uint32_t>(bytes, pos));
      pos += 4;
    }
    table.insert(key, std::move(row));
  }
  return table;
}

void write_embedding_file(const SentenceEmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  const auto bytes = encode_embedding_file(table);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

SentenceEmbeddingTable load_embedding_file(const std::filesystem::path& path,
                                           std::optional<std::uint32_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open embedding file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();

  auto manifest_path = path;
  manifest_path += ".manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream mf(manifest_path);
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(mf);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, manifest_path.string() + ": " + e.what());
    }
    if (manifest.contains("dim") && manifest["dim"].is_number_unsigned()) {
      const auto dim = manifest["dim"].get<std::uint32_t>();
      if (expected_dim && *expected_dim != dim)
        throw SembFormatError(SembErrorReason::DimMismatch,
                              "SEMB manifest dim " + std::to_string(dim) +
                                  " disagrees with expected " + std::to_string(*expected_dim));
      expected_dim = dim;
    }
  }
  try {
    return decode_embedding_file(buf.str(), expected_dim);
  } catch (const SembFormatError& e) {
    throw SembFormatError(e.reason(), path.string() + ": " + e.what());
  }
}

Vector sentence_vector(const SentenceBackend& backend, const TokenList& doc) {
  if (const auto* tfidf = std::get_if<const TfidfModel*>(&backend))
    return tfidf_vector(**tfidf, doc).densified();

  const WordEmbeddings& emb = *std::get<const WordEmbeddings*>(backend);
  // Accumulate in vocabulary order so the mean is bit-identical under any
  // permutation of the tokens.
  std::map<std::uint32_t, std::size_t> counts;
  std::size_t hits = 0;
  for (const auto& t : doc) {
    if (const auto it = emb.vocabulary.find(t); it != emb.vocabulary.end()) {
      ++counts[it->second];
      ++hits;
    }
  }
  std::vector<double> sum(emb.dim, 0.0);
  for (const auto& [index, count] : counts) {
    const auto row = emb.row(index);
    for (std::size_t i = 0; i < emb.dim; ++i) sum[i] += static_cast<double>(count) * row[i];
  }
  if (hits > 0)
    for (auto& x : sum) x /= static_cast<double>(hits);
  return Vector::dense(std::move(sum));
}

}  // namespace sarcasm
