// SVMM model files: little-endian, fixed layout.
//
//   "SVMM" | u16 version
//   f64 C | f64 gamma | f64 tol | u32 max_passes | u64 seed | u32 cache_rows
//   f64 bias | u64 dim | u64 support_count
//   per support vector:
//     i8 label | f64 alpha | u64 training_index | u8 kind (0 dense, 1 sparse)
//     dense:  dim x f64
//     sparse: u64 nnz, nnz x (u32 index, f64 value)

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sarcasm/error.hpp"
#include "sarcasm/svm.hpp"

namespace sarcasm {
namespace {

constexpr char kMagic[4] = {'S', 'V', 'M', 'M'};
constexpr std::uint16_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void uint(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
      out_.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T uint() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::string_view raw(std::size_t n) {
    need(n);
    const auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::Parse, "SVMM: truncated model file");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_model(const SvmModel& m) {
  Writer w;
  w.raw(kMagic, 4);
  w.uint<std::uint16_t>(kVersion);
  w.f64(m.config.C);
  w.f64(m.config.gamma);
  w.f64(m.config.tol);
  w.uint<std::uint32_t>(m.config.max_passes);
  w.uint<std::uint64_t>(m.config.seed);
  w.uint<std::uint32_t>(m.config.cache_rows);
  w.f64(m.bias);
  w.uint<std::uint64_t>(m.dim);
  w.uint<std::uint64_t>(m.support_count());
  for (std::size_t s = 0; s < m.support_count(); ++s) {
    w.uint<std::uint8_t>(static_cast<std::uint8_t>(static_cast<std::int8_t>(m.labels[s])));
    w.f64(m.alphas[s]);
    w.uint<std::uint64_t>(m.support_indices[s]);
    const auto& v = m.support_vectors[s];
    w.uint<std::uint8_t>(v.is_sparse() ? 1 : 0);
    if (v.is_sparse()) {
      w.uint<std::uint64_t>(v.entries().size());
      for (const auto& e : v.entries()) {
        w.uint<std::uint32_t>(e.index);
        w.f64(e.value);
      }
    } else {
      for (double x : v.values()) w.f64(x);
    }
  }
  return w.take();
}

SvmModel decode_model(std::string_view bytes) {
  Reader r(bytes);
  if (r.raw(4) != std::string_view(kMagic, 4)) throw Error(ErrorKind::Parse, "SVMM: bad magic");
  if (const auto v = r.uint<std::uint16_t>(); v != kVersion)
    throw Error(ErrorKind::Parse, "SVMM: unsupported version " + std::to_string(v));
  SvmModel m;
  m.config.C = r.f64();
  m.config.gamma = r.f64();
  m.config.tol = r.f64();
  m.config.max_passes = r.uint<std::uint32_t>();
  m.config.seed = r.uint<std::uint64_t>();
  m.config.cache_rows = r.uint<std::uint32_t>();
  m.bias = r.f64();
  m.dim = r.uint<std::uint64_t>();
  const auto count = r.uint<std::uint64_t>();
  for (std::uint64_t s = 0; s < count; ++s) {
    const auto label = static_cast<std::int8_t>(r.uint<std::uint8_t>());
    if (label != 1 && label != -1) throw Error(ErrorKind::Parse, "SVMM: bad label");
    m.labels.push_back(label);
    m.alphas.push_back(r.f64());
    m.support_indices.push_back(r.uint<std::uint64_t>());
    const auto kind = r.uint<std::uint8_t>();
    if (kind == 1) {
      const auto nnz = r.uint<std::uint64_t>();
      std::vector<SparseEntry> entries;
      for (std::uint64_t k = 0; k < nnz; ++k) {
        const auto index = r.uint<std::uint32_t>();
        entries.push_back({index, r.f64()});
      }
      m.support_vectors.push_back(Vector::sparse(m.dim, std::move(entries)));
    } else if (kind == 0) {
      std::vector<double> values(m.dim);
      for (auto& x : values) x = r.f64();
      m.support_vectors.push_back(Vector::dense(std::move(values)));
    } else {
      throw Error(ErrorKind::Parse, "SVMM: unknown vector kind");
    }
  }
  if (!r.done()) throw Error(ErrorKind::Parse, "SVMM: trailing bytes");
  return m;
}

void save_model(const SvmModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  const auto bytes = encode_model(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open model '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_model(buf.str());
}

}  // namespace sarcasm
