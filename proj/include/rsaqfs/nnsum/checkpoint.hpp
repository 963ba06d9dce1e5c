#pragma once

// Versioned binary checkpoint:
//
//   magic "RSAQFSCK" | u32 version | u64 vocab size | vocab tokens
//   (u32 length + bytes each) | 5 x u64 dims | u32 tensor count |
//   per tensor: u32 name length, name, u64 rows, u64 cols, rows*cols f64
//
// Integers and doubles are stored little-endian with their exact bit
// patterns, so a save/load cycle is bit-exact.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "rsaqfs/error.hpp"
#include "rsaqfs/io.hpp"
#include "rsaqfs/nnsum/model.hpp"

namespace rsaqfs::nnsum {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

inline constexpr char kCheckpointMagic[8] = {'R', 'S', 'A', 'Q', 'F', 'S', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

class Writer {
 public:
  template <typename T>
  void pod(const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(T));
  }
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string data, std::string file) : data_(std::move(data)), file_(std::move(file)) {}

  template <typename T>
  T pod() {
    T v;
    bytes(&v, sizeof(T));
    return v;
  }
  void bytes(void* out, std::size_t n) {
    if (pos_ + n > data_.size()) throw ParseError(file_, 0, "truncated checkpoint");
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  bool done() const { return pos_ == data_.size(); }
  const std::string& file() const { return file_; }

 private:
  std::string data_;
  std::string file_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_model(const ToyModel& model) {
  detail::Writer w;
  w.bytes(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.pod(kCheckpointVersion);
  const auto& tokens = model.vocab.tokens();
  w.pod(static_cast<std::uint64_t>(tokens.size()));
  for (const auto& t : tokens) w.str(t);
  const auto& d = model.params.dims;
  for (const std::size_t v : {d.vocab, d.embed, d.hidden, d.state, d.attn}) {
    w.pod(static_cast<std::uint64_t>(v));
  }
  auto tensors = const_cast<ModelParams&>(model.params).tensors();
  w.pod(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.str(t.name);
    w.pod(static_cast<std::uint64_t>(t.rows));
    w.pod(static_cast<std::uint64_t>(t.cols));
    w.bytes(t.data, sizeof(double) * static_cast<std::size_t>(t.rows * t.cols));
  }
  return w.data();
}

inline ToyModel deserialize_model(std::string data, const std::string& file = "<checkpoint>") {
  detail::Reader r(std::move(data), file);
  char magic[sizeof(kCheckpointMagic)];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ParseError(file, 0, "not a model checkpoint");
  }
  if (const auto version = r.pod<std::uint32_t>(); version != kCheckpointVersion) {
    throw ParseError(file, 0, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto vocab_size = r.pod<std::uint64_t>();
  std::vector<std::string> tokens;
  for (std::uint64_t i = 0; i < vocab_size; ++i) tokens.push_back(r.str());
  if (tokens.size() < text::Vocabulary::kReserved) throw ParseError(file, 0, "vocabulary too small");
  ToyModel model;
  model.vocab = text::Vocabulary(
      std::vector<std::string>(tokens.begin() + text::Vocabulary::kReserved, tokens.end()));
  if (model.vocab.tokens() != tokens) throw ParseError(file, 0, "reserved symbols mismatch");
  ModelDims d;
  d.vocab = r.pod<std::uint64_t>();
  d.embed = r.pod<std::uint64_t>();
  d.hidden = r.pod<std::uint64_t>();
  d.state = r.pod<std::uint64_t>();
  d.attn = r.pod<std::uint64_t>();
  if (d.vocab != model.vocab.size()) throw ParseError(file, 0, "vocabulary/dimension mismatch");
  model.params = zeros_like(d);
  auto tensors = model.params.tensors();
  if (r.pod<std::uint32_t>() != tensors.size()) throw ParseError(file, 0, "tensor count mismatch");
  for (auto& t : tensors) {
    const std::string name = r.str();
    const auto rows = r.pod<std::uint64_t>();
    const auto cols = r.pod<std::uint64_t>();
    if (name != t.name || rows != static_cast<std::uint64_t>(t.rows) ||
        cols != static_cast<std::uint64_t>(t.cols)) {
      throw ParseError(file, 0, "unexpected tensor '" + name + "'");
    }
    r.bytes(t.data, sizeof(double) * static_cast<std::size_t>(rows * cols));
  }
  if (!r.done()) throw ParseError(file, 0, "trailing bytes after last tensor");
  return model;
}

inline void save_model(const ToyModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_model(model));
}

inline ToyModel load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("model not found: " + path.string());
  return deserialize_model(io::read_file(path), path.string());
}

}  // namespace rsaqfs::nnsum
