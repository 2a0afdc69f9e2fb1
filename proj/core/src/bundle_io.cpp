#include "wsa/bundle_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "wsa/error.hpp"

namespace wsa {
namespace {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

  void need(std::size_t n, const std::string& what) const {
    if (remaining() < n) {
      throw FormatError("truncated bundle: " + what + " needs " + std::to_string(n) +
                            " bytes, " + std::to_string(remaining()) + " left",
                        pos_);
    }
  }

  std::uint8_t u8(const std::string& what) { return static_cast<std::uint8_t>(get(1, what)); }
  std::uint16_t u16(const std::string& what) { return static_cast<std::uint16_t>(get(2, what)); }
  std::uint32_t u32(const std::string& what) { return static_cast<std::uint32_t>(get(4, what)); }

  float f32(const std::string& what) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(get(4, what)));
  }

  std::string str(std::size_t n, const std::string& what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  // Reads n float32 values, rejecting NaN/Inf.
  std::vector<float> f32_array(std::size_t n, const std::string& what) {
    if (n > remaining() / 4) need(n * 4, what);
    std::vector<float> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t at = pos_;
      v[i] = f32(what);
      if (!std::isfinite(v[i])) {
        throw DataError("non-finite float in " + what + " (at byte offset " + std::to_string(at) +
                        ")");
      }
    }
    return v;
  }

 private:
  std::uint64_t get(std::size_t n, const std::string& what) {
    need(n, what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_bundle(const FeatureBundle& b) {
  validate_bundle(b);
  const auto& g = b.geometry;
  if (b.caption.size() > 0xFFFFFFFFu) throw ArgumentError("caption too long for bundle format");
  if (b.tokens.size() > 0xFFFFFFFFu) throw ArgumentError("too many tokens for bundle format");

  ByteWriter w;
  w.bytes({kBundleMagic, 4});
  w.u32(kBundleVersion);
  w.u32(g.image_w);
  w.u32(g.image_h);
  w.u16(g.patch_size);
  w.u16(g.grid_h);
  w.u16(g.grid_w);
  w.u32(static_cast<std::uint32_t>(b.vit_keys.cols()));
  w.u32(static_cast<std::uint32_t>(b.tokens.size()));
  w.u8(b.flags);
  w.u32(static_cast<std::uint32_t>(b.caption.size()));
  w.bytes(b.caption);
  w.u16(b.provenance.l_vl);
  w.u16(b.provenance.l_vit);
  w.u8(static_cast<std::uint8_t>(b.provenance.head_reduction));
  for (float v : b.vit_keys.data()) w.f32(v);
  for (const auto& t : b.tokens) {
    if (t.text.size() > 0xFFFF) throw ArgumentError("token text longer than 65535 bytes");
    w.u16(static_cast<std::uint16_t>(t.text.size()));
    w.bytes(t.text);
    w.u32(t.char_start);
    w.u32(t.char_end);
    for (float v : t.attention_row) w.f32(v);
    for (float v : t.gradient_row) w.f32(v);
  }
  return w.take();
}

FeatureBundle decode_bundle(std::span<const std::uint8_t> bytes, bool validate) {
  ByteReader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kBundleMagic, 4) != 0) {
    throw FormatError("bad magic, expected \"WSAB\"", 0);
  }
  r.str(4, "magic");
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32("version");
  if (version != kBundleVersion) {
    throw UnsupportedVersionError("unsupported bundle version " + std::to_string(version),
                                  version_at);
  }

  FeatureBundle b;
  auto& g = b.geometry;
  g.image_w = r.u32("image_w");
  g.image_h = r.u32("image_h");
  g.patch_size = r.u16("patch_size");
  const std::size_t grid_at = r.offset();
  g.grid_h = r.u16("grid_h");
  g.grid_w = r.u16("grid_w");
  try {
    g.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("inconsistent geometry: ") + e.what(), grid_at);
  }
  if (g.num_patches() == 0) throw FormatError("empty patch grid", grid_at);

  const std::size_t d_at = r.offset();
  const std::uint32_t d_vit = r.u32("d_vit");
  if (d_vit == 0) throw FormatError("d_vit is zero", d_at);
  const std::uint32_t n_tokens = r.u32("n_tokens");
  b.flags = r.u8("flags");
  const std::uint32_t caption_len = r.u32("caption length");
  b.caption = r.str(caption_len, "caption");
  b.provenance.l_vl = r.u16("l_vl");
  b.provenance.l_vit = r.u16("l_vit");
  b.provenance.head_reduction = static_cast<HeadReduction>(r.u8("head_reduction"));

  const std::size_t np = g.num_patches();
  b.vit_keys = KeyMatrix(np, d_vit, r.f32_array(np * d_vit, "vit_keys"));

  // Each token needs at least its fixed-size fields; reject absurd counts early.
  const std::size_t min_token_bytes = 2 + 8 + 8 * (np + 1);
  if (n_tokens > r.remaining() / min_token_bytes + 1) {
    throw FormatError("declared " + std::to_string(n_tokens) + " tokens but only " +
                          std::to_string(r.remaining()) + " bytes remain",
                      r.offset());
  }
  b.tokens.reserve(n_tokens);
  for (std::uint32_t t = 0; t < n_tokens; ++t) {
    const std::string tag = "token " + std::to_string(t);
    TokenRecord tok;
    const std::uint16_t len = r.u16(tag + " text length");
    tok.text = r.str(len, tag + " text");
    tok.char_start = r.u32(tag + " char_start");
    tok.char_end = r.u32(tag + " char_end");
    tok.attention_row = r.f32_array(np + 1, tag + " attention row");
    tok.gradient_row = r.f32_array(np + 1, tag + " gradient row");
    b.tokens.push_back(std::move(tok));
  }
  if (r.remaining() != 0) {
    throw FormatError(std::to_string(r.remaining()) + " trailing bytes after last token",
                      r.offset());
  }
  if (validate) validate_bundle(b);
  return b;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw FileError("read failed for " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FileError("write failed for " + path.string());
}

void write_bundle(const FeatureBundle& b, const std::filesystem::path& path) {
  const auto bytes = encode_bundle(b);
  write_file_bytes(path, bytes);
}

FeatureBundle read_bundle(const std::filesystem::path& path, bool validate) {
  const auto bytes = read_file_bytes(path);
  return decode_bundle(bytes, validate);
}

}  // namespace wsa
