#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "wsa/types.hpp"

namespace wsa {

// Binary feature bundle, little-endian throughout:
//
//   "WSAB"                      magic
//   u32 version                 currently 1
//   u32 image_w, u32 image_h
//   u16 patch_size, u16 grid_h, u16 grid_w
//   u32 d_vit, u32 n_tokens
//   u8  flags                   bit0 reserved
//   u32 caption_len, caption bytes (UTF-8)
//   u16 l_vl, u16 l_vit, u8 head_reduction
//   f32 keys[grid_h * grid_w * d_vit]           row = patch index
//   per token:
//     u16 text_len, text bytes
//     u32 char_start, u32 char_end
//     f32 attention[N_P + 1], f32 gradient[N_P + 1]
inline constexpr std::uint32_t kBundleVersion = 1;
inline constexpr char kBundleMagic[4] = {'W', 'S', 'A', 'B'};
inline constexpr const char* kBundleExtension = ".wsab";

std::vector<std::uint8_t> encode_bundle(const FeatureBundle& b);

// Throws FormatError (with byte offset) for bad magic, truncation, trailing
// bytes or inconsistent geometry; UnsupportedVersionError for other versions;
// DataError for non-finite payloads. With `validate`, the full FeatureBundle
// invariants are checked as well.
FeatureBundle decode_bundle(std::span<const std::uint8_t> bytes, bool validate = true);

void write_bundle(const FeatureBundle& b, const std::filesystem::path& path);
FeatureBundle read_bundle(const std::filesystem::path& path, bool validate = true);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace wsa
