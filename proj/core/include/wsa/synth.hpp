#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wsa/types.hpp"

namespace wsa {

// Seeded generator whose draws are identical on every platform (the standard
// distributions are implementation-defined, the engine is not).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                          // [0, 1)
  double normal();                           // standard normal, Box-Muller
  std::uint64_t below(std::uint64_t bound);  // [0, bound), bound > 0
  std::int64_t between(std::int64_t lo, std::int64_t hi);  // inclusive

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Inclusive patch rectangle.
struct PatchRect {
  std::size_t row_min = 0;
  std::size_t col_min = 0;
  std::size_t row_max = 0;
  std::size_t col_max = 0;

  bool contains(std::size_t r, std::size_t c) const {
    return r >= row_min && r <= row_max && c >= col_min && c <= col_max;
  }
  bool overlaps(const PatchRect& o) const {
    return row_min <= o.row_max && o.row_min <= row_max && col_min <= o.col_max &&
           o.col_min <= col_max;
  }
  std::size_t area() const { return (row_max - row_min + 1) * (col_max - col_min + 1); }

  friend bool operator==(const PatchRect&, const PatchRect&) = default;
};

struct SynthObject {
  std::string category;
  PatchRect rect;
};

struct SynthSpec {
  std::uint16_t grid_h = 8;
  std::uint16_t grid_w = 8;
  std::uint16_t patch_size = 16;
  std::uint32_t d_vit = 64;
  std::vector<SynthObject> objects;
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;
};

struct SynthTruth {
  std::string category;
  PatchRect rect;
  BoxPx box;
  std::size_t token_index = 0;
};

struct SynthOutput {
  FeatureBundle bundle;
  std::vector<SynthTruth> truth;
};

// Planted-object bundle. Background patches carry key direction v, object j
// carries u_j with u_j . v < 0 (and u_i . u_j <= 0 for up to three objects),
// plus N(0, sigma^2) noise per component. Token j's attention concentrates on a
// few interior patches of object j and its gradient is positive only inside
// it, so its Grad-CAM peak lies strictly inside the rectangle. The caption is
// the space-joined category names. Throws ArgumentError for rectangles outside
// the grid, overlapping rectangles or d_vit < objects + 2.
SynthOutput generate_synthetic_bundle(const SynthSpec& spec);

struct CorpusSpec {
  std::size_t num_images = 10;
  std::uint16_t min_grid = 8;
  std::uint16_t max_grid = 32;
  std::size_t min_objects = 1;
  std::size_t max_objects = 3;
  double noise_sigma = 0.05;
  std::uint16_t patch_size = 16;
  std::uint32_t d_vit = 64;
  std::uint64_t seed = 1;
  std::vector<std::string> categories = {"dog",    "frisbee", "person", "boat",
                                         "ball",   "racquet", "cat",    "car"};
};

// Random per-image specs: grid sides in [min_grid, max_grid], distinct
// categories per image, rectangles separated by at least one patch.
std::vector<SynthSpec> random_corpus(const CorpusSpec& corpus);

}  // namespace wsa
