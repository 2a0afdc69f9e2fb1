#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wsa {

struct RowCol {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const RowCol&, const RowCol&) = default;
};

// Patch tessellation of an image. Edge patches may extend past the image when
// the dimensions are not multiples of patch_size; clipping happens when
// converting back to pixels.
struct GridGeometry {
  std::uint32_t image_w = 0;
  std::uint32_t image_h = 0;
  std::uint16_t patch_size = 0;
  std::uint16_t grid_h = 0;
  std::uint16_t grid_w = 0;

  // Derives grid_h/grid_w by ceiling division. Throws ArgumentError on zero sizes.
  static GridGeometry from_image(std::uint32_t image_w, std::uint32_t image_h,
                                 std::uint16_t patch_size);

  std::size_t num_patches() const noexcept {
    return static_cast<std::size_t>(grid_h) * grid_w;
  }

  // Throws ArgumentError if the grid does not match ceil(image / patch).
  void validate() const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

RowCol patch_index_to_rc(std::size_t index, const GridGeometry& g);
std::size_t rc_to_patch_index(RowCol rc, const GridGeometry& g);

// Half-open pixel box [x_min, x_max) x [y_min, y_max).
struct BoxPx {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  bool valid() const noexcept { return x_min < x_max && y_min < y_max; }

  friend bool operator==(const BoxPx&, const BoxPx&) = default;
};

// Pixel box covering the inclusive patch range, clipped to the image.
BoxPx patch_to_pixel_box(std::size_t row_min, std::size_t col_min, std::size_t row_max,
                         std::size_t col_max, const GridGeometry& g);

// Row-major float matrix, one row per patch. Stored at export precision.
class KeyMatrix {
 public:
  KeyMatrix() = default;
  KeyMatrix(std::size_t rows, std::size_t cols);
  KeyMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const float> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<float>& data() const noexcept { return data_; }

  friend bool operator==(const KeyMatrix&, const KeyMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

// Double-precision dot product of two key rows.
double dot(std::span<const float> a, std::span<const float> b);

struct TokenRecord {
  std::string text;
  std::uint32_t char_start = 0;
  std::uint32_t char_end = 0;
  // Both rows have N_P + 1 entries; index 0 is the [CLS] slot.
  std::vector<float> attention_row;
  std::vector<float> gradient_row;

  friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

enum class HeadReduction : std::uint8_t {
  mean = 0,
  max = 1,
  unspecified = 255,
};

struct Provenance {
  std::uint16_t l_vl = 8;
  std::uint16_t l_vit = 11;
  HeadReduction head_reduction = HeadReduction::mean;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct FeatureBundle {
  GridGeometry geometry;
  std::string caption;
  std::vector<TokenRecord> tokens;
  KeyMatrix vit_keys;
  Provenance provenance;
  std::uint8_t flags = 0;

  friend bool operator==(const FeatureBundle&, const FeatureBundle&) = default;
};

// Checks every FeatureBundle invariant: grid math, row lengths, key row count,
// character spans, finiteness and softmax normalization of attention rows.
// Throws ShapeError for length mismatches and DataError for value violations.
void validate_bundle(const FeatureBundle& b);

// Opaque image identifier. Purely numeric ids order numerically and serialize
// as JSON integers; anything else orders after them lexicographically.
class ImageId {
 public:
  ImageId() = default;
  explicit ImageId(std::string value) : value_(std::move(value)) {}
  explicit ImageId(std::int64_t value) : value_(std::to_string(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool is_numeric() const noexcept;

  friend bool operator==(const ImageId& a, const ImageId& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const ImageId& a, const ImageId& b);

 private:
  std::string value_;
};

struct Detection {
  BoxPx box;
  std::int64_t category_id = 0;
  double confidence = 0.0;
  ImageId image_id;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Output order used by every file the tools write:
// (image_id asc, category_id asc, confidence desc, x_min asc, y_min asc, x_max asc, y_max asc).
bool detection_output_less(const Detection& a, const Detection& b);

struct EmConfig {
  int max_iters = 200;
  double tol = 1e-8;
  double var_floor = 1e-8;

  void validate() const;
};

struct PipelineConfig {
  int N = 3;
  int M = 10;
  double gamma = 1.75;
  double sep_factor = 1.5;
  double nms_conf = 0.2;
  double nms_iou = 0.5;
  // Weight the crossover densities by the mixture weights.
  bool weighted_crossover = false;
  // Drop stop words from phrase heatmap sums.
  bool stop_word_filter = false;
  EmConfig em;

  void validate() const;
};

}  // namespace wsa
