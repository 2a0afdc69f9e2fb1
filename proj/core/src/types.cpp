#include "wsa/types.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "wsa/error.hpp"

namespace wsa {

GridGeometry GridGeometry::from_image(std::uint32_t image_w, std::uint32_t image_h,
                                      std::uint16_t patch_size) {
  if (image_w == 0 || image_h == 0 || patch_size == 0) {
    throw ArgumentError("image dimensions and patch size must be positive");
  }
  const std::uint32_t gh = (image_h + patch_size - 1) / patch_size;
  const std::uint32_t gw = (image_w + patch_size - 1) / patch_size;
  if (gh > 0xFFFF || gw > 0xFFFF) {
    throw ArgumentError("patch grid exceeds 65535 cells per side");
  }
  GridGeometry g;
  g.image_w = image_w;
  g.image_h = image_h;
  g.patch_size = patch_size;
  g.grid_h = static_cast<std::uint16_t>(gh);
  g.grid_w = static_cast<std::uint16_t>(gw);
  return g;
}

void GridGeometry::validate() const {
  if (patch_size == 0 || image_w == 0 || image_h == 0) {
    throw ArgumentError("image dimensions and patch size must be positive");
  }
  const auto expect = from_image(image_w, image_h, patch_size);
  if (expect.grid_h != grid_h || expect.grid_w != grid_w) {
    throw ArgumentError("grid " + std::to_string(grid_h) + "x" + std::to_string(grid_w) +
                        " does not match image " + std::to_string(image_w) + "x" +
                        std::to_string(image_h) + " at patch size " +
                        std::to_string(patch_size));
  }
}

RowCol patch_index_to_rc(std::size_t index, const GridGeometry& g) {
  if (index >= g.num_patches()) {
    throw RangeError("patch index " + std::to_string(index) + " out of range [0, " +
                     std::to_string(g.num_patches()) + ")");
  }
  return {index / g.grid_w, index % g.grid_w};
}

std::size_t rc_to_patch_index(RowCol rc, const GridGeometry& g) {
  if (rc.row >= g.grid_h || rc.col >= g.grid_w) {
    throw RangeError("patch cell (" + std::to_string(rc.row) + "," + std::to_string(rc.col) +
                     ") outside " + std::to_string(g.grid_h) + "x" + std::to_string(g.grid_w) +
                     " grid");
  }
  return rc.row * g.grid_w + rc.col;
}

BoxPx patch_to_pixel_box(std::size_t row_min, std::size_t col_min, std::size_t row_max,
                         std::size_t col_max, const GridGeometry& g) {
  if (row_min > row_max || col_min > col_max || row_max >= g.grid_h || col_max >= g.grid_w) {
    throw RangeError("patch rectangle outside grid");
  }
  const double p = g.patch_size;
  BoxPx box;
  box.x_min = static_cast<double>(col_min) * p;
  box.y_min = static_cast<double>(row_min) * p;
  box.x_max = std::min(static_cast<double>(col_max + 1) * p, static_cast<double>(g.image_w));
  box.y_max = std::min(static_cast<double>(row_max + 1) * p, static_cast<double>(g.image_h));
  return box;
}

KeyMatrix::KeyMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}

KeyMatrix::KeyMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("key matrix payload has " + std::to_string(data_.size()) +
                     " values, expected " + std::to_string(rows_ * cols_));
  }
}

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot product of vectors with different dimensions");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

void validate_bundle(const FeatureBundle& b) {
  const auto& g = b.geometry;
  g.validate();
  const std::size_t np = g.num_patches();
  if (b.vit_keys.rows() != np) {
    throw ShapeError("vit_keys has " + std::to_string(b.vit_keys.rows()) + " rows, expected " +
                     std::to_string(np));
  }
  if (b.vit_keys.cols() == 0) {
    throw ShapeError("vit_keys has zero columns");
  }
  for (float v : b.vit_keys.data()) {
    if (!std::isfinite(v)) throw DataError("non-finite value in vit_keys");
  }
  for (std::size_t t = 0; t < b.tokens.size(); ++t) {
    const auto& tok = b.tokens[t];
    const std::string where = "token " + std::to_string(t);
    if (tok.attention_row.size() != np + 1 || tok.gradient_row.size() != np + 1) {
      throw ShapeError(where + ": attention/gradient rows must have N_P + 1 = " +
                       std::to_string(np + 1) + " entries");
    }
    if (!(tok.char_start < tok.char_end) || tok.char_end > b.caption.size()) {
      throw DataError(where + ": character span [" + std::to_string(tok.char_start) + ", " +
                      std::to_string(tok.char_end) + ") invalid for caption of " +
                      std::to_string(b.caption.size()) + " bytes");
    }
    double sum = 0.0;
    for (float a : tok.attention_row) {
      if (!std::isfinite(a)) throw DataError(where + ": non-finite attention weight");
      if (a < 0.0f || a > 1.0f) throw DataError(where + ": attention weight outside [0, 1]");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-4) {
      throw DataError(where + ": attention row sums to " + std::to_string(sum));
    }
    for (float gr : tok.gradient_row) {
      if (!std::isfinite(gr)) throw DataError(where + ": non-finite gradient value");
    }
  }
}

bool ImageId::is_numeric() const noexcept {
  if (value_.empty() || value_.size() > 18) return false;
  return std::all_of(value_.begin(), value_.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

std::strong_ordering operator<=>(const ImageId& a, const ImageId& b) {
  const bool an = a.is_numeric();
  const bool bn = b.is_numeric();
  if (an && bn) {
    const auto av = std::stoll(a.value_);
    const auto bv = std::stoll(b.value_);
    if (av != bv) return av <=> bv;
    return a.value_ <=> b.value_;
  }
  if (an != bn) return an ? std::strong_ordering::less : std::strong_ordering::greater;
  return a.value_ <=> b.value_;
}

bool detection_output_less(const Detection& a, const Detection& b) {
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.category_id != b.category_id) return a.category_id < b.category_id;
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tie(a.box.x_min, a.box.y_min, a.box.x_max, a.box.y_max) <
         std::tie(b.box.x_min, b.box.y_min, b.box.x_max, b.box.y_max);
}

void EmConfig::validate() const {
  if (max_iters < 1) throw ArgumentError("em.max_iters must be >= 1");
  if (!(tol > 0.0)) throw ArgumentError("em.tol must be > 0");
  if (!(var_floor > 0.0)) throw ArgumentError("em.var_floor must be > 0");
}

void PipelineConfig::validate() const {
  if (N < 1) throw ArgumentError("N must be >= 1");
  if (M < N) throw ArgumentError("M must be >= N");
  if (!(gamma > 0.0)) throw ArgumentError("gamma must be > 0");
  if (!(sep_factor >= 0.0)) throw ArgumentError("sep_factor must be >= 0");
  if (!(nms_conf >= 0.0 && nms_conf <= 1.0)) throw ArgumentError("nms_conf must be in [0, 1]");
  if (!(nms_iou > 0.0 && nms_iou < 1.0)) throw ArgumentError("nms_iou must be in (0, 1)");
  em.validate();
}

}  // namespace wsa
