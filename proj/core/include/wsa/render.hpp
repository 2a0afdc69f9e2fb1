#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wsa/expansion.hpp"
#include "wsa/types.hpp"

namespace wsa {

// Binary PPM (P6) overlay: each patch is filled with the min-max normalized
// heatmap value on a dark-gray-to-red ramp (a constant heatmap maps to the
// middle of the ramp) and each box is outlined 2 px wide in green.
std::vector<std::uint8_t> render_overlay_ppm(const GridGeometry& g, const Heatmap& heatmap,
                                             const std::vector<BoxPx>& boxes);

void render_overlay(const FeatureBundle& bundle, const Heatmap& heatmap,
                    const std::vector<BoxPx>& boxes, const std::filesystem::path& path);

struct Rgb {
  std::uint8_t r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Ramp color for v in [0, 1].
Rgb heat_color(double v);

}  // namespace wsa
