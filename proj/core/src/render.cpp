#include "wsa/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsa/bundle_io.hpp"
#include "wsa/error.hpp"

namespace wsa {

Rgb heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const auto lerp = [v](double a, double b) {
    return static_cast<std::uint8_t>(std::lround(a + (b - a) * v));
  };
  return {lerp(64, 255), lerp(64, 0), lerp(64, 0)};
}

std::vector<std::uint8_t> render_overlay_ppm(const GridGeometry& g, const Heatmap& heatmap,
                                             const std::vector<BoxPx>& boxes) {
  const std::size_t np = g.num_patches();
  if (heatmap.values.size() != np) throw ShapeError("heatmap length does not match grid");

  const auto [lo_it, hi_it] = std::minmax_element(heatmap.values.begin(), heatmap.values.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;

  const std::size_t w = g.image_w;
  const std::size_t h = g.image_h;
  std::vector<Rgb> pixels(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t p = (y / g.patch_size) * g.grid_w + x / g.patch_size;
      const double v = span > 0.0 ? (heatmap.values[p] - lo) / span : 0.5;
      pixels[y * w + x] = heat_color(v);
    }
  }

  constexpr Rgb kGreen{0, 255, 0};
  constexpr long kThickness = 2;
  for (const auto& box : boxes) {
    const long x0 = std::max(0L, static_cast<long>(std::floor(box.x_min)));
    const long y0 = std::max(0L, static_cast<long>(std::floor(box.y_min)));
    const long x1 = std::min(static_cast<long>(w), static_cast<long>(std::ceil(box.x_max)));
    const long y1 = std::min(static_cast<long>(h), static_cast<long>(std::ceil(box.y_max)));
    for (long y = y0; y < y1; ++y) {
      for (long x = x0; x < x1; ++x) {
        const bool edge = x < x0 + kThickness || x >= x1 - kThickness || y < y0 + kThickness ||
                          y >= y1 - kThickness;
        if (edge) pixels[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)] = kGreen;
      }
    }
  }

  const std::string header = "P6 " + std::to_string(w) + " " + std::to_string(h) + " 255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + pixels.size() * 3);
  for (const auto& px : pixels) {
    out.push_back(px.r);
    out.push_back(px.g);
    out.push_back(px.b);
  }
  return out;
}

void render_overlay(const FeatureBundle& bundle, const Heatmap& heatmap,
                    const std::vector<BoxPx>& boxes, const std::filesystem::path& path) {
  write_file_bytes(path, render_overlay_ppm(bundle.geometry, heatmap, boxes));
}

}  // namespace wsa
