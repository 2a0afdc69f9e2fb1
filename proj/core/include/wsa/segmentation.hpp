#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wsa/expansion.hpp"
#include "wsa/gmm.hpp"
#include "wsa/gradcam.hpp"
#include "wsa/types.hpp"

namespace wsa {

// True when the components are far enough apart for the density crossover:
// mu_b + f * sigma_b < mu_o - f * sigma_o.
bool separation_test(const GmmParams& p, double sep_factor);

// Solves N(t; mu_b, sigma_b) = N(t; mu_o, sigma_o) for mu_b < t < mu_o. Equal
// sigmas take the closed-form midpoint. With `weighted` the mixture weights
// scale the densities. Throws CrossoverMissError when no root lies strictly
// between the means.
double solve_crossover(const GmmParams& p, bool weighted = false);

namespace detail {
// General quadratic route, used by solve_crossover for unequal sigmas.
// Reduces to the linear equation when the sigmas coincide.
double solve_crossover_quadratic(const GmmParams& p, bool weighted);
}  // namespace detail

// mean(values) + gamma * population_std(values).
double fallback_threshold(std::span<const double> values, double gamma);

enum class ThresholdSource { crossover, fallback };

struct ThresholdResult {
  double t = 0.0;
  ThresholdSource source = ThresholdSource::fallback;
  std::optional<GmmParams> params;  // heatmap units, present whenever the fit succeeded
  double mu = 0.0;                  // heatmap mean
  double sigma = 0.0;               // heatmap population std
};

// Fits the GMM and uses the crossover when the fit succeeds, the components
// pass the separation test and a root exists; otherwise t = mu + gamma * sigma.
// Throws DataError for non-finite heatmaps.
ThresholdResult compute_threshold(const Heatmap& h, const PipelineConfig& cfg);

struct Mask {
  std::vector<bool> bits;

  std::size_t count() const;
  friend bool operator==(const Mask&, const Mask&) = default;
};

// bits_i = h_i >= t.
Mask threshold_heatmap(const Heatmap& h, double t);

// 4-connected component of `mask` containing `seed`; the seed cell is forced on.
Mask segment_containing(const Mask& mask, std::size_t seed, const GridGeometry& g);

// Pixel box enclosing segment_containing(mask, s).
BoxPx extract_box(const Mask& mask, const InitialSeed& s, const GridGeometry& g);

struct Segmentation {
  ThresholdResult threshold;
  Mask mask;
  Mask segment;
  BoxPx box;
};

// Threshold, mask, segment and box in one pass.
Segmentation segment_heatmap(const Heatmap& h, std::size_t seed_patch, const GridGeometry& g,
                             const PipelineConfig& cfg);

}  // namespace wsa
