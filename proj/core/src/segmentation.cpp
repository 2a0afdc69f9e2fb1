#include "wsa/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsa/error.hpp"

namespace wsa {
namespace {

// log N_b(t) - log N_o(t), plus log(w_b / w_o) when weighted.
double log_density_gap(const GmmParams& p, double t, bool weighted) {
  const double zb = (t - p.mu_b) / p.sigma_b;
  const double zo = (t - p.mu_o) / p.sigma_o;
  double gap = -0.5 * zb * zb - std::log(p.sigma_b) + 0.5 * zo * zo + std::log(p.sigma_o);
  if (weighted) gap += std::log(p.w_b) - std::log(p.w_o);
  return gap;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

bool separation_test(const GmmParams& p, double sep_factor) {
  return p.mu_b + sep_factor * p.sigma_b < p.mu_o - sep_factor * p.sigma_o;
}

namespace detail {

double solve_crossover_quadratic(const GmmParams& p, bool weighted) {
  if (!(p.mu_b < p.mu_o)) throw CrossoverMissError("component means are not ordered");
  // Multiply the log-density equality by -2:
  // a t^2 + b t + c = 0 with
  const double ib = 1.0 / (p.sigma_b * p.sigma_b);
  const double io = 1.0 / (p.sigma_o * p.sigma_o);
  const double a = ib - io;
  const double b = -2.0 * (p.mu_b * ib - p.mu_o * io);
  double c = p.mu_b * p.mu_b * ib - p.mu_o * p.mu_o * io + 2.0 * std::log(p.sigma_b / p.sigma_o);
  if (weighted) c -= 2.0 * std::log(p.w_b / p.w_o);

  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) {
        roots.push_back(q / a);
        roots.push_back(c / q);
      } else {
        roots.push_back(-b / (2.0 * a));
      }
    }
  }

  const double mid = 0.5 * (p.mu_b + p.mu_o);
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double r : roots) {
    if (r > p.mu_b && r < p.mu_o && (std::isnan(best) || std::abs(r - mid) < std::abs(best - mid))) {
      best = r;
    }
  }
  if (std::isnan(best)) {
    throw CrossoverMissError("density crossover has no root inside (mu_b, mu_o)");
  }

  // Newton refinement on the log-density gap; only accepted if it improves.
  for (int i = 0; i < 3; ++i) {
    const double f = log_density_gap(p, best, weighted);
    const double df = -(best - p.mu_b) * ib + (best - p.mu_o) * io;
    if (f == 0.0 || df == 0.0) break;
    const double cand = best - f / df;
    if (!(cand > p.mu_b && cand < p.mu_o)) break;
    if (std::abs(log_density_gap(p, cand, weighted)) >= std::abs(f)) break;
    best = cand;
  }
  return best;
}

}  // namespace detail

double solve_crossover(const GmmParams& p, bool weighted) {
  if (!(p.mu_b < p.mu_o)) throw CrossoverMissError("component means are not ordered");
  if (!weighted && p.sigma_b == p.sigma_o) return 0.5 * (p.mu_b + p.mu_o);
  return detail::solve_crossover_quadratic(p, weighted);
}

double fallback_threshold(std::span<const double> values, double gamma) {
  if (values.empty()) throw ArgumentError("fallback threshold of empty heatmap");
  const double mu = mean_of(values);
  return mu + gamma * population_std(values, mu);
}

ThresholdResult compute_threshold(const Heatmap& h, const PipelineConfig& cfg) {
  const auto& v = h.values;
  if (v.empty()) throw ArgumentError("empty heatmap");
  for (double x : v) {
    if (!std::isfinite(x)) throw DataError("non-finite heatmap value");
  }

  ThresholdResult out;
  out.mu = mean_of(v);
  out.sigma = population_std(v, out.mu);

  // The mixture is fit on the standardized heatmap so the result does not
  // depend on the heatmap's scale or offset; parameters are mapped back.
  if (v.size() >= 4 && out.sigma > 0.0) {
    std::vector<double> z(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) z[i] = (v[i] - out.mu) / out.sigma;
    try {
      const GmmParams pz = fit_gmm_1d(z, cfg.em);
      GmmParams p = pz;
      p.mu_b = out.mu + out.sigma * pz.mu_b;
      p.mu_o = out.mu + out.sigma * pz.mu_o;
      p.sigma_b = out.sigma * pz.sigma_b;
      p.sigma_o = out.sigma * pz.sigma_o;
      out.params = p;
      if (separation_test(pz, cfg.sep_factor)) {
        const double tz = solve_crossover(pz, cfg.weighted_crossover);
        out.t = out.mu + out.sigma * tz;
        out.source = ThresholdSource::crossover;
        return out;
      }
    } catch (const DegenerateInputError&) {
    } catch (const CrossoverMissError&) {
    }
  }

  out.source = ThresholdSource::fallback;
  out.t = out.mu + cfg.gamma * out.sigma;
  return out;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

Mask threshold_heatmap(const Heatmap& h, double t) {
  Mask m;
  m.bits.resize(h.values.size());
  for (std::size_t i = 0; i < h.values.size(); ++i) m.bits[i] = h.values[i] >= t;
  return m;
}

Mask segment_containing(const Mask& mask, std::size_t seed, const GridGeometry& g) {
  const std::size_t np = g.num_patches();
  if (mask.bits.size() != np) {
    throw ShapeError("mask has " + std::to_string(mask.bits.size()) + " cells, grid has " +
                     std::to_string(np));
  }
  if (seed >= np) throw RangeError("segment seed outside grid");

  Mask out;
  out.bits.assign(np, false);
  std::vector<std::size_t> stack{seed};
  out.bits[seed] = true;
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    const std::size_t r = cur / g.grid_w;
    const std::size_t c = cur % g.grid_w;
    const auto visit = [&](std::size_t idx) {
      if (mask.bits[idx] && !out.bits[idx]) {
        out.bits[idx] = true;
        stack.push_back(idx);
      }
    };
    if (r > 0) visit(cur - g.grid_w);
    if (r + 1 < g.grid_h) visit(cur + g.grid_w);
    if (c > 0) visit(cur - 1);
    if (c + 1 < g.grid_w) visit(cur + 1);
  }
  return out;
}

namespace {

BoxPx enclose(const Mask& segment, const GridGeometry& g) {
  std::size_t r0 = g.grid_h, c0 = g.grid_w, r1 = 0, c1 = 0;
  for (std::size_t i = 0; i < segment.bits.size(); ++i) {
    if (!segment.bits[i]) continue;
    const std::size_t r = i / g.grid_w;
    const std::size_t c = i % g.grid_w;
    r0 = std::min(r0, r);
    c0 = std::min(c0, c);
    r1 = std::max(r1, r);
    c1 = std::max(c1, c);
  }
  return patch_to_pixel_box(r0, c0, r1, c1, g);
}

}  // namespace

BoxPx extract_box(const Mask& mask, const InitialSeed& s, const GridGeometry& g) {
  return enclose(segment_containing(mask, s.patch_index, g), g);
}

Segmentation segment_heatmap(const Heatmap& h, std::size_t seed_patch, const GridGeometry& g,
                             const PipelineConfig& cfg) {
  if (h.values.size() != g.num_patches()) {
    throw ShapeError("heatmap length does not match grid");
  }
  Segmentation out;
  out.threshold = compute_threshold(h, cfg);
  out.mask = threshold_heatmap(h, out.threshold.t);
  out.segment = segment_containing(out.mask, seed_patch, g);
  out.box = enclose(out.segment, g);
  return out;
}

}  // namespace wsa
