#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "wsa/metrics.hpp"
#include "wsa/synth.hpp"
#include "wsa/types.hpp"

namespace wsa::test {

inline GridGeometry grid(std::uint16_t gh, std::uint16_t gw, std::uint16_t p = 16) {
  return GridGeometry::from_image(static_cast<std::uint32_t>(gw) * p,
                                  static_cast<std::uint32_t>(gh) * p, p);
}

inline BoxPx box(double x0, double y0, double x1, double y1) { return {x0, y0, x1, y1}; }

// Token whose attention is uniform and whose gradient row is given (CLS first).
inline TokenRecord token_with_gradient(std::string text, std::uint32_t start,
                                       std::vector<float> gradient) {
  TokenRecord t;
  t.text = std::move(text);
  t.char_start = start;
  t.char_end = start + static_cast<std::uint32_t>(t.text.size());
  t.attention_row.assign(gradient.size(), 1.0f / static_cast<float>(gradient.size()));
  t.gradient_row = std::move(gradient);
  return t;
}

inline FeatureBundle random_bundle(PortableRng& rng) {
  FeatureBundle b;
  const auto gh = static_cast<std::uint16_t>(rng.between(1, 6));
  const auto gw = static_cast<std::uint16_t>(rng.between(1, 6));
  const auto p = static_cast<std::uint16_t>(rng.between(1, 20));
  const auto w = static_cast<std::uint32_t>((gw - 1) * p + rng.between(1, p));
  const auto h = static_cast<std::uint32_t>((gh - 1) * p + rng.between(1, p));
  b.geometry = GridGeometry::from_image(w, h, p);
  const std::size_t np = b.geometry.num_patches();
  const auto d = static_cast<std::size_t>(rng.between(1, 9));
  std::vector<float> keys(np * d);
  for (auto& k : keys) k = static_cast<float>(rng.normal());
  b.vit_keys = KeyMatrix(np, d, std::move(keys));

  const auto ntok = static_cast<std::size_t>(rng.between(0, 4));
  for (std::size_t t = 0; t < ntok; ++t) {
    TokenRecord tok;
    tok.text = "w" + std::to_string(t);
    if (!b.caption.empty()) b.caption += ' ';
    tok.char_start = static_cast<std::uint32_t>(b.caption.size());
    b.caption += tok.text;
    tok.char_end = static_cast<std::uint32_t>(b.caption.size());
    std::vector<double> logits(np + 1);
    for (auto& l : logits) l = rng.normal();
    double z = 0.0;
    for (double l : logits) z += std::exp(l);
    for (double l : logits) tok.attention_row.push_back(static_cast<float>(std::exp(l) / z));
    for (std::size_t i = 0; i <= np; ++i) tok.gradient_row.push_back(static_cast<float>(rng.normal()));
    b.tokens.push_back(std::move(tok));
  }
  b.provenance.l_vl = static_cast<std::uint16_t>(rng.below(24));
  b.provenance.l_vit = static_cast<std::uint16_t>(rng.below(24));
  b.provenance.head_reduction = rng.below(2) ? HeadReduction::max : HeadReduction::mean;
  b.flags = static_cast<std::uint8_t>(rng.below(256));
  return b;
}

// ---- independent oracles ------------------------------------------------------

inline std::vector<double> softmax_oracle(const std::vector<double>& logits) {
  std::vector<double> e;
  double z = 0.0;
  for (double l : logits) {
    e.push_back(std::exp(l));
    z += e.back();
  }
  for (double& v : e) v /= z;
  return e;
}

inline double log_normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * 3.14159265358979323846);
}

// Bisection on the log-density difference over (lo, hi).
inline double bisect_crossover(double mu_b, double sb, double mu_o, double so) {
  auto f = [&](double x) { return log_normal_pdf(x, mu_b, sb) - log_normal_pdf(x, mu_o, so); };
  double lo = mu_b, hi = mu_o;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(lo) > 0) == (f(mid) > 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double mean_oracle(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline double pop_std_oracle(const std::vector<double>& v) {
  const double m = mean_oracle(v);
  long double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(static_cast<double>(s / static_cast<long double>(v.size())));
}

inline double iou_oracle(const BoxPx& a, const BoxPx& b) {
  const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

// AP by enumerating every cutoff k of the ranked list: interpolated precision
// at k is the best precision at any cutoff j >= k, and each TP adds 1/num_gt
// of recall at that precision.
inline double brute_force_ap(const std::vector<Detection>& dets, const GroundTruthSet& gt,
                             std::int64_t cls, double thr) {
  std::vector<Detection> ranked;
  for (const auto& d : dets) {
    if (d.category_id == cls) ranked.push_back(d);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.box.x_min < b.box.x_min;
  });
  std::size_t num_gt = 0;
  std::vector<std::pair<ImageId, BoxPx>> gts;
  for (const auto& [img, boxes] : gt.images) {
    for (const auto& g : boxes) {
      if (g.category_id == cls) gts.emplace_back(img, g.box);
    }
  }
  num_gt = gts.size();
  std::vector<bool> used(gts.size(), false);
  std::vector<int> tp(ranked.size(), 0);
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    double best = -1.0;
    std::size_t best_j = gts.size();
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (used[j] || !(gts[j].first == ranked[k].image_id)) continue;
      const double v = iou_oracle(ranked[k].box, gts[j].second);
      if (v >= thr && v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best_j < gts.size()) {
      used[best_j] = true;
      tp[k] = 1;
    }
  }
  auto hits_at = [&](std::size_t k) {
    return std::accumulate(tp.begin(), tp.begin() + static_cast<long>(k + 1), 0);
  };
  double ap = 0.0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (!tp[k]) continue;
    double interp = 0.0;
    for (std::size_t j = k; j < ranked.size(); ++j) {
      interp = std::max(interp, static_cast<double>(hits_at(j)) / static_cast<double>(j + 1));
    }
    const double r_now = static_cast<double>(hits_at(k)) / static_cast<double>(num_gt);
    const double r_before = static_cast<double>(hits_at(k) - 1) / static_cast<double>(num_gt);
    ap += (r_now - r_before) * interp;
  }
  return ap;
}

// Exhaustive suppressor: a box survives iff no surviving box ranked ahead of
// it in the same (image, class) overlaps it above the threshold.
inline std::vector<Detection> reference_nms(const std::vector<Detection>& dets, double conf,
                                            double thr) {
  std::vector<Detection> v;
  for (const auto& d : dets) {
    if (d.confidence >= conf) v.push_back(d);
  }
  std::sort(v.begin(), v.end(), detection_output_less);
  std::vector<bool> keep(v.size(), true);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (keep[j] && v[j].image_id == v[i].image_id && v[j].category_id == v[i].category_id &&
          iou_oracle(v[j].box, v[i].box) > thr) {
        keep[i] = false;
        break;
      }
    }
  }
  std::vector<Detection> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (keep[i]) out.push_back(v[i]);
  }
  return out;
}

inline BoxPx random_box(PortableRng& rng, double extent = 100.0) {
  const double x0 = std::floor(rng.uniform() * extent);
  const double y0 = std::floor(rng.uniform() * extent);
  const double w = 1.0 + std::floor(rng.uniform() * extent * 0.5);
  const double h = 1.0 + std::floor(rng.uniform() * extent * 0.5);
  return {x0, y0, x0 + w, y0 + h};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("wsa_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace wsa::test
