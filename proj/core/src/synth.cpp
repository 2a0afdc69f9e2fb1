#include "wsa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wsa/error.hpp"

namespace wsa {

double PortableRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t PortableRng::below(std::uint64_t bound) {
  if (bound == 0) throw ArgumentError("PortableRng::below(0)");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

std::int64_t PortableRng::between(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ArgumentError("PortableRng::between with hi < lo");
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

namespace {

using Vec = std::vector<double>;

double vdot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(Vec& a) {
  const double n = std::sqrt(vdot(a, a));
  for (auto& x : a) x /= n;
}

Vec random_direction(PortableRng& rng, std::size_t d) {
  Vec v(d);
  for (auto& x : v) x = rng.normal();
  normalize(v);
  return v;
}

// Unit vector orthogonal to every vector in `basis` (assumed orthonormal).
Vec orthogonal_direction(PortableRng& rng, std::size_t d, const std::vector<Vec>& basis) {
  for (;;) {
    Vec v = random_direction(rng, d);
    for (const auto& b : basis) {
      const double p = vdot(v, b);
      for (std::size_t i = 0; i < d; ++i) v[i] -= p * b[i];
    }
    if (std::sqrt(vdot(v, v)) > 1e-3) {
      normalize(v);
      return v;
    }
  }
}

std::vector<std::size_t> interior_cells(const PatchRect& r, std::size_t grid_w) {
  const bool tall = r.row_max - r.row_min >= 2;
  const bool wide = r.col_max - r.col_min >= 2;
  const std::size_t r0 = tall ? r.row_min + 1 : r.row_min;
  const std::size_t r1 = tall ? r.row_max - 1 : r.row_max;
  const std::size_t c0 = wide ? r.col_min + 1 : r.col_min;
  const std::size_t c1 = wide ? r.col_max - 1 : r.col_max;
  std::vector<std::size_t> cells;
  for (std::size_t row = r0; row <= r1; ++row) {
    for (std::size_t col = c0; col <= c1; ++col) cells.push_back(row * grid_w + col);
  }
  return cells;
}

constexpr double kBackgroundCorrelation = 0.5;  // u_j . v = -kBackgroundCorrelation
constexpr std::size_t kPeakPatches = 4;

}  // namespace

SynthOutput generate_synthetic_bundle(const SynthSpec& spec) {
  if (spec.grid_h == 0 || spec.grid_w == 0 || spec.patch_size == 0) {
    throw ArgumentError("synthetic grid and patch size must be positive");
  }
  if (!(spec.noise_sigma >= 0.0)) throw ArgumentError("noise_sigma must be >= 0");
  const std::size_t K = spec.objects.size();
  if (spec.d_vit < K + 2) {
    throw ArgumentError("d_vit must be at least the object count + 2");
  }
  for (std::size_t j = 0; j < K; ++j) {
    const auto& r = spec.objects[j].rect;
    if (r.row_min > r.row_max || r.col_min > r.col_max || r.row_max >= spec.grid_h ||
        r.col_max >= spec.grid_w) {
      throw ArgumentError("planted rectangle " + std::to_string(j) + " lies outside the grid");
    }
    if (spec.objects[j].category.empty()) throw ArgumentError("planted object without category");
    for (std::size_t i = 0; i < j; ++i) {
      if (r.overlaps(spec.objects[i].rect)) {
        throw ArgumentError("planted rectangles " + std::to_string(i) + " and " +
                            std::to_string(j) + " overlap");
      }
    }
  }

  PortableRng rng(spec.rng_seed);
  const std::size_t d = spec.d_vit;
  const std::size_t gw = spec.grid_w;

  // Key directions: background v; objects share -beta along v and sit on a
  // regular simplex in the orthogonal complement.
  const Vec v = random_direction(rng, d);
  std::vector<Vec> basis{v};
  std::vector<Vec> simplex;
  for (std::size_t j = 0; j < K; ++j) {
    simplex.push_back(orthogonal_direction(rng, d, basis));
    basis.push_back(simplex.back());
  }
  if (K > 1) {
    Vec centroid(d, 0.0);
    for (const auto& g : simplex) {
      for (std::size_t i = 0; i < d; ++i) centroid[i] += g[i] / static_cast<double>(K);
    }
    for (auto& g : simplex) {
      for (std::size_t i = 0; i < d; ++i) g[i] -= centroid[i];
      normalize(g);
    }
  }
  const double beta = kBackgroundCorrelation;
  const double along = std::sqrt(1.0 - beta * beta);
  std::vector<Vec> u(K, Vec(d));
  for (std::size_t j = 0; j < K; ++j) {
    for (std::size_t i = 0; i < d; ++i) u[j][i] = -beta * v[i] + along * simplex[j][i];
  }

  SynthOutput out;
  FeatureBundle& b = out.bundle;
  b.geometry = GridGeometry::from_image(static_cast<std::uint32_t>(spec.grid_w) * spec.patch_size,
                                        static_cast<std::uint32_t>(spec.grid_h) * spec.patch_size,
                                        spec.patch_size);
  b.provenance = Provenance{8, 11, HeadReduction::mean};
  const std::size_t np = b.geometry.num_patches();

  std::vector<int> owner(np, -1);
  for (std::size_t j = 0; j < K; ++j) {
    const auto& r = spec.objects[j].rect;
    for (std::size_t row = r.row_min; row <= r.row_max; ++row) {
      for (std::size_t col = r.col_min; col <= r.col_max; ++col) {
        owner[row * gw + col] = static_cast<int>(j);
      }
    }
  }

  b.vit_keys = KeyMatrix(np, d);
  for (std::size_t p = 0; p < np; ++p) {
    const Vec& base = owner[p] < 0 ? v : u[static_cast<std::size_t>(owner[p])];
    auto row = b.vit_keys.row(p);
    for (std::size_t i = 0; i < d; ++i) {
      const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
      row[i] = static_cast<float>(base[i] + noise);
    }
  }

  for (std::size_t j = 0; j < K; ++j) {
    const auto& obj = spec.objects[j];
    if (!b.caption.empty()) b.caption += ' ';
    TokenRecord tok;
    tok.text = obj.category;
    tok.char_start = static_cast<std::uint32_t>(b.caption.size());
    b.caption += obj.category;
    tok.char_end = static_cast<std::uint32_t>(b.caption.size());

    // Pick the interior peak cells.
    std::vector<std::size_t> interior = interior_cells(obj.rect, gw);
    const std::size_t k = std::min(kPeakPatches, interior.size());
    for (std::size_t i = 0; i < k; ++i) {
      const auto pick = i + static_cast<std::size_t>(rng.below(interior.size() - i));
      std::swap(interior[i], interior[pick]);
    }
    std::vector<double> logits(np + 1, 0.0);
    std::vector<double> grad(np + 1, 0.0);
    logits[0] = 1.0;
    grad[0] = 0.1;
    for (std::size_t p = 0; p < np; ++p) {
      const bool inside = owner[p] == static_cast<int>(j);
      logits[p + 1] = inside ? 2.0 : 0.5 * rng.uniform();
      grad[p + 1] = inside ? 1.0 + 0.1 * rng.uniform() : -0.2 - 0.1 * rng.uniform();
    }
    for (std::size_t i = 0; i < k; ++i) logits[interior[i] + 1] = 5.0;

    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (auto& l : logits) {
      l = std::exp(l - peak);
      total += l;
    }
    tok.attention_row.resize(np + 1);
    tok.gradient_row.resize(np + 1);
    for (std::size_t i = 0; i <= np; ++i) {
      tok.attention_row[i] = static_cast<float>(logits[i] / total);
      tok.gradient_row[i] = static_cast<float>(grad[i]);
    }
    b.tokens.push_back(std::move(tok));

    SynthTruth truth;
    truth.category = obj.category;
    truth.rect = obj.rect;
    truth.box = patch_to_pixel_box(obj.rect.row_min, obj.rect.col_min, obj.rect.row_max,
                                   obj.rect.col_max, b.geometry);
    truth.token_index = j;
    out.truth.push_back(truth);
  }
  validate_bundle(b);
  return out;
}

std::vector<SynthSpec> random_corpus(const CorpusSpec& corpus) {
  if (corpus.min_grid == 0 || corpus.min_grid > corpus.max_grid) {
    throw ArgumentError("corpus grid range is invalid");
  }
  if (corpus.min_objects > corpus.max_objects) {
    throw ArgumentError("corpus object range is invalid");
  }
  if (corpus.categories.size() < corpus.max_objects) {
    throw ArgumentError("corpus needs at least max_objects distinct categories");
  }
  PortableRng rng(corpus.seed);
  std::vector<SynthSpec> specs;
  specs.reserve(corpus.num_images);
  for (std::size_t n = 0; n < corpus.num_images; ++n) {
    SynthSpec s;
    s.grid_h = static_cast<std::uint16_t>(rng.between(corpus.min_grid, corpus.max_grid));
    s.grid_w = static_cast<std::uint16_t>(rng.between(corpus.min_grid, corpus.max_grid));
    s.patch_size = corpus.patch_size;
    s.d_vit = corpus.d_vit;
    s.noise_sigma = corpus.noise_sigma;
    s.rng_seed = corpus.seed * 1000003ULL + n;

    const auto want = static_cast<std::size_t>(
        rng.between(static_cast<std::int64_t>(corpus.min_objects),
                    static_cast<std::int64_t>(corpus.max_objects)));
    std::vector<std::string> names = corpus.categories;
    for (std::size_t i = 0; i < want; ++i) {
      std::swap(names[i], names[i + static_cast<std::size_t>(rng.below(names.size() - i))]);
    }

    // Rejection-place rectangles with a one-patch gap between objects.
    for (std::size_t j = 0; j < want; ++j) {
      for (int attempt = 0; attempt < 200; ++attempt) {
        const std::int64_t max_h = std::max<std::int64_t>(2, s.grid_h / 2);
        const std::int64_t max_w = std::max<std::int64_t>(2, s.grid_w / 2);
        const auto h = static_cast<std::size_t>(rng.between(2, max_h));
        const auto w = static_cast<std::size_t>(rng.between(2, max_w));
        const auto r0 = static_cast<std::size_t>(rng.below(s.grid_h - h + 1));
        const auto c0 = static_cast<std::size_t>(rng.below(s.grid_w - w + 1));
        PatchRect rect{r0, c0, r0 + h - 1, c0 + w - 1};
        PatchRect padded{r0 == 0 ? 0 : r0 - 1, c0 == 0 ? 0 : c0 - 1, rect.row_max + 1,
                         rect.col_max + 1};
        const bool clash = std::any_of(s.objects.begin(), s.objects.end(),
                                       [&](const SynthObject& o) { return padded.overlaps(o.rect); });
        if (!clash) {
          s.objects.push_back({names[j], rect});
          break;
        }
      }
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace wsa
