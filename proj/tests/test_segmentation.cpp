#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "wsa/error.hpp"
#include "wsa/segmentation.hpp"

using namespace wsa;
using wsa::test::grid;

namespace {

GmmParams params(double mb, double sb, double mo, double so) {
  GmmParams p;
  p.mu_b = mb;
  p.sigma_b = sb;
  p.mu_o = mo;
  p.sigma_o = so;
  return p;
}

Mask mask_of(const GridGeometry& g, std::initializer_list<RowCol> on) {
  Mask m;
  m.bits.assign(g.num_patches(), false);
  for (auto rc : on) m.bits[rc_to_patch_index(rc, g)] = true;
  return m;
}

// Heatmap on a grid: `frac` of cells drawn around `hi`, the rest around `lo`.
Heatmap planted_heatmap(std::size_t n, double frac, double lo, double hi, double noise,
                        PortableRng& rng) {
  Heatmap h;
  const auto k = static_cast<std::size_t>(std::round(frac * static_cast<double>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    h.values.push_back((i < k ? hi : lo) + noise * rng.normal());
  }
  return h;
}

}  // namespace

TEST_CASE("separation test") {
  CHECK(separation_test(params(0, 1, 4, 1), 1.5));
  CHECK_FALSE(separation_test(params(0, 1, 2, 1), 1.5));
  CHECK_FALSE(separation_test(params(3, 0.1, 3, 0.1), 1.5));
}

TEST_CASE("crossover: equal variances give the midpoint") {
  CHECK(std::abs(solve_crossover(params(0, 1, 4, 1)) - 2.0) < 1e-12);
  CHECK(std::abs(solve_crossover(params(-1, 0.5, 1, 0.5)) - 0.0) < 1e-12);
  CHECK(std::abs(solve_crossover(params(0.3, 2.0, 7.1, 2.0)) - 3.7) < 1e-12);
}

TEST_CASE("crossover: unequal variances match bisection") {
  const double t = solve_crossover(params(0, 1, 3, 2));
  const double oracle = wsa::test::bisect_crossover(0, 1, 3, 2);
  CHECK(std::abs(t - oracle) < 1e-6);
  CHECK(t == doctest::Approx(1.418).epsilon(1e-3));
  CHECK(std::abs(wsa::test::log_normal_pdf(t, 0, 1) - wsa::test::log_normal_pdf(t, 3, 2)) < 1e-9);
}

TEST_CASE("crossover miss") {
  // A very wide object component swallows the background density.
  CHECK_THROWS_AS(solve_crossover(params(0, 0.01, 0.001, 50)), CrossoverMissError);
  CHECK_THROWS_AS(solve_crossover(params(1, 1, 1, 1)), CrossoverMissError);
}

TEST_CASE("weighted crossover shifts toward the lighter component") {
  GmmParams p = params(0, 1, 4, 1);
  p.w_b = 0.9;
  p.w_o = 0.1;
  const double t = solve_crossover(p, true);
  // oracle: w_b N(t;0,1) = w_o N(t;4,1) -> t = 2 + log(9)/4
  CHECK(t == doctest::Approx(2.0 + std::log(9.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("property: crossover lies inside the means and equalizes densities") {
  PortableRng rng(19);
  int solved = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const double mb = rng.normal() * 3;
    const double mo = mb + 0.05 + rng.uniform() * 6;
    const double sb = 0.05 + rng.uniform() * 2;
    const double so = 0.05 + rng.uniform() * 2;
    double t = 0;
    try {
      t = solve_crossover(params(mb, sb, mo, so));
    } catch (const CrossoverMissError&) {
      continue;
    }
    ++solved;
    CHECK(t > mb);
    CHECK(t < mo);
    CHECK(std::abs(wsa::test::log_normal_pdf(t, mb, sb) - wsa::test::log_normal_pdf(t, mo, so)) <
          1e-9);
    CHECK(std::abs(t - wsa::test::bisect_crossover(mb, sb, mo, so)) < 1e-6);
  }
  CHECK(solved > 1000);
}

TEST_CASE("fallback threshold") {
  const std::vector<double> two{0, 2};
  CHECK(fallback_threshold(two, 1.75) == doctest::Approx(2.75));
  const std::vector<double> flat{4, 4, 4};
  CHECK(fallback_threshold(flat, 1.75) == 4.0);
  const std::vector<double> three{-1, 0, 1};
  const double oracle = wsa::test::mean_oracle(three) + 1.75 * wsa::test::pop_std_oracle(three);
  CHECK(fallback_threshold(three, 1.75) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(fallback_threshold(three, 1.75) == doctest::Approx(1.429).epsilon(1e-3));
}

TEST_CASE("threshold selection: bimodal uses the crossover") {
  PortableRng rng(4);
  const auto h = planted_heatmap(400, 0.3, 0.0, 10.0, 0.5, rng);
  const auto r = compute_threshold(h, {});
  CHECK(r.source == ThresholdSource::crossover);
  CHECK(r.t > 0.0);
  CHECK(r.t < 10.0);
  REQUIRE(r.params.has_value());
  CHECK(r.params->mu_b == doctest::Approx(0.0).epsilon(0.1));
}

TEST_CASE("threshold selection: tiny object falls back") {
  PortableRng rng(4);
  const auto h = planted_heatmap(1024, 0.01, 0.0, 1.5, 1.0, rng);
  const auto r = compute_threshold(h, {});
  CHECK(r.source == ThresholdSource::fallback);
  CHECK(r.t == doctest::Approx(wsa::test::mean_oracle(h.values) +
                               1.75 * wsa::test::pop_std_oracle(h.values)));
}

TEST_CASE("threshold selection: constant heatmap") {
  Heatmap h{std::vector<double>(16, 3.0), HeatmapKind::expanded};
  const auto r = compute_threshold(h, {});
  CHECK(r.source == ThresholdSource::fallback);
  CHECK(r.t == 3.0);
  const auto seg = segment_heatmap(h, 5, grid(4, 4), {});
  CHECK(seg.segment.count() >= 1);
  CHECK(seg.segment.bits[5]);
  h.values[2] = INFINITY;
  CHECK_THROWS_AS(compute_threshold(h, {}), DataError);
}

TEST_CASE("thresholding compares with >=") {
  Heatmap h{{1, 2, 3}, HeatmapKind::expanded};
  CHECK(threshold_heatmap(h, 2).bits == std::vector<bool>{false, true, true});
  CHECK(threshold_heatmap(h, 0).bits == std::vector<bool>{true, true, true});
  CHECK(threshold_heatmap(h, 9).bits == std::vector<bool>{false, false, false});
}

TEST_CASE("box extraction from the seed component") {
  const auto g = grid(4, 4);
  const InitialSeed s11{rc_to_patch_index({1, 1}, g), {1, 1}};
  const auto square = mask_of(g, {{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  CHECK(extract_box(square, s11, g) == BoxPx{16, 16, 48, 48});
  const auto with_island = mask_of(g, {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 3}});
  CHECK(extract_box(with_island, s11, g) == BoxPx{16, 16, 48, 48});
  const InitialSeed s22{rc_to_patch_index({2, 2}, g), {2, 2}};
  CHECK(extract_box(mask_of(g, {}), s22, g) == BoxPx{32, 32, 48, 48});
}

TEST_CASE("components use 4-connectivity") {
  const auto g = grid(3, 3);
  const auto diag = mask_of(g, {{0, 0}, {1, 1}, {2, 2}});
  const auto seg = segment_containing(diag, 0, g);
  CHECK(seg.count() == 1);
  const auto snake = mask_of(g, {{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}});
  CHECK(segment_containing(snake, 0, g).count() == 7);
  CHECK_THROWS_AS(segment_containing(snake, 9, g), RangeError);
}

TEST_CASE("property: segment is connected, contains the seed, and is a subset of the mask") {
  PortableRng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = grid(static_cast<std::uint16_t>(rng.between(1, 12)),
                        static_cast<std::uint16_t>(rng.between(1, 12)));
    Mask m;
    for (std::size_t i = 0; i < g.num_patches(); ++i) m.bits.push_back(rng.uniform() < 0.5);
    const auto seed = rng.below(g.num_patches());
    const auto seg = segment_containing(m, seed, g);
    CHECK(seg.bits[seed]);
    for (std::size_t i = 0; i < g.num_patches(); ++i) {
      if (seg.bits[i] && i != seed) CHECK(m.bits[i]);
    }
    // Closure: no mask cell adjacent to the segment is left out.
    for (std::size_t i = 0; i < g.num_patches(); ++i) {
      if (!seg.bits[i]) continue;
      const auto rc = patch_index_to_rc(i, g);
      const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const long r = static_cast<long>(rc.row) + dr[k], c = static_cast<long>(rc.col) + dc[k];
        if (r < 0 || c < 0 || r >= g.grid_h || c >= g.grid_w) continue;
        const auto j = rc_to_patch_index({static_cast<std::size_t>(r), static_cast<std::size_t>(c)}, g);
        if (m.bits[j]) CHECK(seg.bits[j]);
      }
    }
  }
}

TEST_CASE("property: masks are invariant to positive affine maps of the heatmap") {
  PortableRng rng(31);
  const PipelineConfig cfg;
  int crossover = 0, fallback = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const bool bimodal = trial % 2 == 0;
    const auto h = bimodal ? planted_heatmap(256, 0.25, 0.0, 5.0, 0.4, rng)
                           : planted_heatmap(256, 0.0, 0.0, 0.0, 1.0, rng);
    const double a = std::exp(rng.normal() * 2);
    const double b = rng.normal() * 100;
    Heatmap h2 = h;
    for (double& v : h2.values) v = a * v + b;
    const auto r1 = compute_threshold(h, cfg);
    const auto r2 = compute_threshold(h2, cfg);
    CHECK(r1.source == r2.source);
    (r1.source == ThresholdSource::crossover ? crossover : fallback)++;
    CHECK(threshold_heatmap(h, r1.t) == threshold_heatmap(h2, r2.t));
  }
  CHECK(crossover > 50);
  CHECK(fallback > 50);
}
