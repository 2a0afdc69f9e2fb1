#include "doctest.h"
#include "support.hpp"
#include "wsa/bundle_io.hpp"
#include "wsa/error.hpp"
#include "wsa/grounding.hpp"
#include "wsa/metrics.hpp"
#include "wsa/render.hpp"
#include "wsa/synth.hpp"

using namespace wsa;

namespace {

SynthSpec one_object(double sigma, std::uint64_t seed) {
  SynthSpec s;
  s.objects = {{"dog", {2, 1, 5, 4}}};
  s.noise_sigma = sigma;
  s.rng_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("portable rng is reproducible") {
  PortableRng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
    CHECK(a.below(7) == b.below(7));
  }
  PortableRng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto k = c.between(-2, 2);
    CHECK(k >= -2);
    CHECK(k <= 2);
  }
}

TEST_CASE("synthetic bundle is valid and matches its truth") {
  const auto out = generate_synthetic_bundle(one_object(0.05, 7));
  CHECK_NOTHROW(validate_bundle(out.bundle));
  REQUIRE(out.truth.size() == 1);
  CHECK(out.truth[0].box == BoxPx{16, 32, 80, 96});
  CHECK(out.bundle.caption == "dog");
  CHECK(out.bundle.tokens[0].text == "dog");
  const auto w = annotate_token(out.bundle, 0, {});
  CHECK(iou(w.segmentation.box, out.truth[0].box) >= 0.9);
}

TEST_CASE("noise-free bundle is recovered exactly") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto out = generate_synthetic_bundle(one_object(0.0, seed));
    const auto w = annotate_token(out.bundle, 0, {});
    CHECK(iou(w.segmentation.box, out.truth[0].box) == 1.0);
  }
}

TEST_CASE("synthesis is deterministic") {
  const auto a = generate_synthetic_bundle(one_object(0.05, 9));
  const auto b = generate_synthetic_bundle(one_object(0.05, 9));
  CHECK(encode_bundle(a.bundle) == encode_bundle(b.bundle));
  const auto c = generate_synthetic_bundle(one_object(0.05, 10));
  CHECK(encode_bundle(a.bundle) != encode_bundle(c.bundle));
}

TEST_CASE("synthesis argument errors") {
  SynthSpec s;
  s.objects = {{"a", {0, 0, 3, 3}}, {"b", {3, 3, 5, 5}}};
  CHECK_THROWS_AS(generate_synthetic_bundle(s), ArgumentError);
  s.objects = {{"a", {0, 0, 8, 3}}};
  CHECK_THROWS_AS(generate_synthetic_bundle(s), ArgumentError);
  s.objects = {{"a", {0, 0, 1, 1}}};
  s.d_vit = 2;
  CHECK_THROWS_AS(generate_synthetic_bundle(s), ArgumentError);
}

TEST_CASE("random corpus respects its bounds") {
  CorpusSpec c;
  c.num_images = 30;
  const auto specs = random_corpus(c);
  REQUIRE(specs.size() == 30);
  for (const auto& s : specs) {
    CHECK(s.grid_h >= 8);
    CHECK(s.grid_h <= 32);
    CHECK(s.grid_w >= 8);
    CHECK(s.grid_w <= 32);
    CHECK(s.objects.size() >= 1);
    CHECK(s.objects.size() <= 3);
    for (std::size_t i = 0; i < s.objects.size(); ++i)
      for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
        CHECK_FALSE(s.objects[i].rect.overlaps(s.objects[j].rect));
        CHECK(s.objects[i].category != s.objects[j].category);
      }
  }
}

TEST_CASE("heat ramp endpoints") {
  CHECK(heat_color(0.0) == Rgb{64, 64, 64});
  CHECK(heat_color(1.0) == Rgb{255, 0, 0});
}

TEST_CASE("overlay image layout") {
  const auto g = wsa::test::grid(4, 4);
  Heatmap flat{std::vector<double>(16, 1.0), HeatmapKind::expanded};
  const auto ppm = render_overlay_ppm(g, flat, {});
  const std::string header = "P6 64 64 255\n";
  REQUIRE(ppm.size() == header.size() + 64 * 64 * 3);
  CHECK(std::string(ppm.begin(), ppm.begin() + static_cast<long>(header.size())) == header);
  const Rgb mid = heat_color(0.5);
  for (std::size_t i = header.size(); i < ppm.size(); i += 3) {
    CHECK(ppm[i] == mid.r);
    CHECK(ppm[i + 1] == mid.g);
  }

  Heatmap hot{std::vector<double>(16, 0.0), HeatmapKind::expanded};
  hot.values[5] = 1.0;  // patch (1, 1)
  const auto img = render_overlay_ppm(g, hot, {});
  auto px = [&](int x, int y) {
    const std::size_t at = header.size() + (static_cast<std::size_t>(y) * 64 + x) * 3;
    return Rgb{img[at], img[at + 1], img[at + 2]};
  };
  CHECK(px(20, 20) == Rgb{255, 0, 0});
  CHECK(px(5, 5) == Rgb{64, 64, 64});

  const auto boxed = render_overlay_ppm(g, hot, {BoxPx{16, 16, 48, 48}});
  const std::size_t at = header.size() + (16 * 64 + 30) * 3;
  CHECK(boxed[at] == 0);
  CHECK(boxed[at + 1] == 255);
}
