#include <benchmark/benchmark.h>

#include "wsa/bundle_io.hpp"
#include "wsa/gmm.hpp"
#include "wsa/grounding.hpp"
#include "wsa/metrics.hpp"
#include "wsa/nms.hpp"
#include "wsa/synth.hpp"

namespace {

using namespace wsa;

std::vector<double> mixture(std::size_t n) {
  PortableRng rng(1);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform() < 0.5 ? rng.normal() : 4.0 + rng.normal();
  return v;
}

void BM_GmmFit(benchmark::State& state) {
  const auto v = mixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gmm_1d(v, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GmmFit)->Arg(64)->Arg(1024)->Arg(5000);

SynthOutput planted(std::uint16_t side) {
  SynthSpec s;
  s.grid_h = s.grid_w = side;
  const auto q = static_cast<std::size_t>(side / 4);
  s.objects = {{"dog", {q, q, 2 * q, 2 * q}}, {"frisbee", {3 * q, q, 3 * q + 1, 3 * q}}};
  s.noise_sigma = 0.05;
  s.rng_seed = 3;
  return generate_synthetic_bundle(s);
}

void BM_DetectCategories(benchmark::State& state) {
  const auto out = planted(static_cast<std::uint16_t>(state.range(0)));
  const Lexicon lex({{1, "dog", {"dog"}}, {2, "frisbee", {"frisbee"}}});
  const PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(detect_categories(out.bundle, lex, cfg));
}
BENCHMARK(BM_DetectCategories)->Arg(8)->Arg(16)->Arg(32);

void BM_DecodeBundle(benchmark::State& state) {
  const auto bytes = encode_bundle(planted(static_cast<std::uint16_t>(state.range(0))).bundle);
  for (auto _ : state) benchmark::DoNotOptimize(decode_bundle(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_DecodeBundle)->Arg(16)->Arg(32);

std::vector<Detection> random_detections(std::size_t n, std::uint64_t seed) {
  PortableRng rng(seed);
  std::vector<Detection> dets;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::floor(rng.uniform() * 500), y = std::floor(rng.uniform() * 500);
    const double w = 10 + std::floor(rng.uniform() * 100), h = 10 + std::floor(rng.uniform() * 100);
    dets.push_back({{x, y, x + w, y + h}, rng.between(1, 5), rng.uniform(),
                    ImageId(static_cast<std::int64_t>(rng.below(20)))});
  }
  return dets;
}

void BM_Nms(benchmark::State& state) {
  const auto dets = random_detections(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(nms_pseudo_labels(dets, 0.2, 0.5));
}
BENCHMARK(BM_Nms)->Arg(100)->Arg(1000)->Arg(10000);

void BM_MapRange(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dets = random_detections(n, 8);
  GroundTruthSet gt;
  for (const auto& d : random_detections(n / 2, 9)) {
    gt.images[d.image_id].push_back({d.category_id, d.box});
  }
  for (auto _ : state) benchmark::DoNotOptimize(map_range(dets, gt));
}
BENCHMARK(BM_MapRange)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
