#include "wsa/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsa/error.hpp"

namespace wsa {

TokenExpansion expand_token(const FeatureBundle& bundle, std::size_t token_index,
                            const PipelineConfig& cfg) {
  if (token_index >= bundle.tokens.size()) {
    throw ArgumentError("token index " + std::to_string(token_index) + " out of range (bundle has " +
                        std::to_string(bundle.tokens.size()) + " tokens)");
  }
  const auto& g = bundle.geometry;
  const std::size_t np = g.num_patches();
  if (bundle.vit_keys.rows() != np) throw ShapeError("vit_keys rows do not match grid");

  const std::size_t M = std::min<std::size_t>(static_cast<std::size_t>(cfg.M), np);
  const std::size_t N = std::min<std::size_t>(static_cast<std::size_t>(cfg.N), M);

  TokenExpansion ex;
  ex.gradcam = gradcam_scores(bundle.tokens[token_index], np, token_index);
  ex.potential_seeds = select_potential_seeds(ex.gradcam, M);
  ex.initial_seed = compute_initial_seed(ex.potential_seeds, N, g);
  ex.object = build_object_set(ex.initial_seed, ex.potential_seeds, bundle.vit_keys);
  ex.heatmap = object_heatmap(ex.object, bundle.vit_keys);
  return ex;
}

WordAnnotation annotate_token(const FeatureBundle& bundle, std::size_t token_index,
                              const PipelineConfig& cfg) {
  WordAnnotation out;
  out.expansion = expand_token(bundle, token_index, cfg);
  out.segmentation = segment_heatmap(out.expansion.heatmap, out.expansion.initial_seed.patch_index,
                                     bundle.geometry, cfg);
  return out;
}

GroundingResult ground_phrase(const FeatureBundle& bundle, const PhraseQuery& query,
                              const PipelineConfig& cfg) {
  if (query.token_indices.empty()) throw ArgumentError("phrase query has no tokens");
  std::vector<std::size_t> indices = query.token_indices;
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw ArgumentError("phrase query repeats a token index");
  }
  if (indices.back() >= bundle.tokens.size()) {
    throw ArgumentError("phrase token index " + std::to_string(indices.back()) +
                        " out of range (bundle has " + std::to_string(bundle.tokens.size()) +
                        " tokens)");
  }
  if (cfg.stop_word_filter) {
    std::vector<std::size_t> content;
    for (std::size_t t : indices) {
      if (!is_stop_word(bundle.tokens[t].text)) content.push_back(t);
    }
    if (!content.empty()) indices = std::move(content);
  }

  const std::size_t np = bundle.geometry.num_patches();
  GroundingResult out;
  out.heatmap.kind = HeatmapKind::phrase;
  out.heatmap.values.assign(np, 0.0);
  std::vector<std::size_t> seeds;
  for (std::size_t t : indices) {
    const TokenExpansion ex = expand_token(bundle, t, cfg);
    for (std::size_t i = 0; i < np; ++i) out.heatmap.values[i] += ex.heatmap.values[i];
    seeds.push_back(ex.initial_seed.patch_index);
  }

  if (std::all_of(seeds.begin(), seeds.end(), [&](std::size_t s) { return s == seeds.front(); })) {
    out.seed_patch = seeds.front();
  } else {
    const auto peak = std::max_element(out.heatmap.values.begin(), out.heatmap.values.end());
    out.seed_patch = static_cast<std::size_t>(peak - out.heatmap.values.begin());
  }
  out.segmentation = segment_heatmap(out.heatmap, out.seed_patch, bundle.geometry, cfg);
  out.box = out.segmentation.box;
  return out;
}

double span_confidence(const FeatureBundle& bundle,
                       const std::vector<std::size_t>& token_indices) {
  if (token_indices.empty()) throw ArgumentError("confidence of an empty token span");
  const std::size_t np = bundle.geometry.num_patches();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t t : token_indices) {
    if (t >= bundle.tokens.size()) throw ArgumentError("token index out of range");
    const GradCamMap map = gradcam_scores(bundle.tokens[t], np, t);
    best = std::max(best, *std::max_element(map.scores.begin(), map.scores.end()));
  }
  return 1.0 / (1.0 + std::exp(-best));
}

std::vector<Detection> detect_categories(const FeatureBundle& bundle, const Lexicon& lex,
                                         const PipelineConfig& cfg, const ImageId& image_id) {
  std::vector<Detection> out;
  for (const CategoryMatch& m : match_categories(bundle.caption, bundle.tokens, lex)) {
    const GroundingResult g = ground_phrase(bundle, {m.token_indices, m.matched_alias}, cfg);
    Detection d;
    d.box = g.box;
    d.category_id = m.category_id;
    d.confidence = span_confidence(bundle, m.token_indices);
    d.image_id = image_id;
    out.push_back(d);
  }
  return out;
}

}  // namespace wsa
