#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wsa/expansion.hpp"
#include "wsa/gradcam.hpp"
#include "wsa/lexicon.hpp"
#include "wsa/segmentation.hpp"
#include "wsa/types.hpp"

namespace wsa {

// Intermediate products of pointing + seed expansion for one token.
struct TokenExpansion {
  GradCamMap gradcam;
  SeedSet potential_seeds;
  InitialSeed initial_seed;
  ObjectSet object;
  Heatmap heatmap;
};

// Runs Grad-CAM, seed selection and seed expansion for one token. M and N are
// capped at the number of patches on grids smaller than M.
TokenExpansion expand_token(const FeatureBundle& bundle, std::size_t token_index,
                            const PipelineConfig& cfg);

struct WordAnnotation {
  TokenExpansion expansion;
  Segmentation segmentation;
};

// Single-word pipeline: expansion, threshold, and the box of the segment that
// contains the token's initial seed.
WordAnnotation annotate_token(const FeatureBundle& bundle, std::size_t token_index,
                              const PipelineConfig& cfg);

struct PhraseQuery {
  std::vector<std::size_t> token_indices;
  std::string phrase_text;
};

struct GroundingResult {
  BoxPx box;
  Heatmap heatmap;  // kind == phrase
  std::size_t seed_patch = 0;
  Segmentation segmentation;
};

// Sums the expanded heatmaps of the phrase tokens and segments the sum. The
// segment seed is the tokens' shared initial seed when they all agree and the
// argmax of the summed heatmap otherwise. Token order does not matter;
// duplicates and out-of-range indices throw ArgumentError.
GroundingResult ground_phrase(const FeatureBundle& bundle, const PhraseQuery& query,
                              const PipelineConfig& cfg);

// sigmoid(max Grad-CAM score over the given tokens).
double span_confidence(const FeatureBundle& bundle, const std::vector<std::size_t>& token_indices);

// One detection per category mentioned in the caption.
std::vector<Detection> detect_categories(const FeatureBundle& bundle, const Lexicon& lex,
                                         const PipelineConfig& cfg, const ImageId& image_id = {});

}  // namespace wsa
