#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wsa/types.hpp"

namespace wsa {

// Scaled dot-product attention of one query over a set of keys:
// weights_i = softmax_i(q . k_i / sqrt(d)), computed with max subtraction.
std::vector<double> compute_attention_weights(std::span<const double> query,
                                              std::span<const std::vector<double>> keys);

struct AttentionOutput {
  std::vector<double> weights;
  std::vector<double> hidden;  // sum_i weights_i * values_i
};

AttentionOutput compute_attention(std::span<const double> query,
                                  std::span<const std::vector<double>> keys,
                                  std::span<const std::vector<double>> values);

// Per-patch Grad-CAM importance of one token, [CLS] slot removed.
struct GradCamMap {
  std::vector<double> scores;  // length N_P
  std::size_t token_index = 0;
};

// scores_i = gradient_row[i + 1] * attention_row[i + 1]. No rectification:
// negative products are kept as scores.
GradCamMap gradcam_scores(const TokenRecord& token, std::size_t num_patches,
                          std::size_t token_index = 0);

struct Seed {
  std::size_t patch_index = 0;
  double score = 0.0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

// Potential seeds, ordered by (score desc, patch index asc).
struct SeedSet {
  std::vector<Seed> seeds;
};

SeedSet select_potential_seeds(const GradCamMap& map, std::size_t M);

struct InitialSeed {
  std::size_t patch_index = 0;
  RowCol rc;

  friend bool operator==(const InitialSeed&, const InitialSeed&) = default;
};

// Rounds (half up, per axis) the mean (row, col) of the first N seeds. The
// result need not be one of the seeds.
InitialSeed compute_initial_seed(const SeedSet& seeds, std::size_t N, const GridGeometry& g);

}  // namespace wsa
