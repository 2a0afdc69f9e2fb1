#include "wsa/gradcam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wsa/error.hpp"

namespace wsa {

std::vector<double> compute_attention_weights(std::span<const double> query,
                                              std::span<const std::vector<double>> keys) {
  if (keys.empty()) throw ShapeError("attention needs at least one key");
  const std::size_t d = query.size();
  if (d == 0) throw ShapeError("attention query has dimension 0");

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> logits(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].size() != d) {
      throw ShapeError("key " + std::to_string(i) + " has dimension " +
                       std::to_string(keys[i].size()) + ", query has " + std::to_string(d));
    }
    logits[i] = std::inner_product(query.begin(), query.end(), keys[i].begin(), 0.0) * scale;
  }

  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto& l : logits) {
    l = std::exp(l - peak);
    total += l;
  }
  for (auto& l : logits) l /= total;
  return logits;
}

AttentionOutput compute_attention(std::span<const double> query,
                                  std::span<const std::vector<double>> keys,
                                  std::span<const std::vector<double>> values) {
  if (values.size() != keys.size()) {
    throw ShapeError("attention needs one value vector per key");
  }
  AttentionOutput out;
  out.weights = compute_attention_weights(query, keys);
  const std::size_t dv = values.front().size();
  out.hidden.assign(dv, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != dv) throw ShapeError("value vectors differ in dimension");
    for (std::size_t k = 0; k < dv; ++k) out.hidden[k] += out.weights[i] * values[i][k];
  }
  return out;
}

GradCamMap gradcam_scores(const TokenRecord& token, std::size_t num_patches,
                          std::size_t token_index) {
  if (token.attention_row.size() != num_patches + 1 ||
      token.gradient_row.size() != num_patches + 1) {
    throw ShapeError("token rows must have N_P + 1 = " + std::to_string(num_patches + 1) +
                     " entries, got attention " + std::to_string(token.attention_row.size()) +
                     " / gradient " + std::to_string(token.gradient_row.size()));
  }
  GradCamMap map;
  map.token_index = token_index;
  map.scores.resize(num_patches);
  for (std::size_t i = 0; i < num_patches; ++i) {
    map.scores[i] = static_cast<double>(token.gradient_row[i + 1]) *
                    static_cast<double>(token.attention_row[i + 1]);
  }
  return map;
}

SeedSet select_potential_seeds(const GradCamMap& map, std::size_t M) {
  const std::size_t np = map.scores.size();
  if (M > np) {
    throw ArgumentError("cannot select " + std::to_string(M) + " seeds from " +
                        std::to_string(np) + " patches");
  }
  std::vector<std::size_t> order(np);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto ranked_before = [&](std::size_t a, std::size_t b) {
    if (map.scores[a] != map.scores[b]) return map.scores[a] > map.scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(M), order.end(),
                    ranked_before);

  SeedSet out;
  out.seeds.reserve(M);
  for (std::size_t k = 0; k < M; ++k) out.seeds.push_back({order[k], map.scores[order[k]]});
  return out;
}

InitialSeed compute_initial_seed(const SeedSet& seeds, std::size_t N, const GridGeometry& g) {
  if (N == 0) throw ArgumentError("initial seed needs N >= 1");
  if (N > seeds.seeds.size()) {
    throw ArgumentError("N = " + std::to_string(N) + " exceeds the " +
                        std::to_string(seeds.seeds.size()) + " potential seeds");
  }
  std::size_t row_sum = 0;
  std::size_t col_sum = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const RowCol rc = patch_index_to_rc(seeds.seeds[k].patch_index, g);
    row_sum += rc.row;
    col_sum += rc.col;
  }
  // floor(sum / N + 1/2) in integer arithmetic.
  const auto round_half_up = [N](std::size_t sum) { return (2 * sum + N) / (2 * N); };
  InitialSeed s;
  s.rc = {round_half_up(row_sum), round_half_up(col_sum)};
  s.patch_index = rc_to_patch_index(s.rc, g);
  return s;
}

}  // namespace wsa
