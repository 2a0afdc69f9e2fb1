#pragma once

#include <cstddef>
#include <vector>

#include "wsa/gradcam.hpp"
#include "wsa/types.hpp"

namespace wsa {

enum class HeatmapKind { gradcam, expanded, phrase };

struct Heatmap {
  std::vector<double> values;  // length N_P
  HeatmapKind kind = HeatmapKind::expanded;
};

// Object patch set: the initial seed plus every potential seed whose ViT key
// has a non-negative dot product with the initial seed's key. Sorted, unique.
struct ObjectSet {
  std::vector<std::size_t> patch_indices;

  bool contains(std::size_t p) const;
};

ObjectSet build_object_set(const InitialSeed& seed, const SeedSet& potential,
                           const KeyMatrix& keys);

// Similarity of patch p to every patch: values_i = k_p . k_i.
Heatmap patch_heatmap(std::size_t p, const KeyMatrix& keys);

// Sum of patch_heatmap over the object set.
Heatmap object_heatmap(const ObjectSet& object, const KeyMatrix& keys);

}  // namespace wsa
