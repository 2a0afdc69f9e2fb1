#include "wsa/expansion.hpp"

#include <algorithm>

#include "wsa/error.hpp"

namespace wsa {

bool ObjectSet::contains(std::size_t p) const {
  return std::binary_search(patch_indices.begin(), patch_indices.end(), p);
}

ObjectSet build_object_set(const InitialSeed& seed, const SeedSet& potential,
                           const KeyMatrix& keys) {
  const std::size_t np = keys.rows();
  if (seed.patch_index >= np) throw RangeError("initial seed outside key matrix");

  ObjectSet out;
  out.patch_indices.push_back(seed.patch_index);
  const auto ks = keys.row(seed.patch_index);
  for (const Seed& f : potential.seeds) {
    if (f.patch_index >= np) throw RangeError("potential seed outside key matrix");
    if (dot(ks, keys.row(f.patch_index)) >= 0.0) out.patch_indices.push_back(f.patch_index);
  }
  std::sort(out.patch_indices.begin(), out.patch_indices.end());
  out.patch_indices.erase(std::unique(out.patch_indices.begin(), out.patch_indices.end()),
                          out.patch_indices.end());
  return out;
}

Heatmap patch_heatmap(std::size_t p, const KeyMatrix& keys) {
  if (p >= keys.rows()) throw RangeError("patch index outside key matrix");
  Heatmap h;
  h.kind = HeatmapKind::expanded;
  h.values.resize(keys.rows());
  const auto kp = keys.row(p);
  for (std::size_t i = 0; i < keys.rows(); ++i) h.values[i] = dot(kp, keys.row(i));
  return h;
}

Heatmap object_heatmap(const ObjectSet& object, const KeyMatrix& keys) {
  if (object.patch_indices.empty()) throw ArgumentError("object set is empty");
  Heatmap sum;
  sum.kind = HeatmapKind::expanded;
  sum.values.assign(keys.rows(), 0.0);
  for (std::size_t p : object.patch_indices) {
    const Heatmap hp = patch_heatmap(p, keys);
    for (std::size_t i = 0; i < hp.values.size(); ++i) sum.values[i] += hp.values[i];
  }
  return sum;
}

}  // namespace wsa
