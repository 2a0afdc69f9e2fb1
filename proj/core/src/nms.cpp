#include "wsa/nms.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "wsa/metrics.hpp"

namespace wsa {

std::vector<Detection> nms_pseudo_labels(const std::vector<Detection>& dets, double conf_thresh,
                                         double iou_thresh) {
  std::map<std::pair<ImageId, std::int64_t>, std::vector<Detection>> groups;
  for (const auto& d : dets) {
    if (d.confidence < conf_thresh) continue;
    groups[{d.image_id, d.category_id}].push_back(d);
  }

  std::vector<Detection> kept;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(), detection_output_less);
    std::vector<bool> suppressed(group.size(), false);
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (suppressed[i]) continue;
      kept.push_back(group[i]);
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (!suppressed[j] && iou(group[i].box, group[j].box) > iou_thresh) suppressed[j] = true;
      }
    }
  }
  std::sort(kept.begin(), kept.end(), detection_output_less);
  return kept;
}

}  // namespace wsa
