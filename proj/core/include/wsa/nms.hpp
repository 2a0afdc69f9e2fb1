#pragma once

#include <vector>

#include "wsa/types.hpp"

namespace wsa {

// Pseudo-label mining: drops detections below conf_thresh, then runs greedy
// NMS independently per (image, category), suppressing boxes whose IoU with a
// kept box exceeds iou_thresh. Ranking is (confidence desc, x_min asc, then
// remaining box coordinates). Survivors come back in detection_output_less order.
std::vector<Detection> nms_pseudo_labels(const std::vector<Detection>& dets, double conf_thresh,
                                         double iou_thresh);

}  // namespace wsa
