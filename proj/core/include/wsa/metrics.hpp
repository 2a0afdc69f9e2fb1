#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsa/types.hpp"

namespace wsa {

// Intersection over union of half-open boxes. Throws ArgumentError if either
// box is degenerate.
double iou(const BoxPx& a, const BoxPx& b);

struct GroundTruthBox {
  std::int64_t category_id = 0;
  BoxPx box;
};

// Detection ground truth, keyed by image.
struct GroundTruthSet {
  std::map<ImageId, std::vector<GroundTruthBox>> images;

  std::size_t count(std::int64_t category_id) const;
  std::vector<std::int64_t> category_ids() const;  // ascending, classes with >= 1 box
  bool empty() const;
};

// --- phrase grounding -------------------------------------------------------

struct PhrasePrediction {
  std::string phrase_id;
  BoxPx box;
};

// Ground-truth boxes of each phrase (an entity may have several).
using PhraseGroundTruth = std::map<std::string, std::vector<BoxPx>>;

enum class GroundingProtocol {
  union_box,  // merge all gt boxes of the phrase into their enclosing box
  any_box,    // hit if any single gt box reaches the threshold
};

struct RecallResult {
  double recall = 0.0;
  std::size_t hits = 0;
  std::size_t total = 0;
};

// Fraction of phrases whose prediction reaches IoU >= 0.5 with the ground
// truth. Throws DataError when a predicted phrase has no ground truth.
RecallResult recall_at_1(const std::vector<PhrasePrediction>& preds, const PhraseGroundTruth& gt,
                         GroundingProtocol protocol = GroundingProtocol::union_box,
                         double iou_thresh = 0.5);

BoxPx union_box(const std::vector<BoxPx>& boxes);

// --- detection --------------------------------------------------------------

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // one per ranked detection
  double ap = 0.0;
  std::size_t num_gt = 0;
};

// All-point interpolated AP of one class. Detections are ranked by
// (confidence desc, x_min asc) and greedily matched to the unmatched gt box of
// the same image with the highest IoU >= iou_thresh. Returns nullopt when the
// class has no ground truth.
std::optional<PrCurve> average_precision(const std::vector<Detection>& dets,
                                         const GroundTruthSet& gt, std::int64_t class_id,
                                         double iou_thresh);

// Area under the precision envelope of a ranked PR sequence.
double envelope_ap(const std::vector<PrPoint>& points);

struct MapResult {
  double map = 0.0;
  std::size_t classes_evaluated = 0;
  std::size_t classes_without_gt = 0;  // predicted classes absent from gt
};

// Mean AP over classes present in gt at one IoU threshold.
MapResult mean_average_precision(const std::vector<Detection>& dets, const GroundTruthSet& gt,
                                 double iou_thresh);

struct MapRange {
  double map50 = 0.0;
  double map5095 = 0.0;
  std::size_t classes_evaluated = 0;
  std::size_t classes_without_gt = 0;
};

// The ten IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

// Throws DataError on empty ground truth.
MapRange map_range(const std::vector<Detection>& dets, const GroundTruthSet& gt);

}  // namespace wsa
