#include "wsa/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "wsa/error.hpp"

namespace wsa {

double iou(const BoxPx& a, const BoxPx& b) {
  if (!a.valid() || !b.valid()) throw ArgumentError("IoU of a degenerate box");
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

std::size_t GroundTruthSet::count(std::int64_t category_id) const {
  std::size_t n = 0;
  for (const auto& [id, boxes] : images) {
    for (const auto& g : boxes) n += g.category_id == category_id;
  }
  return n;
}

std::vector<std::int64_t> GroundTruthSet::category_ids() const {
  std::set<std::int64_t> ids;
  for (const auto& [id, boxes] : images) {
    for (const auto& g : boxes) ids.insert(g.category_id);
  }
  return {ids.begin(), ids.end()};
}

bool GroundTruthSet::empty() const {
  return std::all_of(images.begin(), images.end(),
                     [](const auto& kv) { return kv.second.empty(); });
}

BoxPx union_box(const std::vector<BoxPx>& boxes) {
  if (boxes.empty()) throw ArgumentError("union of no boxes");
  BoxPx u = boxes.front();
  for (const auto& b : boxes) {
    u.x_min = std::min(u.x_min, b.x_min);
    u.y_min = std::min(u.y_min, b.y_min);
    u.x_max = std::max(u.x_max, b.x_max);
    u.y_max = std::max(u.y_max, b.y_max);
  }
  return u;
}

RecallResult recall_at_1(const std::vector<PhrasePrediction>& preds, const PhraseGroundTruth& gt,
                         GroundingProtocol protocol, double iou_thresh) {
  std::map<std::string, const BoxPx*> by_phrase;
  for (const auto& p : preds) {
    const auto it = gt.find(p.phrase_id);
    if (it == gt.end() || it->second.empty()) {
      throw DataError("phrase \"" + p.phrase_id + "\" has no ground-truth box");
    }
    if (!by_phrase.emplace(p.phrase_id, &p.box).second) {
      throw DataError("phrase \"" + p.phrase_id + "\" has more than one prediction");
    }
  }
  // Every phrase with ground truth counts; a phrase without a prediction is a miss.
  RecallResult r;
  for (const auto& [id, boxes] : gt) {
    if (boxes.empty()) continue;
    ++r.total;
    const auto it = by_phrase.find(id);
    if (it == by_phrase.end()) continue;
    const BoxPx& pred = *it->second;
    bool hit = false;
    if (protocol == GroundingProtocol::union_box) {
      hit = iou(pred, union_box(boxes)) >= iou_thresh;
    } else {
      hit = std::any_of(boxes.begin(), boxes.end(),
                        [&](const BoxPx& g) { return iou(pred, g) >= iou_thresh; });
    }
    r.hits += hit;
  }
  r.recall = r.total == 0 ? 0.0 : static_cast<double>(r.hits) / static_cast<double>(r.total);
  return r;
}

double envelope_ap(const std::vector<PrPoint>& points) {
  // Suffix maximum of precision, integrated over every recall increase.
  std::vector<double> env(points.size());
  double run = 0.0;
  for (std::size_t k = points.size(); k-- > 0;) {
    run = std::max(run, points[k].precision);
    env[k] = run;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].recall > prev_recall) {
      ap += (points[k].recall - prev_recall) * env[k];
      prev_recall = points[k].recall;
    }
  }
  return ap;
}

std::optional<PrCurve> average_precision(const std::vector<Detection>& dets,
                                         const GroundTruthSet& gt, std::int64_t class_id,
                                         double iou_thresh) {
  const std::size_t num_gt = gt.count(class_id);
  if (num_gt == 0) return std::nullopt;

  std::vector<const Detection*> ranked;
  for (const auto& d : dets) {
    if (d.category_id == class_id) ranked.push_back(&d);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Detection* a, const Detection* b) {
    if (a->confidence != b->confidence) return a->confidence > b->confidence;
    return a->box.x_min < b->box.x_min;
  });

  std::map<ImageId, std::vector<bool>> used;
  PrCurve curve;
  curve.num_gt = num_gt;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const Detection& d = *ranked[k];
    bool matched = false;
    if (const auto img = gt.images.find(d.image_id); img != gt.images.end()) {
      auto& taken = used[d.image_id];
      taken.resize(img->second.size(), false);
      double best_iou = -1.0;
      std::size_t best = 0;
      for (std::size_t j = 0; j < img->second.size(); ++j) {
        const auto& g = img->second[j];
        if (g.category_id != class_id || taken[j]) continue;
        const double o = iou(d.box, g.box);
        if (o >= iou_thresh && o > best_iou) {
          best_iou = o;
          best = j;
        }
      }
      if (best_iou >= 0.0) {
        taken[best] = true;
        matched = true;
      }
    }
    tp += matched;
    curve.points.push_back({static_cast<double>(tp) / static_cast<double>(num_gt),
                            static_cast<double>(tp) / static_cast<double>(k + 1)});
  }
  curve.ap = envelope_ap(curve.points);
  return curve;
}

MapResult mean_average_precision(const std::vector<Detection>& dets, const GroundTruthSet& gt,
                                 double iou_thresh) {
  MapResult r;
  const auto classes = gt.category_ids();
  std::set<std::int64_t> predicted;
  for (const auto& d : dets) predicted.insert(d.category_id);
  for (auto c : predicted) {
    if (!std::binary_search(classes.begin(), classes.end(), c)) ++r.classes_without_gt;
  }
  long double sum = 0.0L;
  for (auto c : classes) {
    sum += average_precision(dets, gt, c, iou_thresh)->ap;
    ++r.classes_evaluated;
  }
  r.map = r.classes_evaluated == 0
              ? 0.0
              : static_cast<double>(sum / static_cast<long double>(r.classes_evaluated));
  return r;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int k = 0; k < 10; ++k) t.push_back(static_cast<double>(50 + 5 * k) / 100.0);
  return t;
}

MapRange map_range(const std::vector<Detection>& dets, const GroundTruthSet& gt) {
  if (gt.empty()) throw DataError("ground truth has no boxes");
  const MapResult at50 = mean_average_precision(dets, gt, 0.5);
  MapRange r;
  r.map50 = at50.map;
  r.classes_evaluated = at50.classes_evaluated;
  r.classes_without_gt = at50.classes_without_gt;
  // One extended-precision sum over every (class, threshold) pair, rounded
  // once, so equal per-threshold APs average back to exactly that AP.
  long double sum = 0.0L;
  const auto thresholds = coco_iou_thresholds();
  for (auto c : gt.category_ids()) {
    for (double t : thresholds) sum += average_precision(dets, gt, c, t)->ap;
  }
  const auto n = static_cast<long double>(thresholds.size() * r.classes_evaluated);
  r.map5095 = static_cast<double>(sum / n);
  return r;
}

}  // namespace wsa
