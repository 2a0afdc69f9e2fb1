#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wsa/bundle_io.hpp"
#include "wsa/error.hpp"
#include "wsa/grounding.hpp"
#include "wsa/json_io.hpp"
#include "wsa/metrics.hpp"
#include "wsa/nms.hpp"
#include "wsa/parallel.hpp"
#include "wsa/render.hpp"
#include "wsa/synth.hpp"

namespace wsa::cli {
namespace {

namespace fs = std::filesystem;
using ordered = nlohmann::ordered_json;

std::vector<fs::path> list_bundles(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FileError("not a directory: " + dir.string());
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kBundleExtension) {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? PipelineConfig{} : json::load_config(path);
}

std::string synth_bundle_name(std::size_t n) {
  std::ostringstream ss;
  ss << std::setw(6) << std::setfill('0') << n << kBundleExtension;
  return ss.str();
}

struct DetectArgs {
  std::string bundles, lexicon, out, config;
  std::size_t workers = 1;
};

int run_detect(const DetectArgs& a, std::ostream& out) {
  const PipelineConfig cfg = config_or_default(a.config);
  const Lexicon lex = json::load_lexicon(a.lexicon);
  const auto paths = list_bundles(a.bundles);
  const auto per_image = parallel_map<std::vector<Detection>>(
      paths.size(), a.workers, [&](std::size_t i) {
        const FeatureBundle b = read_bundle(paths[i]);
        return detect_categories(b, lex, cfg, ImageId(paths[i].stem().string()));
      });
  std::vector<Detection> all;
  for (const auto& dets : per_image) all.insert(all.end(), dets.begin(), dets.end());
  json::write_text_file(a.out, json::dump_predictions(all));
  out << "wrote " << all.size() << " detections from " << paths.size() << " bundles to " << a.out
      << "\n";
  return kExitOk;
}

struct GroundArgs {
  std::string bundles, phrases, out, config;
  std::size_t workers = 1;
};

int run_ground(const GroundArgs& a, std::ostream& out) {
  const PipelineConfig cfg = config_or_default(a.config);
  const auto phrases = json::load_phrases(a.phrases);
  const fs::path dir = a.bundles;
  const auto preds = parallel_map<PhrasePrediction>(phrases.size(), a.workers, [&](std::size_t i) {
    const auto& p = phrases[i];
    const FeatureBundle b = read_bundle(dir / p.bundle);
    for (std::size_t t : p.token_indices) {
      if (t >= b.tokens.size()) {
        throw DataError("phrase " + p.phrase_id + ": token index " + std::to_string(t) +
                        " out of range for " + p.bundle);
      }
    }
    const GroundingResult g = ground_phrase(b, {p.token_indices, p.phrase}, cfg);
    return PhrasePrediction{p.phrase_id, g.box};
  });
  std::vector<std::string> names;
  for (const auto& p : phrases) names.push_back(p.bundle);
  json::write_text_file(a.out, json::dump_phrase_predictions(preds, names));
  out << "wrote " << preds.size() << " grounded phrases to " << a.out << "\n";
  return kExitOk;
}

int run_eval_grounding(const std::string& pred, const std::string& gt, bool any_box,
                       std::ostream& out) {
  const auto preds = json::parse_phrase_predictions(json::read_text_file(pred));
  const auto truth = json::phrase_ground_truth(json::load_phrases(gt));
  const RecallResult r = recall_at_1(
      preds, truth, any_box ? GroundingProtocol::any_box : GroundingProtocol::union_box);
  ordered doc;
  doc["recall_at_1"] = r.recall;
  doc["hits"] = r.hits;
  doc["total"] = r.total;
  doc["protocol"] = any_box ? "any_box" : "union_box";
  out << doc.dump() << "\n";
  return kExitOk;
}

int run_eval_det(const std::string& pred, const std::string& gt_path, double iou_thresh,
                 bool range, std::ostream& out) {
  const auto dets = json::load_predictions(pred);
  const auto gt = json::load_coco_gt(gt_path);
  ordered doc;
  if (range) {
    const MapRange r = map_range(dets, gt.boxes);
    doc["map50"] = r.map50;
    doc["map5095"] = r.map5095;
    doc["classes_evaluated"] = r.classes_evaluated;
    doc["classes_without_gt"] = r.classes_without_gt;
  } else {
    if (gt.boxes.empty()) throw DataError("ground truth has no boxes");
    const MapResult r = mean_average_precision(dets, gt.boxes, iou_thresh);
    doc["iou"] = iou_thresh;
    doc["map"] = r.map;
    doc["classes_evaluated"] = r.classes_evaluated;
    doc["classes_without_gt"] = r.classes_without_gt;
  }
  out << doc.dump() << "\n";
  return kExitOk;
}

int run_pseudo_label(const std::string& pred, double conf, double iou_thresh,
                     const std::string& out_path, std::ostream& out) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) throw DataError("--iou must be in (0, 1)");
  const auto dets = json::load_predictions(pred);
  const auto kept = nms_pseudo_labels(dets, conf, iou_thresh);
  json::write_text_file(out_path, json::dump_predictions(kept));
  out << "kept " << kept.size() << " of " << dets.size() << " detections\n";
  return kExitOk;
}

int run_synth(const std::string& spec_path, const std::string& out_dir, std::ostream& out) {
  const json::SynthFile file = json::load_synth_file(spec_path);
  const fs::path dir = out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FileError("cannot create " + dir.string() + ": " + ec.message());

  std::map<std::string, std::int64_t> ids;
  std::vector<Category> cats;
  for (std::size_t i = 0; i < file.categories.size(); ++i) {
    const auto id = static_cast<std::int64_t>(i + 1);
    ids[file.categories[i]] = id;
    cats.push_back({id, file.categories[i], {file.categories[i]}});
  }

  json::CocoGroundTruth gt;
  gt.categories = cats;
  std::vector<json::PhraseRecord> phrases;
  for (std::size_t n = 0; n < file.images.size(); ++n) {
    SynthOutput s;
    try {
      s = generate_synthetic_bundle(file.images[n]);
    } catch (const ArgumentError& e) {
      throw DataError("synth image " + std::to_string(n) + ": " + e.what());
    }
    const std::string name = synth_bundle_name(n);
    write_bundle(s.bundle, dir / name);
    const ImageId id(static_cast<std::int64_t>(n));
    gt.images.push_back({id, s.bundle.geometry.image_w, s.bundle.geometry.image_h});
    auto& boxes = gt.boxes.images[id];
    for (const auto& t : s.truth) {
      boxes.push_back({ids.at(t.category), t.box});
      phrases.push_back({std::to_string(n) + "_" + std::to_string(t.token_index), name,
                         {t.token_index}, t.category, {t.box}});
    }
  }
  json::write_text_file(dir / "gt.json", json::dump_coco_gt(gt));
  json::write_text_file(dir / "lexicon.json", json::dump_lexicon(Lexicon(cats)));
  json::write_text_file(dir / "phrases.jsonl", json::dump_phrases(phrases));
  out << "wrote " << file.images.size() << " bundles to " << dir.string() << "\n";
  return kExitOk;
}

int run_render(const std::string& bundle_path, std::size_t token, const std::string& out_path,
               const std::string& config, std::ostream& out) {
  const PipelineConfig cfg = config_or_default(config);
  const FeatureBundle b = read_bundle(bundle_path);
  if (token >= b.tokens.size()) {
    throw DataError("token " + std::to_string(token) + " out of range (bundle has " +
                    std::to_string(b.tokens.size()) + " tokens)");
  }
  const WordAnnotation w = annotate_token(b, token, cfg);
  render_overlay(b, w.expansion.heatmap, {w.segmentation.box}, out_path);
  out << "rendered token " << token << " (\"" << b.tokens[token].text << "\") to " << out_path
      << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak-annotation engine: captions + VL/ViT features -> labeled boxes", "wsa"};
  app.require_subcommand(1);

  DetectArgs det;
  auto* detect = app.add_subcommand("detect", "Detect caption-mentioned categories in bundles");
  detect->add_option("--bundles", det.bundles, "Directory of .wsab bundles")->required();
  detect->add_option("--lexicon", det.lexicon, "Lexicon JSON")->required();
  detect->add_option("--out", det.out, "Output predictions JSON")->required();
  detect->add_option("--config", det.config, "Pipeline config JSON");
  detect->add_option("--workers", det.workers, "Worker threads")->check(CLI::PositiveNumber);

  GroundArgs gr;
  auto* ground = app.add_subcommand("ground", "Ground phrases to boxes");
  ground->add_option("--bundles", gr.bundles, "Directory of .wsab bundles")->required();
  ground->add_option("--phrases", gr.phrases, "Phrases JSON lines")->required();
  ground->add_option("--out", gr.out, "Output JSON lines")->required();
  ground->add_option("--config", gr.config, "Pipeline config JSON");
  ground->add_option("--workers", gr.workers, "Worker threads")->check(CLI::PositiveNumber);

  std::string eg_pred, eg_gt;
  bool any_box = false;
  auto* eval_g = app.add_subcommand("eval-grounding", "Recall@1 of grounded phrases");
  eval_g->add_option("--pred", eg_pred, "Grounding predictions JSON lines")->required();
  eval_g->add_option("--gt", eg_gt, "Phrases JSON lines with gt_boxes")->required();
  eval_g->add_flag("--any-box", any_box, "Hit if any single gt box overlaps (default: union box)");

  std::string ed_pred, ed_gt;
  double ed_iou = 0.5;
  bool ed_range = false;
  auto* eval_d = app.add_subcommand("eval-det", "mAP of detections");
  eval_d->add_option("--pred", ed_pred, "Predictions JSON")->required();
  eval_d->add_option("--gt", ed_gt, "COCO-style ground truth JSON")->required();
  auto* iou_opt = eval_d->add_option("--iou", ed_iou, "IoU threshold")->check(CLI::Range(0.0, 1.0));
  auto* range_opt = eval_d->add_flag("--range", ed_range, "Report mAP50 and mAP50:95");
  iou_opt->excludes(range_opt);

  const PipelineConfig defaults;
  std::string pl_pred, pl_out;
  double pl_conf = defaults.nms_conf;
  double pl_iou = defaults.nms_iou;
  auto* pseudo = app.add_subcommand("pseudo-label", "Confidence gate + per-class NMS");
  pseudo->add_option("--pred", pl_pred, "Predictions JSON")->required();
  pseudo->add_option("--conf", pl_conf, "Confidence threshold")->capture_default_str();
  pseudo->add_option("--iou", pl_iou, "NMS IoU threshold")->capture_default_str();
  pseudo->add_option("--out", pl_out, "Output predictions JSON")->required();

  std::string sy_spec, sy_out;
  auto* synth = app.add_subcommand("synth", "Generate a planted-object bundle corpus");
  synth->add_option("--spec", sy_spec, "Synth spec JSON")->required();
  synth->add_option("--out", sy_out, "Output directory")->required();

  std::string rd_bundle, rd_out, rd_config;
  std::size_t rd_token = 0;
  auto* render = app.add_subcommand("render", "Render a token heatmap and box as PPM");
  render->add_option("--bundle", rd_bundle, "Bundle file")->required();
  render->add_option("--token", rd_token, "Token index")->required();
  render->add_option("--out", rd_out, "Output .ppm")->required();
  render->add_option("--config", rd_config, "Pipeline config JSON");

  std::vector<char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"wsa"} : args;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "wsa: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*detect) return run_detect(det, out);
    if (*ground) return run_ground(gr, out);
    if (*eval_g) return run_eval_grounding(eg_pred, eg_gt, any_box, out);
    if (*eval_d) return run_eval_det(ed_pred, ed_gt, ed_iou, ed_range, out);
    if (*pseudo) return run_pseudo_label(pl_pred, pl_conf, pl_iou, pl_out, out);
    if (*synth) return run_synth(sy_spec, sy_out, out);
    if (*render) return run_render(rd_bundle, rd_token, rd_out, rd_config, out);
  } catch (const std::exception& e) {
    err << "wsa: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace wsa::cli
