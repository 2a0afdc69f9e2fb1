#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wsa/lexicon.hpp"
#include "wsa/metrics.hpp"
#include "wsa/synth.hpp"
#include "wsa/types.hpp"

// JSON schemas shared by the tools. Malformed documents throw FormatError,
// schema violations DataError, unreadable files FileError.
namespace wsa::json {

// [{"id": 1, "name": "dog", "aliases": ["dog", "puppy"]}, ...]
Lexicon parse_lexicon(std::string_view text);
Lexicon load_lexicon(const std::filesystem::path& path);
std::string dump_lexicon(const Lexicon& lex);

// Object mirroring PipelineConfig; missing keys keep their defaults, unknown
// keys are rejected.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string dump_config(const PipelineConfig& cfg);

struct ImageInfo {
  ImageId id;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

// COCO-flavored ground truth:
// {"images": [{id, width, height}], "annotations": [{image_id, category_id,
//  bbox: [x, y, w, h]}], "categories": [{id, name}]}
struct CocoGroundTruth {
  std::vector<ImageInfo> images;
  std::vector<Category> categories;
  GroundTruthSet boxes;
};

CocoGroundTruth parse_coco_gt(std::string_view text);
CocoGroundTruth load_coco_gt(const std::filesystem::path& path);
std::string dump_coco_gt(const CocoGroundTruth& gt);

// [{"image_id", "category_id", "bbox": [x, y, w, h], "score"}]. An empty or
// whitespace-only document is an empty list.
std::vector<Detection> parse_predictions(std::string_view text);
std::vector<Detection> load_predictions(const std::filesystem::path& path);
// Sorted by detection_output_less.
std::string dump_predictions(std::vector<Detection> dets);

// One JSON object per line:
// {"bundle": "x.wsab", "token_indices": [...], "phrase": "...", "gt_boxes": [[x, y, w, h]]}
// with an optional "id"; otherwise the phrase id is the 0-based line number.
struct PhraseRecord {
  std::string phrase_id;
  std::string bundle;
  std::vector<std::size_t> token_indices;
  std::string phrase;
  std::vector<BoxPx> gt_boxes;
};

std::vector<PhraseRecord> parse_phrases(std::string_view text);
std::vector<PhraseRecord> load_phrases(const std::filesystem::path& path);
std::string dump_phrases(const std::vector<PhraseRecord>& phrases);

// Grounding predictions, one JSON object per line:
// {"id": "...", "bundle": "...", "bbox": [x, y, w, h]}
std::vector<PhrasePrediction> parse_phrase_predictions(std::string_view text);
std::string dump_phrase_predictions(const std::vector<PhrasePrediction>& preds,
                                    const std::vector<std::string>& bundles);

PhraseGroundTruth phrase_ground_truth(const std::vector<PhraseRecord>& phrases);

// Synth spec file: either {"images": [SynthSpec...]} with
//   SynthSpec = {grid_h, grid_w, patch_size, d_vit, noise_sigma, seed,
//                objects: [{category, rect: [row_min, col_min, row_max, col_max]}]}
// or {"corpus": {num_images, min_grid, max_grid, min_objects, max_objects,
//                noise_sigma, patch_size, d_vit, seed, categories}}.
// An optional top-level "categories" list fixes category ids (1-based order).
struct SynthFile {
  std::vector<SynthSpec> images;
  std::vector<std::string> categories;
};

SynthFile parse_synth_file(std::string_view text);
SynthFile load_synth_file(const std::filesystem::path& path);

// bbox [x, y, w, h] <-> half-open BoxPx.
BoxPx box_from_xywh(double x, double y, double w, double h);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace wsa::json
