#include "wsa/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wsa/error.hpp"

namespace wsa::json {
namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

json parse_document(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(what + ": " + e.what(), e.byte == 0 ? FormatError::npos : e.byte - 1);
  }
}

// Runs a schema reader, turning nlohmann type/range errors into DataError.
template <typename F>
auto with_schema(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(what + ": " + e.what());
  }
}

ImageId image_id_from(const json& j) {
  if (j.is_number_integer()) return ImageId(j.get<std::int64_t>());
  if (j.is_string()) return ImageId(j.get<std::string>());
  throw DataError("image_id must be an integer or a string");
}

ordered image_id_to(const ImageId& id) {
  if (id.is_numeric()) return std::stoll(id.str());
  return id.str();
}

BoxPx box_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) throw DataError(what + ": bbox must be [x, y, w, h]");
  const BoxPx b = box_from_xywh(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                                j[3].get<double>());
  if (!b.valid()) throw DataError(what + ": bbox has non-positive width or height");
  return b;
}

ordered box_to(const BoxPx& b) {
  return ordered::array({b.x_min, b.y_min, b.width(), b.height()});
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
  if (const auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& what) {
  for (const auto& [key, value] : obj.items()) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return key == k; });
    if (!ok) throw DataError(what + ": unknown key \"" + key + "\"");
  }
}

}  // namespace

BoxPx box_from_xywh(double x, double y, double w, double h) { return {x, y, x + w, y + h}; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FileError("write failed for " + path.string());
}

// --- lexicon -----------------------------------------------------------------

Lexicon parse_lexicon(std::string_view text) {
  const json doc = parse_document(text, "lexicon");
  return with_schema("lexicon", [&] {
    if (!doc.is_array()) throw DataError("lexicon must be a JSON array");
    std::vector<Category> cats;
    for (const auto& e : doc) {
      Category c;
      c.id = e.at("id").get<std::int64_t>();
      c.name = e.at("name").get<std::string>();
      read_if(e, "aliases", c.aliases);
      cats.push_back(std::move(c));
    }
    return Lexicon(std::move(cats));
  });
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(read_text_file(path));
}

std::string dump_lexicon(const Lexicon& lex) {
  ordered doc = ordered::array();
  for (const auto& c : lex.categories()) {
    doc.push_back({{"id", c.id}, {"name", c.name}, {"aliases", c.aliases}});
  }
  return doc.dump(2) + "\n";
}

// --- config ------------------------------------------------------------------

PipelineConfig parse_config(std::string_view text) {
  const json doc = parse_document(text, "config");
  return with_schema("config", [&] {
    if (!doc.is_object()) throw DataError("config must be a JSON object");
    reject_unknown(doc,
                   {"N", "M", "gamma", "sep_factor", "nms_conf", "nms_iou", "weighted_crossover",
                    "stop_word_filter", "em"},
                   "config");
    PipelineConfig cfg;
    read_if(doc, "N", cfg.N);
    read_if(doc, "M", cfg.M);
    read_if(doc, "gamma", cfg.gamma);
    read_if(doc, "sep_factor", cfg.sep_factor);
    read_if(doc, "nms_conf", cfg.nms_conf);
    read_if(doc, "nms_iou", cfg.nms_iou);
    read_if(doc, "weighted_crossover", cfg.weighted_crossover);
    read_if(doc, "stop_word_filter", cfg.stop_word_filter);
    if (const auto em = doc.find("em"); em != doc.end()) {
      reject_unknown(*em, {"max_iters", "tol", "var_floor"}, "config.em");
      read_if(*em, "max_iters", cfg.em.max_iters);
      read_if(*em, "tol", cfg.em.tol);
      read_if(*em, "var_floor", cfg.em.var_floor);
    }
    try {
      cfg.validate();
    } catch (const ArgumentError& e) {
      throw DataError(std::string("config: ") + e.what());
    }
    return cfg;
  });
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

std::string dump_config(const PipelineConfig& cfg) {
  ordered doc;
  doc["N"] = cfg.N;
  doc["M"] = cfg.M;
  doc["gamma"] = cfg.gamma;
  doc["sep_factor"] = cfg.sep_factor;
  doc["nms_conf"] = cfg.nms_conf;
  doc["nms_iou"] = cfg.nms_iou;
  doc["weighted_crossover"] = cfg.weighted_crossover;
  doc["stop_word_filter"] = cfg.stop_word_filter;
  doc["em"] = {{"max_iters", cfg.em.max_iters}, {"tol", cfg.em.tol},
               {"var_floor", cfg.em.var_floor}};
  return doc.dump(2) + "\n";
}

// --- COCO-flavored detection files --------------------------------------------

CocoGroundTruth parse_coco_gt(std::string_view text) {
  const json doc = parse_document(text, "ground truth");
  return with_schema("ground truth", [&] {
    CocoGroundTruth gt;
    for (const auto& img : doc.at("images")) {
      ImageInfo info;
      info.id = image_id_from(img.at("id"));
      read_if(img, "width", info.width);
      read_if(img, "height", info.height);
      gt.images.push_back(info);
      gt.boxes.images[info.id];
    }
    if (const auto cats = doc.find("categories"); cats != doc.end()) {
      for (const auto& c : *cats) {
        gt.categories.push_back({c.at("id").get<std::int64_t>(), c.value("name", ""), {}});
      }
    }
    for (const auto& a : doc.at("annotations")) {
      const ImageId id = image_id_from(a.at("image_id"));
      GroundTruthBox g;
      g.category_id = a.at("category_id").get<std::int64_t>();
      g.box = box_from(a.at("bbox"), "annotation");
      gt.boxes.images[id].push_back(g);
    }
    return gt;
  });
}

CocoGroundTruth load_coco_gt(const std::filesystem::path& path) {
  return parse_coco_gt(read_text_file(path));
}

std::string dump_coco_gt(const CocoGroundTruth& gt) {
  ordered doc;
  doc["images"] = ordered::array();
  for (const auto& img : gt.images) {
    doc["images"].push_back(
        {{"id", image_id_to(img.id)}, {"width", img.width}, {"height", img.height}});
  }
  doc["annotations"] = ordered::array();
  std::int64_t ann_id = 1;
  for (const auto& [image, boxes] : gt.boxes.images) {
    for (const auto& g : boxes) {
      doc["annotations"].push_back({{"id", ann_id++},
                                    {"image_id", image_id_to(image)},
                                    {"category_id", g.category_id},
                                    {"bbox", box_to(g.box)}});
    }
  }
  doc["categories"] = ordered::array();
  for (const auto& c : gt.categories) doc["categories"].push_back({{"id", c.id}, {"name", c.name}});
  return doc.dump(2) + "\n";
}

std::vector<Detection> parse_predictions(std::string_view text) {
  if (is_blank(text)) return {};
  const json doc = parse_document(text, "predictions");
  return with_schema("predictions", [&] {
    if (!doc.is_array()) throw DataError("predictions must be a JSON array");
    std::vector<Detection> dets;
    for (const auto& p : doc) {
      Detection d;
      d.image_id = image_id_from(p.at("image_id"));
      d.category_id = p.at("category_id").get<std::int64_t>();
      d.box = box_from(p.at("bbox"), "prediction");
      d.confidence = p.at("score").get<double>();
      if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
        throw DataError("prediction score outside [0, 1]");
      }
      dets.push_back(d);
    }
    return dets;
  });
}

std::vector<Detection> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_text_file(path));
}

std::string dump_predictions(std::vector<Detection> dets) {
  std::sort(dets.begin(), dets.end(), detection_output_less);
  ordered doc = ordered::array();
  for (const auto& d : dets) {
    doc.push_back({{"image_id", image_id_to(d.image_id)},
                   {"category_id", d.category_id},
                   {"bbox", box_to(d.box)},
                   {"score", d.confidence}});
  }
  return doc.dump(2) + "\n";
}

// --- phrases -------------------------------------------------------------------

std::vector<PhraseRecord> parse_phrases(std::string_view text) {
  std::vector<PhraseRecord> out;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (is_blank(lines[n])) continue;
    const std::string where = "phrases line " + std::to_string(n + 1);
    const json rec = parse_document(lines[n], where);
    out.push_back(with_schema(where, [&] {
      PhraseRecord p;
      p.phrase_id = rec.contains("id") ? (rec["id"].is_string() ? rec["id"].get<std::string>()
                                                                 : rec["id"].dump())
                                       : std::to_string(out.size());
      p.bundle = rec.at("bundle").get<std::string>();
      p.token_indices = rec.at("token_indices").get<std::vector<std::size_t>>();
      read_if(rec, "phrase", p.phrase);
      if (const auto gb = rec.find("gt_boxes"); gb != rec.end()) {
        for (const auto& b : *gb) p.gt_boxes.push_back(box_from(b, where));
      }
      if (p.token_indices.empty()) throw DataError(where + ": token_indices is empty");
      return p;
    }));
  }
  return out;
}

std::vector<PhraseRecord> load_phrases(const std::filesystem::path& path) {
  return parse_phrases(read_text_file(path));
}

std::string dump_phrases(const std::vector<PhraseRecord>& phrases) {
  std::string out;
  for (const auto& p : phrases) {
    ordered rec;
    rec["id"] = p.phrase_id;
    rec["bundle"] = p.bundle;
    rec["token_indices"] = p.token_indices;
    rec["phrase"] = p.phrase;
    rec["gt_boxes"] = ordered::array();
    for (const auto& b : p.gt_boxes) rec["gt_boxes"].push_back(box_to(b));
    out += rec.dump() + "\n";
  }
  return out;
}

std::vector<PhrasePrediction> parse_phrase_predictions(std::string_view text) {
  std::vector<PhrasePrediction> out;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (is_blank(lines[n])) continue;
    const std::string where = "grounding predictions line " + std::to_string(n + 1);
    const json rec = parse_document(lines[n], where);
    out.push_back(with_schema(where, [&] {
      PhrasePrediction p;
      p.phrase_id = rec.at("id").get<std::string>();
      p.box = box_from(rec.at("bbox"), where);
      return p;
    }));
  }
  return out;
}

std::string dump_phrase_predictions(const std::vector<PhrasePrediction>& preds,
                                    const std::vector<std::string>& bundles) {
  std::string out;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ordered rec;
    rec["id"] = preds[i].phrase_id;
    if (i < bundles.size()) rec["bundle"] = bundles[i];
    rec["bbox"] = box_to(preds[i].box);
    out += rec.dump() + "\n";
  }
  return out;
}

PhraseGroundTruth phrase_ground_truth(const std::vector<PhraseRecord>& phrases) {
  PhraseGroundTruth gt;
  for (const auto& p : phrases) {
    auto& boxes = gt[p.phrase_id];
    boxes.insert(boxes.end(), p.gt_boxes.begin(), p.gt_boxes.end());
  }
  return gt;
}

// --- synth spec ------------------------------------------------------------------

SynthFile parse_synth_file(std::string_view text) {
  const json doc = parse_document(text, "synth spec");
  return with_schema("synth spec", [&] {
    SynthFile file;
    read_if(doc, "categories", file.categories);
    if (const auto corpus = doc.find("corpus"); corpus != doc.end()) {
      CorpusSpec c;
      reject_unknown(*corpus,
                     {"num_images", "min_grid", "max_grid", "min_objects", "max_objects",
                      "noise_sigma", "patch_size", "d_vit", "seed", "categories"},
                     "synth corpus");
      read_if(*corpus, "num_images", c.num_images);
      read_if(*corpus, "min_grid", c.min_grid);
      read_if(*corpus, "max_grid", c.max_grid);
      read_if(*corpus, "min_objects", c.min_objects);
      read_if(*corpus, "max_objects", c.max_objects);
      read_if(*corpus, "noise_sigma", c.noise_sigma);
      read_if(*corpus, "patch_size", c.patch_size);
      read_if(*corpus, "d_vit", c.d_vit);
      read_if(*corpus, "seed", c.seed);
      read_if(*corpus, "categories", c.categories);
      try {
        file.images = random_corpus(c);
      } catch (const ArgumentError& e) {
        throw DataError(std::string("synth corpus: ") + e.what());
      }
      if (file.categories.empty()) file.categories = c.categories;
    }
    if (const auto images = doc.find("images"); images != doc.end()) {
      for (const auto& img : *images) {
        SynthSpec s;
        read_if(img, "grid_h", s.grid_h);
        read_if(img, "grid_w", s.grid_w);
        read_if(img, "patch_size", s.patch_size);
        read_if(img, "d_vit", s.d_vit);
        read_if(img, "noise_sigma", s.noise_sigma);
        read_if(img, "seed", s.rng_seed);
        for (const auto& o : img.at("objects")) {
          const auto r = o.at("rect").get<std::vector<std::size_t>>();
          if (r.size() != 4) throw DataError("synth object rect must be [r0, c0, r1, c1]");
          s.objects.push_back({o.at("category").get<std::string>(), {r[0], r[1], r[2], r[3]}});
        }
        file.images.push_back(std::move(s));
      }
    }
    // Categories not listed explicitly get ids in order of first appearance.
    std::set<std::string> known(file.categories.begin(), file.categories.end());
    for (const auto& s : file.images) {
      for (const auto& o : s.objects) {
        if (known.insert(o.category).second) file.categories.push_back(o.category);
      }
    }
    return file;
  });
}

SynthFile load_synth_file(const std::filesystem::path& path) {
  return parse_synth_file(read_text_file(path));
}

}  // namespace wsa::json
