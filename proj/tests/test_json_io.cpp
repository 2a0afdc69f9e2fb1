#include "doctest.h"
#include "support.hpp"
#include "wsa/error.hpp"
#include "wsa/json_io.hpp"

using namespace wsa;

TEST_CASE("lexicon round trip") {
  const auto lex = json::parse_lexicon(
      R"([{"id": 18, "name": "dog", "aliases": ["dog", "puppy"]}, {"id": 1, "name": "person"}])");
  REQUIRE(lex.size() == 2);
  const auto again = json::parse_lexicon(json::dump_lexicon(lex));
  CHECK(again.size() == 2);
  CHECK(again.categories()[0].aliases == lex.categories()[0].aliases);
  CHECK_THROWS_AS(json::parse_lexicon("[{\"name\": \"x\"}]"), DataError);
  CHECK_THROWS_AS(json::parse_lexicon("[{"), FormatError);
}

TEST_CASE("config parsing") {
  const auto cfg = json::parse_config(R"({"N": 2, "gamma": 2.0, "em": {"max_iters": 50}})");
  CHECK(cfg.N == 2);
  CHECK(cfg.M == 10);
  CHECK(cfg.gamma == 2.0);
  CHECK(cfg.em.max_iters == 50);
  CHECK(cfg.nms_conf == 0.2);
  CHECK(cfg.nms_iou == 0.5);
  CHECK_THROWS_AS(json::parse_config(R"({"gama": 2})"), DataError);
  CHECK_THROWS_AS(json::parse_config(R"({"N": "three"})"), DataError);
  CHECK_THROWS_AS(json::parse_config(R"({"N": 20})"), DataError);
  const auto back = json::parse_config(json::dump_config(cfg));
  CHECK(back.N == 2);
  CHECK(back.em.max_iters == 50);
}

TEST_CASE("empty config gives the published defaults") {
  const auto cfg = json::parse_config("{}");
  CHECK(cfg.N == 3);
  CHECK(cfg.M == 10);
  CHECK(cfg.gamma == 1.75);
  CHECK(cfg.nms_conf == 0.2);
  CHECK(cfg.nms_iou == 0.5);
}

TEST_CASE("coco ground truth uses xywh boxes") {
  const auto gt = json::parse_coco_gt(R"({
    "images": [{"id": 3, "width": 64, "height": 48}],
    "annotations": [{"id": 1, "image_id": 3, "category_id": 18, "bbox": [4, 8, 10, 20]}],
    "categories": [{"id": 18, "name": "dog"}]})");
  REQUIRE(gt.boxes.images.count(ImageId(std::int64_t{3})) == 1);
  const auto& b = gt.boxes.images.at(ImageId(std::int64_t{3}))[0];
  CHECK(b.category_id == 18);
  CHECK(b.box == BoxPx{4, 8, 14, 28});
  const auto again = json::parse_coco_gt(json::dump_coco_gt(gt));
  CHECK(again.boxes.images.at(ImageId(std::int64_t{3}))[0].box == b.box);
}

TEST_CASE("predictions round trip and sort") {
  const std::vector<Detection> dets{{{0, 0, 2, 2}, 2, 0.5, ImageId("7")},
                                    {{1, 1, 3, 4}, 1, 0.25, ImageId("7")},
                                    {{0, 0, 1, 1}, 1, 0.75, ImageId("10")}};
  const auto text = json::dump_predictions(dets);
  const auto back = json::parse_predictions(text);
  REQUIRE(back.size() == 3);
  CHECK(back[0].image_id == ImageId("7"));
  CHECK(back[0].category_id == 1);
  CHECK(back[2].image_id == ImageId("10"));
  CHECK(back[1].box == BoxPx{0, 0, 2, 2});
  CHECK(json::dump_predictions(back) == text);
  CHECK(json::parse_predictions("").empty());
  CHECK(json::parse_predictions("  \n").empty());
}

TEST_CASE("phrases jsonl") {
  const auto recs = json::parse_phrases(
      "{\"bundle\": \"a.wsab\", \"token_indices\": [2, 3], \"phrase\": \"red boat\", "
      "\"gt_boxes\": [[1, 2, 3, 4]]}\n"
      "\n"
      "{\"id\": \"p9\", \"bundle\": \"b.wsab\", \"token_indices\": [0], \"gt_boxes\": []}\n");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].phrase_id == "0");
  CHECK(recs[0].token_indices == std::vector<std::size_t>{2, 3});
  CHECK(recs[0].gt_boxes[0] == BoxPx{1, 2, 4, 6});
  CHECK(recs[1].phrase_id == "p9");
  const auto again = json::parse_phrases(json::dump_phrases(recs));
  CHECK(again[0].phrase == "red boat");
  const auto truth = json::phrase_ground_truth(recs);
  CHECK(truth.at("0").size() == 1);
}

TEST_CASE("synth spec files") {
  const auto f = json::parse_synth_file(R"({"images": [{"grid_h": 6, "grid_w": 9,
      "objects": [{"category": "cat", "rect": [1, 2, 3, 4]}]}]})");
  REQUIRE(f.images.size() == 1);
  CHECK(f.images[0].grid_w == 9);
  CHECK(f.images[0].objects[0].rect == PatchRect{1, 2, 3, 4});
  CHECK(f.categories == std::vector<std::string>{"cat"});

  const auto c = json::parse_synth_file(R"({"corpus": {"num_images": 4, "seed": 2}})");
  CHECK(c.images.size() == 4);
  CHECK_THROWS_AS(json::parse_synth_file(R"({"corpus": {"images": 4}})"), DataError);
}
