#include <doctest.h>

#include <fstream>
#include <set>

#include "lesionbench/dataset.hpp"
#include "lesionbench/error.hpp"
#include "lesionbench/png_io.hpp"
#include "lesionbench/rng.hpp"
#include "test_helpers.hpp"

using namespace lesionbench;
using testutil::TempDir;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fabricated index: split/neighbour code only needs ids (and labels).
DatasetIndex synthetic_index(std::size_t n, bool with_labels = false) {
  DatasetIndex index;
  index.task = with_labels ? 3 : 1;
  for (std::size_t i = 0; i < n; ++i) {
    DatasetEntry entry;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "ISIC_%07zu", i);
    entry.image_id = buf;
    if (with_labels) {
      entry.label = static_cast<DiagnosisLabel>(i % kDiagnosisClassCount);
    }
    index.entries.push_back(std::move(entry));
  }
  return index;
}

}  // namespace

TEST_CASE("ground-truth CSV one-hot parsing") {
  TempDir dir("csv");
  auto path = dir / "truth.csv";
  write_file(path,
             "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
             "ISIC_0024306,0.0,1.0,0.0,0.0,0.0,0.0,0.0\n"
             "ISIC_0024307,1.0,0.0,0.0,0.0,0.0,0.0,0.0\n");
  GroundTruthTable table = load_ground_truth_csv(path.string());
  CHECK(table.rows.size() == 2);
  CHECK(table.rows.at("ISIC_0024306") == DiagnosisLabel::kNv);
  CHECK(table.rows.at("ISIC_0024307") == DiagnosisLabel::kMel);
}

TEST_CASE("ground-truth CSV rejects malformed rows") {
  TempDir dir("csvbad");

  auto two_hot = dir / "two_hot.csv";
  write_file(two_hot,
             "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
             "a,1.0,1.0,0.0,0.0,0.0,0.0,0.0\n");
  CHECK_THROWS_WITH_AS(load_ground_truth_csv(two_hot.string()),
                       doctest::Contains("one-hot"), ParseError);

  auto no_hot = dir / "no_hot.csv";
  write_file(no_hot,
             "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
             "a,0.0,0.0,0.0,0.0,0.0,0.0,0.0\n");
  CHECK_THROWS_AS(load_ground_truth_csv(no_hot.string()), ParseError);

  auto fraction = dir / "fraction.csv";
  write_file(fraction,
             "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
             "a,0.5,0.5,0.0,0.0,0.0,0.0,0.0\n");
  CHECK_THROWS_AS(load_ground_truth_csv(fraction.string()), ParseError);

  auto dup = dir / "dup.csv";
  write_file(dup,
             "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
             "a,1.0,0.0,0.0,0.0,0.0,0.0,0.0\n"
             "a,0.0,1.0,0.0,0.0,0.0,0.0,0.0\n");
  CHECK_THROWS_WITH_AS(load_ground_truth_csv(dup.string()),
                       doctest::Contains("duplicate"), ParseError);

  auto bad_header = dir / "bad_header.csv";
  write_file(bad_header, "image,MEL,NV,BCC,AKIEC,BKL,DF\na,1,0,0,0,0,0\n");
  CHECK_THROWS_AS(load_ground_truth_csv(bad_header.string()), ParseError);

  auto bad_number = dir / "bad_number.csv";
  write_file(bad_number,
             "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
             "a,1.0,zero,0.0,0.0,0.0,0.0,0.0\n");
  CHECK_THROWS_WITH_AS(load_ground_truth_csv(bad_number.string()),
                       doctest::Contains("unparseable"), ParseError);
}

TEST_CASE("one-hot tolerance absorbs formatting noise") {
  TempDir dir("csvtol");
  auto path = dir / "truth.csv";
  write_file(path,
             "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
             "a,0.0000,0.9999999,0.0000001,0.0,0.0,0.0,0.0\n");
  GroundTruthTable table = load_ground_truth_csv(path.string());
  CHECK(table.rows.at("a") == DiagnosisLabel::kNv);
}

TEST_CASE("prediction CSV round trip preserves labels and format") {
  TempDir dir("pred");
  auto path = dir / "predictions.csv";

  std::map<std::string, std::array<double, kDiagnosisClassCount>> rows;
  rows["img1"] = {0, 1, 0, 0, 0, 0, 0};
  rows["img2"] = {1, 0, 0, 0, 0, 0, 0};
  write_diagnosis_predictions(path.string(), rows);

  std::string text = read_file(path);
  CHECK(text ==
        "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
        "img1,0.0000,1.0000,0.0000,0.0000,0.0000,0.0000,0.0000\n"
        "img2,1.0000,0.0000,0.0000,0.0000,0.0000,0.0000,0.0000\n");

  GroundTruthTable loaded = load_ground_truth_csv(path.string());
  CHECK(loaded.rows.at("img1") == DiagnosisLabel::kNv);
  CHECK(loaded.rows.at("img2") == DiagnosisLabel::kMel);
}

TEST_CASE("uniform confidence vector prints as seven 0.1429 entries") {
  TempDir dir("pred7");
  auto path = dir / "predictions.csv";
  std::map<std::string, std::array<double, kDiagnosisClassCount>> rows;
  rows["u"].fill(1.0 / 7.0);
  write_diagnosis_predictions(path.string(), rows);
  CHECK(read_file(path) ==
        "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
        "u,0.1429,0.1429,0.1429,0.1429,0.1429,0.1429,0.1429\n");

  auto loaded = load_diagnosis_predictions(path.string());
  CHECK(loaded.at("u")[0] == doctest::Approx(0.1429));
}

TEST_CASE("prediction writer rejects negative confidences") {
  TempDir dir("predneg");
  std::map<std::string, std::array<double, kDiagnosisClassCount>> rows;
  rows["x"] = {-0.1, 1.1, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(
      write_diagnosis_predictions((dir / "p.csv").string(), rows),
      ConfigError);
}

TEST_CASE("task-1 discovery pairs images with segmentation masks") {
  TempDir dir("disc1");
  auto images = dir / "images";
  auto masks = dir / "masks";
  std::filesystem::create_directories(images);
  std::filesystem::create_directories(masks);

  SplitMix64 rng(3);
  for (int i = 0; i < 4; ++i) {
    std::string id = "ISIC_000" + std::to_string(i);
    write_image_png(testutil::random_image(rng, 20, 15, 3),
                    (images / (id + ".png")).string());
    write_mask_png(testutil::random_mask(rng, 20, 15, 0.5),
                   (masks / (id + "_segmentation.png")).string());
  }

  DatasetIndex index = discover(1, images.string(), masks.string());
  CHECK(index.entries.size() == 4);
  CHECK(index.entries[0].image_id == "ISIC_0000");
  CHECK(index.entries[0].mask_paths.count("segmentation") == 1);
  CHECK(index.find("ISIC_0002") != nullptr);
  CHECK(index.find("nope") == nullptr);

  // image without mask
  write_image_png(testutil::random_image(rng, 20, 15, 3),
                  (images / "ISIC_0009.png").string());
  CHECK_THROWS_WITH_AS(discover(1, images.string(), masks.string()),
                       doctest::Contains("ISIC_0009"), IoError);
  std::filesystem::remove(images / "ISIC_0009.png");

  // mask without image
  write_mask_png(testutil::random_mask(rng, 20, 15, 0.5),
                 (masks / "ISIC_0042_segmentation.png").string());
  CHECK_THROWS_WITH_AS(discover(1, images.string(), masks.string()),
                       doctest::Contains("without an image"), IoError);
}

TEST_CASE("discovery rejects mask/image dimension mismatches") {
  TempDir dir("discdim");
  auto images = dir / "images";
  auto masks = dir / "masks";
  std::filesystem::create_directories(images);
  std::filesystem::create_directories(masks);

  SplitMix64 rng(5);
  write_image_png(testutil::random_image(rng, 20, 15, 3),
                  (images / "a.png").string());
  write_mask_png(testutil::random_mask(rng, 10, 15, 0.5),
                 (masks / "a_segmentation.png").string());
  CHECK_THROWS_WITH_AS(discover(1, images.string(), masks.string()),
                       doctest::Contains("dimension"), IoError);
}

TEST_CASE("task-2 discovery requires all five attribute masks") {
  TempDir dir("disc2");
  auto images = dir / "images";
  auto masks = dir / "masks";
  std::filesystem::create_directories(images);
  std::filesystem::create_directories(masks);

  SplitMix64 rng(7);
  for (int i = 0; i < 3; ++i) {
    std::string id = "ISIC_100" + std::to_string(i);
    write_image_png(testutil::random_image(rng, 16, 16, 3),
                    (images / (id + ".png")).string());
    for (auto cls : all_attribute_classes()) {
      write_mask_png(
          testutil::random_mask(rng, 16, 16, 0.3),
          (masks / (id + "_attribute_" + std::string(attribute_name(cls)) +
                    ".png"))
              .string());
    }
  }
  DatasetIndex index = discover(2, images.string(), masks.string());
  CHECK(index.entries.size() == 3);
  for (const auto& entry : index.entries) {
    CHECK(entry.mask_paths.size() == 5);
  }

  std::filesystem::remove(masks / "ISIC_1001_attribute_streaks.png");
  CHECK_THROWS_WITH_AS(discover(2, images.string(), masks.string()),
                       doctest::Contains("streaks"), IoError);
}

TEST_CASE("task-3 discovery joins images with CSV rows") {
  TempDir dir("disc3");
  auto images = dir / "images";
  std::filesystem::create_directories(images);
  SplitMix64 rng(9);
  write_image_png(testutil::random_image(rng, 8, 8, 3),
                  (images / "a.png").string());
  write_image_png(testutil::random_image(rng, 8, 8, 3),
                  (images / "b.png").string());

  auto csv = dir / "truth.csv";
  write_file(csv,
             "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC\n"
             "a,0.0,1.0,0.0,0.0,0.0,0.0,0.0\n"
             "b,0.0,0.0,0.0,0.0,0.0,0.0,1.0\n");
  DatasetIndex index = discover(3, images.string(), csv.string());
  CHECK(index.entries.size() == 2);
  CHECK(index.entries[0].label == DiagnosisLabel::kNv);
  CHECK(index.entries[1].label == DiagnosisLabel::kVasc);

  write_image_png(testutil::random_image(rng, 8, 8, 3),
                  (images / "c.png").string());
  CHECK_THROWS_WITH_AS(discover(3, images.string(), csv.string()),
                       doctest::Contains("without a diagnosis row"), IoError);
}

TEST_CASE("empty directories produce an empty index without error") {
  TempDir dir("discempty");
  auto images = dir / "images";
  auto masks = dir / "masks";
  std::filesystem::create_directories(images);
  std::filesystem::create_directories(masks);
  DatasetIndex index = discover(1, images.string(), masks.string());
  CHECK(index.entries.empty());
}

TEST_CASE("discovery is independent of listing order") {
  // std::map ordering in list_pngs makes this structural; verify the
  // index is sorted and stable across two scans.
  TempDir dir("discorder");
  auto images = dir / "images";
  auto masks = dir / "masks";
  std::filesystem::create_directories(images);
  std::filesystem::create_directories(masks);
  SplitMix64 rng(13);
  for (const char* id : {"zz", "aa", "mm"}) {
    write_image_png(testutil::random_image(rng, 6, 6, 3),
                    (images / (std::string(id) + ".png")).string());
    write_mask_png(testutil::random_mask(rng, 6, 6, 0.5),
                   (masks / (std::string(id) + "_segmentation.png")).string());
  }
  DatasetIndex first = discover(1, images.string(), masks.string());
  DatasetIndex second = discover(1, images.string(), masks.string());
  CHECK(first.ids() == std::vector<std::string>{"aa", "mm", "zz"});
  CHECK(first.ids() == second.ids());
}

TEST_CASE("split produces the challenge sizes deterministically") {
  DatasetIndex small = synthetic_index(2594);
  SplitAssignment a = split(small, 2294, 300, 42);
  CHECK(a.train_ids.size() == 2294);
  CHECK(a.test_ids.size() == 300);

  std::set<std::string> train(a.train_ids.begin(), a.train_ids.end());
  std::set<std::string> test(a.test_ids.begin(), a.test_ids.end());
  CHECK(train.size() == 2294);
  CHECK(test.size() == 300);
  for (const auto& id : test) CHECK(train.count(id) == 0);

  SplitAssignment b = split(small, 2294, 300, 42);
  CHECK(a.train_ids == b.train_ids);
  CHECK(a.test_ids == b.test_ids);

  SplitAssignment c = split(small, 2294, 300, 43);
  CHECK(a.test_ids != c.test_ids);

  DatasetIndex large = synthetic_index(10015);
  SplitAssignment d = split(large, 8015, 2000, 7);
  CHECK(d.train_ids.size() == 8015);
  CHECK(d.test_ids.size() == 2000);

  CHECK_THROWS_AS(split(small, 2294, 299, 42), ConfigError);
}

TEST_CASE("stratified split respects class proportions") {
  DatasetIndex index = synthetic_index(700, true);  // 100 per class
  SplitAssignment a = split_stratified(index, 560, 140, 5);
  CHECK(a.train_ids.size() == 560);
  CHECK(a.test_ids.size() == 140);

  // Count test members per class: ids are round-robin over classes.
  std::array<int, kDiagnosisClassCount> per_class{};
  for (const auto& id : a.test_ids) {
    std::size_t n = std::stoul(id.substr(5));
    ++per_class[n % kDiagnosisClassCount];
  }
  for (int c = 0; c < kDiagnosisClassCount; ++c) CHECK(per_class[c] == 20);

  SplitAssignment b = split_stratified(index, 560, 140, 5);
  CHECK(a.test_ids == b.test_ids);

  DatasetIndex unlabeled = synthetic_index(10);
  CHECK_THROWS_AS(split_stratified(unlabeled, 8, 2, 1), ConfigError);
}

TEST_CASE("id list files round trip byte-identically") {
  TempDir dir("ids");
  DatasetIndex index = synthetic_index(100);
  SplitAssignment a = split(index, 80, 20, 11);

  auto train_path = dir / "train.txt";
  write_id_list(train_path.string(), a.train_ids);
  std::string once = read_file(train_path);
  write_id_list(train_path.string(), a.train_ids);
  CHECK(once == read_file(train_path));
  CHECK(read_id_list(train_path.string()) == a.train_ids);
}

TEST_CASE("index JSON cache round trips") {
  TempDir dir("cache");
  auto images = dir / "images";
  auto masks = dir / "masks";
  std::filesystem::create_directories(images);
  std::filesystem::create_directories(masks);
  SplitMix64 rng(15);
  write_image_png(testutil::random_image(rng, 6, 6, 3),
                  (images / "q.png").string());
  write_mask_png(testutil::random_mask(rng, 6, 6, 0.5),
                 (masks / "q_segmentation.png").string());

  DatasetIndex index = discover(1, images.string(), masks.string());
  DatasetIndex restored = index_from_json(index_to_json(index));
  CHECK(restored.task == index.task);
  REQUIRE(restored.entries.size() == index.entries.size());
  CHECK(restored.entries[0].image_id == index.entries[0].image_id);
  CHECK(restored.entries[0].mask_paths == index.entries[0].mask_paths);

  CHECK_THROWS_AS(index_from_json("{broken"), ParseError);
}
