#pragma once

#include <cstdint>
#include <string>

#include "lesionbench/report.hpp"

namespace lesionbench {

/// Everything a subcommand needs; unused fields are ignored. Paths are
/// validated by the command before any computation starts.
struct RunConfig {
  int task = 1;
  std::string images_dir;
  std::string truth_path;  // mask dir (task 1/2), ground-truth CSV (task 3)
  std::string pred_path;   // predictor root, or predictions CSV
  std::string out_dir;
  std::string ids_path;    // optional id-list file restricting the run
  std::uint64_t seed = 0;
  bool strict = true;             // missing predictions are fatal
  bool intersect_boundary = true; // clip class masks to the boundary mask
  bool use_baseline = false;      // boundary masks from the Otsu baseline
  bool stratified = false;        // class-stratified split (task 3)
  std::string format = "json";    // "csv" additionally writes per_image.csv
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  int augment_count = 0;
  int threads = 0;  // 0: LESION_BENCH_THREADS env var, then hardware
};

/// Discover + deterministic split; writes train.txt and test.txt.
Report cmd_split(const RunConfig& cfg);

/// N augmented variants per image (suffix _aug<n>) plus manifest.json.
Report cmd_augment(const RunConfig& cfg);

/// Per-image Jaccard and S1 over ground-truth/prediction mask pairs.
Report cmd_eval_boundary(const RunConfig& cfg);

/// Per-class S2(j) with the empty-ground-truth exclusion rule, and S2.
Report cmd_eval_attributes(const RunConfig& cfg);

/// Hybrid area-vote classification; writes predictions.csv and
/// vote_trace.jsonl.
Report cmd_diagnose(const RunConfig& cfg);

/// S3, confusion matrix and balanced accuracy from two diagnosis CSVs.
Report cmd_eval_diagnosis(const RunConfig& cfg);

/// Otsu baseline masks for every image, written in predictor layout
/// (<out>/task1/<id>_segmentation.png).
Report cmd_baseline_segment(const RunConfig& cfg);

/// Dispatch by subcommand name ("split", "augment", "eval-boundary",
/// "eval-attributes", "diagnose", "eval-diagnosis", "baseline-segment").
Report run_command(const std::string& command, const RunConfig& cfg);

}  // namespace lesionbench
