// lesion-bench: command-line front end for the lesionbench shared library.
// Parses arguments, fills an lb_run_config and hands off to lb_run; all
// actual work happens behind the C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "lesionbench.h"

namespace {

struct Options {
  std::int64_t task = 1;
  std::string images;
  std::string truth;
  std::string pred;
  std::string out;
  std::string ids;
  std::string format = "json";
  std::int64_t seed = 0;
  bool skip_missing = false;
  bool no_intersect = false;
  bool baseline = false;
  bool stratified = false;
  std::int64_t train_count = 0;
  std::int64_t test_count = 0;
  std::int64_t count = 1;
  std::int64_t threads = 0;
};

int run(const std::string& command, const Options& opt) {
  lb_run_config* config = nullptr;
  if (lb_config_create(&config) != LB_OK) {
    std::fprintf(stderr, "error: %s\n", lb_last_error());
    return 1;
  }

  lb_status status = LB_OK;
  auto set_str = [&](const char* key, const std::string& value) {
    if (status == LB_OK && !value.empty()) {
      status = lb_config_set_string(config, key, value.c_str());
    }
  };
  auto set_int = [&](const char* key, std::int64_t value) {
    if (status == LB_OK) status = lb_config_set_int(config, key, value);
  };

  set_str("images", opt.images);
  set_str("truth", opt.truth);
  set_str("pred", opt.pred);
  set_str("out", opt.out);
  set_str("ids", opt.ids);
  set_str("format", opt.format);
  set_int("task", opt.task);
  set_int("seed", opt.seed);
  set_int("strict", opt.skip_missing ? 0 : 1);
  set_int("intersect-boundary", opt.no_intersect ? 0 : 1);
  set_int("baseline", opt.baseline ? 1 : 0);
  set_int("stratified", opt.stratified ? 1 : 0);
  set_int("train-count", opt.train_count);
  set_int("test-count", opt.test_count);
  set_int("count", opt.count);
  set_int("threads", opt.threads);
  if (status != LB_OK) {
    std::fprintf(stderr, "error: %s\n", lb_last_error());
    lb_config_free(config);
    return 1;
  }

  lb_report* report = nullptr;
  status = lb_run(config, command.c_str(), &report);
  lb_config_free(config);
  if (status != LB_OK) {
    std::fprintf(stderr, "error (%s): %s\n", lb_status_name(status),
                 lb_last_error());
    return 1;
  }

  for (size_t i = 0; i < lb_report_warning_count(report); ++i) {
    std::fprintf(stderr, "warning: %s\n", lb_report_warning(report, i));
  }
  size_t errors = lb_report_error_count(report);
  for (size_t i = 0; i < errors; ++i) {
    std::fprintf(stderr, "error: %s\n", lb_report_error(report, i));
  }

  char* aggregates = nullptr;
  if (lb_report_aggregates_json(report, &aggregates) == LB_OK) {
    std::printf("%s\n", aggregates);
    lb_string_free(aggregates);
  }
  lb_report_free(report);
  return errors == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISIC 2018 lesion analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lb_version()));

  Options opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out, "Output directory")->required();
    cmd->add_option("--threads", opt.threads,
                    "Worker threads (default: LESION_BENCH_THREADS or all "
                    "cores)");
  };
  auto add_eval_flags = [&](CLI::App* cmd) {
    cmd->add_flag("--skip-missing{true},--strict{false}", opt.skip_missing,
                  "Warn and skip missing predictions instead of failing "
                  "(default: strict)");
    cmd->add_option("--format", opt.format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--ids", opt.ids, "Restrict the run to ids listed in "
                                      "this file (one per line)");
  };

  CLI::App* split = app.add_subcommand(
      "split", "Deterministic train/test split of a dataset");
  split->add_option("--task", opt.task, "Challenge task (1, 2 or 3)")
      ->required()
      ->check(CLI::Range(1, 3));
  split->add_option("--images", opt.images, "Image directory")->required();
  split->add_option("--truth", opt.truth,
                    "Mask directory (task 1/2) or ground-truth CSV (task 3)")
      ->required();
  split->add_option("--seed", opt.seed, "Shuffle seed")->required();
  split->add_option("--train-count", opt.train_count, "Training set size")
      ->required();
  split->add_option("--test-count", opt.test_count, "Test set size")
      ->required();
  split->add_flag("--stratified", opt.stratified,
                  "Stratify by diagnosis class (task 3 only)");
  add_common(split);

  CLI::App* augment = app.add_subcommand(
      "augment", "Write augmented copies of images (and masks)");
  augment->add_option("--task", opt.task,
                      "Mask naming convention to follow (1 or 2)")
      ->check(CLI::Range(1, 2));
  augment->add_option("--images", opt.images, "Image directory")->required();
  augment->add_option("--truth", opt.truth,
                      "Mask directory augmented alongside the images");
  augment->add_option("--seed", opt.seed, "Sampling seed")->required();
  augment->add_option("--count", opt.count, "Variants per image")->required();
  add_common(augment);

  CLI::App* eval_boundary = app.add_subcommand(
      "eval-boundary", "Task 1 score: per-image Jaccard and S1");
  eval_boundary->add_option("--truth", opt.truth,
                            "Ground-truth mask directory")
      ->required();
  eval_boundary->add_option("--pred", opt.pred, "Predictor root directory")
      ->required();
  add_common(eval_boundary);
  add_eval_flags(eval_boundary);

  CLI::App* eval_attributes = app.add_subcommand(
      "eval-attributes", "Task 2 score: per-class S2(j) and S2");
  eval_attributes->add_option("--truth", opt.truth,
                              "Ground-truth mask directory")
      ->required();
  eval_attributes->add_option("--pred", opt.pred, "Predictor root directory")
      ->required();
  add_common(eval_attributes);
  add_eval_flags(eval_attributes);

  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "Hybrid area-vote diagnosis over predicted masks");
  diagnose->add_option("--images", opt.images, "Image directory")->required();
  diagnose->add_option("--pred", opt.pred, "Predictor root directory")
      ->required();
  diagnose->add_flag("--no-intersect-boundary{true},--intersect-boundary{false}",
                     opt.no_intersect,
                     "Skip clipping class masks to the boundary mask "
                     "(default: clip)");
  diagnose->add_flag("--baseline", opt.baseline,
                     "Take boundary masks from the Otsu baseline segmenter");
  add_common(diagnose);
  add_eval_flags(diagnose);

  CLI::App* eval_diagnosis = app.add_subcommand(
      "eval-diagnosis", "Task 3 score: S3, confusion matrix, balanced "
                        "accuracy");
  eval_diagnosis->add_option("--truth", opt.truth, "Ground-truth CSV")
      ->required();
  eval_diagnosis->add_option("--pred", opt.pred, "Predictions CSV")
      ->required();
  add_common(eval_diagnosis);
  add_eval_flags(eval_diagnosis);

  CLI::App* baseline_segment = app.add_subcommand(
      "baseline-segment", "Otsu baseline boundary masks in predictor layout");
  baseline_segment->add_option("--images", opt.images, "Image directory")
      ->required();
  baseline_segment->add_option("--ids", opt.ids,
                               "Restrict to ids listed in this file");
  add_common(baseline_segment);

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* cmd : app.get_subcommands()) {
    return run(cmd->get_name(), opt);
  }
  return 1;
}
