#include "lesionbench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "lesionbench/augment.hpp"
#include "lesionbench/dataset.hpp"
#include "lesionbench/diagnose.hpp"
#include "lesionbench/error.hpp"
#include "lesionbench/metrics.hpp"
#include "lesionbench/png_io.hpp"
#include "lesionbench/rng.hpp"

namespace fs = std::filesystem;

namespace lesionbench {

namespace {

int resolve_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("LESION_BENCH_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first
// exception, in index order, is rethrown after all workers finish, so a
// failure is deterministic regardless of scheduling.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  int workers = std::clamp<int>(threads, 1, static_cast<int>(n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json echo;
  echo["task"] = cfg.task;
  echo["images"] = cfg.images_dir;
  echo["truth"] = cfg.truth_path;
  echo["pred"] = cfg.pred_path;
  echo["out"] = cfg.out_dir;
  echo["ids"] = cfg.ids_path;
  echo["seed"] = cfg.seed;
  echo["strict"] = cfg.strict;
  echo["intersect_boundary"] = cfg.intersect_boundary;
  echo["baseline"] = cfg.use_baseline;
  echo["stratified"] = cfg.stratified;
  echo["format"] = cfg.format;
  echo["train_count"] = cfg.train_count;
  echo["test_count"] = cfg.test_count;
  echo["augment_count"] = cfg.augment_count;
  echo["threads"] = resolve_threads(cfg);
  return echo;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

fs::path ensure_out_dir(const RunConfig& cfg) {
  require(!cfg.out_dir.empty(), "--out is required");
  fs::path out(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_report_files(const Report& report, const RunConfig& cfg,
                        const fs::path& out) {
  write_text(out / "report.json", report.to_json_text());
  if (cfg.format == "csv") {
    write_text(out / "per_image.csv", report.to_csv());
  }
}

Report make_report(const std::string& command, const RunConfig& cfg) {
  Report report;
  report.command = command;
  report.config = config_echo(cfg);
  return report;
}

// Stems of `<id><suffix>.png` files under dir.
std::vector<std::string> ids_with_suffix(const std::string& dir,
                                         const std::string& suffix) {
  if (!fs::exists(dir) || !fs::is_directory(dir)) {
    throw IoError("directory not found: " + dir);
  }
  std::set<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") {
      continue;
    }
    std::string stem = entry.path().stem().string();
    if (suffix.empty()) {
      ids.insert(stem);
    } else if (stem.size() > suffix.size() &&
               stem.ends_with(suffix)) {
      ids.insert(stem.substr(0, stem.size() - suffix.size()));
    }
  }
  return {ids.begin(), ids.end()};
}

std::vector<std::string> evaluation_ids(const RunConfig& cfg,
                                        const std::string& dir,
                                        const std::string& suffix) {
  if (!cfg.ids_path.empty()) return read_id_list(cfg.ids_path);
  return ids_with_suffix(dir, suffix);
}

void list_missing(const std::string& what,
                  const std::vector<std::string>& missing) {
  if (missing.empty()) return;
  std::string msg = what + " (" + std::to_string(missing.size()) + "): ";
  std::size_t shown = std::min<std::size_t>(missing.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) msg += ", ";
    msg += missing[i];
  }
  if (missing.size() > shown) {
    msg += ", +" + std::to_string(missing.size() - shown) + " more";
  }
  throw ConfigError(msg);
}

}  // namespace

Report cmd_split(const RunConfig& cfg) {
  require(!cfg.images_dir.empty(), "--images is required");
  require(!cfg.truth_path.empty(), "--truth is required");
  require(cfg.train_count + cfg.test_count > 0,
          "--train-count/--test-count are required");
  fs::path out = ensure_out_dir(cfg);

  Report report = make_report("split", cfg);
  DatasetIndex index = discover(cfg.task, cfg.images_dir, cfg.truth_path);
  SplitAssignment assignment =
      cfg.stratified
          ? split_stratified(index, cfg.train_count, cfg.test_count, cfg.seed)
          : split(index, cfg.train_count, cfg.test_count, cfg.seed);

  write_id_list((out / "train.txt").string(), assignment.train_ids);
  write_id_list((out / "test.txt").string(), assignment.test_ids);

  report.aggregates["total"] = index.entries.size();
  report.aggregates["train"] = assignment.train_ids.size();
  report.aggregates["test"] = assignment.test_ids.size();
  report.aggregates["stratified"] = cfg.stratified;
  write_report_files(report, cfg, out);
  return report;
}

Report cmd_augment(const RunConfig& cfg) {
  require(!cfg.images_dir.empty(), "--images is required");
  require(cfg.augment_count >= 0, "--count must be non-negative");
  fs::path out = ensure_out_dir(cfg);

  Report report = make_report("augment", cfg);

  // With a mask directory the task decides which masks ride along.
  DatasetIndex index;
  if (!cfg.truth_path.empty()) {
    index = discover(cfg.task, cfg.images_dir, cfg.truth_path);
  } else {
    index.task = cfg.task;
    for (const auto& id : ids_with_suffix(cfg.images_dir, "")) {
      DatasetEntry entry;
      entry.image_id = id;
      entry.image_path = (fs::path(cfg.images_dir) / (id + ".png")).string();
      index.entries.push_back(std::move(entry));
    }
  }

  const int count = cfg.augment_count;
  std::vector<nlohmann::json> manifest_rows(index.entries.size());
  parallel_for(index.entries.size(), resolve_threads(cfg), [&](std::size_t i) {
    const DatasetEntry& entry = index.entries[i];
    RasterImage image = read_image_png(entry.image_path);
    std::vector<std::string> roles;
    std::vector<BinaryMask> masks;
    for (const auto& [role, path] : entry.mask_paths) {
      roles.push_back(role);
      masks.push_back(read_mask_png(path));
    }

    nlohmann::json variants = nlohmann::json::array();
    for (int n = 0; n < count; ++n) {
      std::uint64_t draw_index = fnv1a64(entry.image_id) + n;
      AugmentationSpec spec = sample_spec(cfg.seed, draw_index);
      AugmentedSample sample = apply(spec, image, masks);

      std::string base = entry.image_id + "_aug" + std::to_string(n);
      write_image_png(sample.image, (out / (base + ".png")).string());
      nlohmann::json mask_files = nlohmann::json::object();
      for (std::size_t m = 0; m < roles.size(); ++m) {
        std::string suffix =
            index.task == 2 ? "_attribute_" + roles[m] : "_" + roles[m];
        std::string name = base + suffix + ".png";
        write_mask_png(sample.masks[m], (out / name).string());
        mask_files[roles[m]] = name;
      }

      nlohmann::json row;
      row["variant"] = n;
      row["draw_index"] = draw_index;
      row["spec"] = {{"flip_h", spec.flip_h},
                     {"flip_v", spec.flip_v},
                     {"quarter_turns", spec.quarter_turns},
                     {"luminosity", spec.luminosity},
                     {"blur_sigma", spec.blur_sigma}};
      row["image"] = base + ".png";
      row["masks"] = mask_files;
      variants.push_back(std::move(row));
    }
    nlohmann::json record;
    record["image_id"] = entry.image_id;
    record["variants"] = std::move(variants);
    manifest_rows[i] = std::move(record);
  });

  nlohmann::json manifest;
  manifest["seed"] = cfg.seed;
  manifest["count_per_image"] = count;
  manifest["images"] = manifest_rows;
  write_text(out / "manifest.json", manifest.dump(2) + "\n");

  report.aggregates["images"] = index.entries.size();
  report.aggregates["variants_per_image"] = count;
  report.aggregates["files_written"] =
      index.entries.size() * static_cast<std::size_t>(count);
  write_report_files(report, cfg, out);
  return report;
}

Report cmd_eval_boundary(const RunConfig& cfg) {
  require(!cfg.truth_path.empty(), "--truth is required");
  require(!cfg.pred_path.empty(), "--pred is required");
  fs::path out = ensure_out_dir(cfg);

  Report report = make_report("eval-boundary", cfg);
  std::vector<std::string> ids =
      evaluation_ids(cfg, cfg.truth_path, "_segmentation");
  if (ids.empty()) {
    throw ConfigError("no ground-truth masks found under " + cfg.truth_path);
  }

  fs::path pred_dir = fs::path(cfg.pred_path) / "task1";
  std::vector<std::string> missing;
  std::vector<std::string> kept;
  for (const auto& id : ids) {
    if (fs::exists(pred_dir / (id + "_segmentation.png"))) {
      kept.push_back(id);
    } else {
      missing.push_back(id);
    }
  }
  if (cfg.strict) {
    list_missing("missing predictions", missing);
  } else {
    for (const auto& id : missing) {
      report.warnings.push_back("no prediction for '" + id + "'; skipped");
    }
  }
  if (kept.empty()) {
    throw ConfigError("no overlapping ids between predictions and ground truth");
  }

  std::vector<double> scores(kept.size());
  parallel_for(kept.size(), resolve_threads(cfg), [&](std::size_t i) {
    fs::path gt_path =
        fs::path(cfg.truth_path) / (kept[i] + "_segmentation.png");
    BinaryMask gt = read_mask_png(gt_path.string());
    BinaryMask pred =
        read_mask_png((pred_dir / (kept[i] + "_segmentation.png")).string());
    scores[i] = jaccard(gt, pred);
  });

  double sum = 0.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    sum += scores[i];
    report.per_image.push_back(
        {{"image_id", kept[i]}, {"jaccard", scores[i]}});
  }
  double s1 = sum / static_cast<double>(kept.size());
  report.aggregates["S1"] = s1;
  report.aggregates["S1_rounded"] = round_half_up(s1, 4);
  report.aggregates["N"] = kept.size();
  report.aggregates["skipped"] = missing.size();
  write_report_files(report, cfg, out);
  return report;
}

Report cmd_eval_attributes(const RunConfig& cfg) {
  require(!cfg.truth_path.empty(), "--truth is required");
  require(!cfg.pred_path.empty(), "--pred is required");
  fs::path out = ensure_out_dir(cfg);

  Report report = make_report("eval-attributes", cfg);
  std::vector<std::string> ids = evaluation_ids(
      cfg, cfg.truth_path,
      "_attribute_" + std::string(attribute_name(AttributeClass::kGlobules)));
  if (ids.empty()) {
    throw ConfigError("no ground-truth masks found under " + cfg.truth_path);
  }
  std::sort(ids.begin(), ids.end());

  fs::path pred_dir = fs::path(cfg.pred_path) / "task2";

  struct PairScore {
    double jaccard = 0.0;
    bool excluded = false;  // empty ground truth, outside N(j)
    bool skipped = false;   // missing prediction in non-strict mode
  };
  const std::size_t n_classes = kAttributeClassCount;
  std::vector<PairScore> cells(ids.size() * n_classes);
  std::vector<std::string> missing;
  std::mutex missing_mutex;

  parallel_for(ids.size(), resolve_threads(cfg), [&](std::size_t i) {
    for (auto cls : all_attribute_classes()) {
      std::string file =
          ids[i] + "_attribute_" + std::string(attribute_name(cls)) + ".png";
      PairScore& cell = cells[i * n_classes + static_cast<int>(cls)];

      fs::path gt_path = fs::path(cfg.truth_path) / file;
      if (!fs::exists(gt_path)) {
        throw IoError("missing ground-truth mask " + gt_path.string());
      }
      BinaryMask gt = read_mask_png(gt_path.string());
      if (gt.empty()) {
        cell.excluded = true;  // excluded from N(j) regardless of prediction
        continue;
      }
      fs::path pred_path = pred_dir / file;
      if (!fs::exists(pred_path)) {
        std::lock_guard<std::mutex> lock(missing_mutex);
        missing.push_back(file);
        cell.skipped = true;
        continue;
      }
      cell.jaccard = jaccard(gt, read_mask_png(pred_path.string()));
    }
  });

  std::sort(missing.begin(), missing.end());
  if (cfg.strict) {
    list_missing("missing predictions", missing);
  } else {
    for (const auto& file : missing) {
      report.warnings.push_back("no prediction for '" + file + "'; skipped");
    }
  }

  std::array<double, kAttributeClassCount> sums{};
  std::array<std::size_t, kAttributeClassCount> counts{};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < n_classes; ++j) {
      const PairScore& cell = cells[i * n_classes + j];
      nlohmann::json record;
      record["image_id"] = ids[i];
      record["class"] =
          std::string(attribute_name(static_cast<AttributeClass>(j)));
      if (cell.excluded) {
        record["status"] = "excluded_empty_ground_truth";
      } else if (cell.skipped) {
        record["status"] = "skipped_missing_prediction";
      } else {
        record["status"] = "scored";
        record["jaccard"] = cell.jaccard;
        sums[j] += cell.jaccard;
        counts[j] += 1;
      }
      report.per_image.push_back(std::move(record));
    }
  }

  nlohmann::json per_class = nlohmann::json::object();
  double s2_sum = 0.0;
  int s2_defined = 0;
  for (std::size_t j = 0; j < n_classes; ++j) {
    std::string name(attribute_name(static_cast<AttributeClass>(j)));
    nlohmann::json entry;
    entry["N"] = counts[j];
    if (counts[j] == 0) {
      entry["S2"] = nullptr;
      entry["status"] = "undefined";
      if (cfg.strict) {
        throw UndefinedScoreError("attribute score undefined for class " +
                                  name + " (no non-empty ground truths)");
      }
      report.warnings.push_back("class " + name +
                                " has no non-empty ground truths; excluded "
                                "from the overall score");
    } else {
      double score = sums[j] / static_cast<double>(counts[j]);
      entry["S2"] = score;
      entry["S2_rounded"] = round_half_up(score, 4);
      s2_sum += score;
      ++s2_defined;
    }
    per_class[name] = std::move(entry);
  }
  if (s2_defined == 0) {
    throw UndefinedScoreError("all attribute classes are undefined");
  }
  double s2 = s2_sum / s2_defined;
  report.aggregates["per_class"] = std::move(per_class);
  report.aggregates["S2"] = s2;
  report.aggregates["S2_rounded"] = round_half_up(s2, 4);
  report.aggregates["classes_defined"] = s2_defined;
  write_report_files(report, cfg, out);
  return report;
}

Report cmd_diagnose(const RunConfig& cfg) {
  require(!cfg.images_dir.empty(), "--images is required");
  require(!cfg.pred_path.empty(), "--pred is required");
  fs::path out = ensure_out_dir(cfg);

  Report report = make_report("diagnose", cfg);
  std::vector<std::string> ids = evaluation_ids(cfg, cfg.images_dir, "");
  if (ids.empty()) {
    throw ConfigError("no images found under " + cfg.images_dir);
  }

  if (!fs::is_directory(cfg.pred_path)) {
    throw ConfigError("predictor root not found: " + cfg.pred_path);
  }
  if (ids_with_suffix((fs::path(cfg.pred_path) / "task3").string(), "")
          .empty()) {
    throw ConfigError("predictor root has no task3 class masks: " +
                      cfg.pred_path);
  }

  DirectoryPredictor directory(cfg.pred_path);
  BaselineSegmenterPredictor baseline;
  const MaskPredictor& boundary_predictor =
      cfg.use_baseline ? static_cast<const MaskPredictor&>(baseline)
                       : static_cast<const MaskPredictor&>(directory);

  std::vector<ClassifyResult> results(ids.size());
  parallel_for(ids.size(), resolve_threads(cfg), [&](std::size_t i) {
    fs::path image_path = fs::path(cfg.images_dir) / (ids[i] + ".png");
    RasterImage image = read_image_png(image_path.string());
    results[i] = classify(ids[i], image, boundary_predictor, directory,
                          cfg.intersect_boundary);
  });

  std::map<std::string, std::array<double, kDiagnosisClassCount>> rows;
  std::string trace;
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const VoteResult& vote = results[i].vote;
    for (const auto& err : results[i].errors) report.errors.push_back(err);
    if (vote.fallback) ++fallbacks;
    rows.emplace(ids[i], vote.confidences);

    nlohmann::json areas = nlohmann::json::object();
    for (auto label : all_labels()) {
      areas[std::string(label_name(label))] =
          vote.areas[static_cast<int>(label)];
    }
    nlohmann::json line;
    line["image_id"] = ids[i];
    line["areas"] = areas;
    line["label"] = std::string(label_name(vote.label));
    line["fallback"] = vote.fallback;
    trace += line.dump() + "\n";

    report.per_image.push_back({{"image_id", ids[i]},
                                {"label", std::string(label_name(vote.label))},
                                {"fallback", vote.fallback}});
  }

  write_diagnosis_predictions((out / "predictions.csv").string(), rows);
  write_text(out / "vote_trace.jsonl", trace);

  report.aggregates["images"] = ids.size();
  report.aggregates["fallbacks"] = fallbacks;
  write_report_files(report, cfg, out);
  return report;
}

Report cmd_eval_diagnosis(const RunConfig& cfg) {
  require(!cfg.truth_path.empty(), "--truth is required");
  require(!cfg.pred_path.empty(), "--pred is required");
  fs::path out = ensure_out_dir(cfg);

  Report report = make_report("eval-diagnosis", cfg);
  GroundTruthTable truth = load_ground_truth_csv(cfg.truth_path);
  auto predictions = load_diagnosis_predictions(cfg.pred_path);

  std::vector<std::string> missing_predictions;
  std::vector<std::string> extra_predictions;
  for (const auto& [id, label] : truth.rows) {
    if (!predictions.count(id)) missing_predictions.push_back(id);
  }
  for (const auto& [id, confidences] : predictions) {
    if (!truth.rows.count(id)) extra_predictions.push_back(id);
  }
  if (cfg.strict) {
    list_missing("ids without predictions", missing_predictions);
    list_missing("predictions without ground truth", extra_predictions);
  } else {
    for (const auto& id : missing_predictions) {
      report.warnings.push_back("no prediction for '" + id + "'; skipped");
    }
    for (const auto& id : extra_predictions) {
      report.warnings.push_back("prediction for unknown id '" + id +
                                "'; ignored");
    }
  }

  std::vector<DiagnosisLabel> actual;
  std::vector<DiagnosisLabel> predicted;
  for (const auto& [id, label] : truth.rows) {
    auto it = predictions.find(id);
    if (it == predictions.end()) continue;
    // Predicted label = argmax confidence, first index on ties.
    int best = 0;
    for (int j = 1; j < kDiagnosisClassCount; ++j) {
      if (it->second[j] > it->second[best]) best = j;
    }
    actual.push_back(label);
    predicted.push_back(static_cast<DiagnosisLabel>(best));
    report.per_image.push_back(
        {{"image_id", id},
         {"actual", std::string(label_name(label))},
         {"predicted",
          std::string(label_name(static_cast<DiagnosisLabel>(best)))},
         {"correct", label == static_cast<DiagnosisLabel>(best)}});
  }
  if (actual.empty()) {
    throw ConfigError(
        "no overlapping ids between predictions and ground truth");
  }

  double s3 = diagnosis_accuracy(predicted, actual);
  ConfusionMatrix cm = confusion(predicted, actual);
  double bacc = balanced_accuracy(cm, &report.warnings);

  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json normalized = nlohmann::json::array();
  auto norm = cm.row_normalized();
  for (auto row_label : all_labels()) {
    nlohmann::json count_row = nlohmann::json::array();
    nlohmann::json norm_row = nlohmann::json::array();
    for (auto col_label : all_labels()) {
      count_row.push_back(cm.count(row_label, col_label));
      norm_row.push_back(
          norm[static_cast<int>(row_label)][static_cast<int>(col_label)]);
    }
    counts.push_back(std::move(count_row));
    normalized.push_back(std::move(norm_row));
  }

  nlohmann::json label_order = nlohmann::json::array();
  for (auto label : all_labels()) {
    label_order.push_back(std::string(label_name(label)));
  }
  report.aggregates["S3"] = s3;
  report.aggregates["S3_rounded"] = round_half_up(s3, 4);
  report.aggregates["balanced_accuracy"] = bacc;
  report.aggregates["balanced_accuracy_rounded"] = round_half_up(bacc, 4);
  report.aggregates["N"] = actual.size();
  report.aggregates["labels"] = label_order;
  report.aggregates["confusion_counts"] = counts;
  report.aggregates["confusion_row_normalized"] = normalized;
  write_report_files(report, cfg, out);
  return report;
}

Report cmd_baseline_segment(const RunConfig& cfg) {
  require(!cfg.images_dir.empty(), "--images is required");
  fs::path out = ensure_out_dir(cfg);
  fs::path mask_dir = out / "task1";
  std::error_code ec;
  fs::create_directories(mask_dir, ec);
  if (ec) throw IoError("cannot create " + mask_dir.string());

  Report report = make_report("baseline-segment", cfg);
  std::vector<std::string> ids = evaluation_ids(cfg, cfg.images_dir, "");
  if (ids.empty()) {
    throw ConfigError("no images found under " + cfg.images_dir);
  }

  std::vector<double> fractions(ids.size());
  parallel_for(ids.size(), resolve_threads(cfg), [&](std::size_t i) {
    fs::path image_path = fs::path(cfg.images_dir) / (ids[i] + ".png");
    RasterImage image = read_image_png(image_path.string());
    BinaryMask mask = baseline_segment(image);
    fractions[i] = mask.normalized_area();
    write_mask_png(mask,
                   (mask_dir / (ids[i] + "_segmentation.png")).string());
  });

  for (std::size_t i = 0; i < ids.size(); ++i) {
    report.per_image.push_back(
        {{"image_id", ids[i]}, {"active_fraction", fractions[i]}});
  }
  report.aggregates["images"] = ids.size();
  write_report_files(report, cfg, out);
  return report;
}

Report run_command(const std::string& command, const RunConfig& cfg) {
  if (command == "split") return cmd_split(cfg);
  if (command == "augment") return cmd_augment(cfg);
  if (command == "eval-boundary") return cmd_eval_boundary(cfg);
  if (command == "eval-attributes") return cmd_eval_attributes(cfg);
  if (command == "diagnose") return cmd_diagnose(cfg);
  if (command == "eval-diagnosis") return cmd_eval_diagnosis(cfg);
  if (command == "baseline-segment") return cmd_baseline_segment(cfg);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace lesionbench
