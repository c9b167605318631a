#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lesionbench/metrics.hpp"

namespace lesionbench {

/// Header shared by the ground-truth CSV and the prediction CSV.
inline constexpr std::string_view kDiagnosisCsvHeader =
    "image,MEL,NV,BCC,AKIEC,BKL,DF,VASC";

/// Diagnosis per image id, decoded from the one-hot CSV.
struct GroundTruthTable {
  std::map<std::string, DiagnosisLabel> rows;
};

/// Parses the one-hot diagnosis CSV. Each row must have exactly one value
/// equal to 1 and six equal to 0 (tolerance 1e-6); duplicates and
/// malformed numbers are errors.
GroundTruthTable load_ground_truth_csv(const std::string& path);

/// Writes confidence vectors in the ground-truth CSV format, 4 decimals
/// per value, rows sorted by image id, LF line endings. Confidences must
/// be non-negative.
void write_diagnosis_predictions(
    const std::string& path,
    const std::map<std::string, std::array<double, kDiagnosisClassCount>>&
        rows);

/// Reads a prediction CSV back as raw confidence vectors.
std::map<std::string, std::array<double, kDiagnosisClassCount>>
load_diagnosis_predictions(const std::string& path);

struct DatasetEntry {
  std::string image_id;
  std::string image_path;
  // role -> mask path; "segmentation" for task 1, the five attribute
  // names for task 2, empty for task 3.
  std::map<std::string, std::string> mask_paths;
  std::optional<DiagnosisLabel> label;  // task 3 only
};

struct DatasetIndex {
  int task = 1;
  std::vector<DatasetEntry> entries;  // sorted by image_id

  std::vector<std::string> ids() const;
  const DatasetEntry* find(const std::string& image_id) const;
};

/// Builds a DatasetIndex from an ISIC-style layout.
///   task 1: truth_path is a directory of `<id>_segmentation.png`
///   task 2: truth_path is a directory of `<id>_attribute_<name>.png`
///   task 3: truth_path is the ground-truth CSV
/// Images are `<id>.png` under image_dir. Missing counterparts and
/// mask/image dimension mismatches are hard errors; two empty directories
/// yield an empty index.
DatasetIndex discover(int task, const std::string& image_dir,
                      const std::string& truth_path);

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

/// Deterministic split: ids sorted lexicographically, Fisher-Yates
/// shuffled by SplitMix64(seed), first train_count to train. Output lists
/// are re-sorted. train_count + test_count must equal the index size.
SplitAssignment split(const DatasetIndex& index, std::size_t train_count,
                      std::size_t test_count, std::uint64_t seed);

/// Class-stratified variant (task 3 indexes only): per-class test quotas
/// are proportional with largest-remainder correction, selection within a
/// class is a seeded shuffle.
SplitAssignment split_stratified(const DatasetIndex& index,
                                 std::size_t train_count,
                                 std::size_t test_count, std::uint64_t seed);

/// JSON index cache, so large directories need scanning only once.
std::string index_to_json(const DatasetIndex& index);
DatasetIndex index_from_json(const std::string& json_text);

/// One id per line, LF endings.
void write_id_list(const std::string& path,
                   const std::vector<std::string>& ids);
std::vector<std::string> read_id_list(const std::string& path);

}  // namespace lesionbench
