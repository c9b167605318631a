#include "lesionbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lesionbench/error.hpp"
#include "lesionbench/png_io.hpp"
#include "lesionbench/rng.hpp"

namespace fs = std::filesystem;

namespace lesionbench {

namespace {

constexpr double kOneHotTolerance = 1e-6;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("unparseable number '" + text + "' in " + context);
  }
  return value;
}

}  // namespace

GroundTruthTable load_ground_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + " is empty");
  if (strip_cr(line) != kDiagnosisCsvHeader) {
    throw ParseError(path + ": expected header '" +
                     std::string(kDiagnosisCsvHeader) + "', got '" +
                     strip_cr(line) + "'");
  }

  GroundTruthTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    std::string context = path + ":" + std::to_string(line_no);
    if (fields.size() != 1 + kDiagnosisClassCount) {
      throw ParseError(context + ": expected 8 fields, got " +
                       std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    if (id.empty()) throw ParseError(context + ": empty image id");
    if (table.rows.count(id)) {
      throw ParseError(context + ": duplicate image id '" + id + "'");
    }

    int hot = -1;
    for (int j = 0; j < kDiagnosisClassCount; ++j) {
      double v = parse_double(fields[j + 1], context);
      if (std::abs(v - 1.0) <= kOneHotTolerance) {
        if (hot >= 0) {
          throw ParseError(context + ": row is not one-hot (two 1.0 entries)");
        }
        hot = j;
      } else if (std::abs(v) > kOneHotTolerance) {
        throw ParseError(context + ": value " + fields[j + 1] +
                         " is neither 0 nor 1");
      }
    }
    if (hot < 0) {
      throw ParseError(context + ": row is not one-hot (no 1.0 entry)");
    }
    table.rows.emplace(id, static_cast<DiagnosisLabel>(hot));
  }
  return table;
}

void write_diagnosis_predictions(
    const std::string& path,
    const std::map<std::string, std::array<double, kDiagnosisClassCount>>&
        rows) {
  for (const auto& [id, confidences] : rows) {
    for (double v : confidences) {
      if (v < 0.0 || !std::isfinite(v)) {
        throw ConfigError("negative or non-finite confidence for '" + id +
                          "'");
      }
    }
  }
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << kDiagnosisCsvHeader << "\n";
  for (const auto& [id, confidences] : rows) {
    out << id;
    for (double v : confidences) out << "," << format_fixed(v, 4);
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

std::map<std::string, std::array<double, kDiagnosisClassCount>>
load_diagnosis_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + " is empty");
  if (strip_cr(line) != kDiagnosisCsvHeader) {
    throw ParseError(path + ": expected header '" +
                     std::string(kDiagnosisCsvHeader) + "'");
  }

  std::map<std::string, std::array<double, kDiagnosisClassCount>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    std::string context = path + ":" + std::to_string(line_no);
    if (fields.size() != 1 + kDiagnosisClassCount) {
      throw ParseError(context + ": expected 8 fields, got " +
                       std::to_string(fields.size()));
    }
    if (rows.count(fields[0])) {
      throw ParseError(context + ": duplicate image id '" + fields[0] + "'");
    }
    std::array<double, kDiagnosisClassCount> confidences{};
    for (int j = 0; j < kDiagnosisClassCount; ++j) {
      confidences[j] = parse_double(fields[j + 1], context);
      if (confidences[j] < 0.0) {
        throw ParseError(context + ": negative confidence");
      }
    }
    rows.emplace(fields[0], confidences);
  }
  return rows;
}

std::vector<std::string> DatasetIndex::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.image_id);
  return out;
}

const DatasetEntry* DatasetIndex::find(const std::string& image_id) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), image_id,
      [](const DatasetEntry& e, const std::string& id) {
        return e.image_id < id;
      });
  if (it == entries.end() || it->image_id != image_id) return nullptr;
  return &*it;
}

namespace {

// Collects `<id>.png` stems from a directory, sorted.
std::map<std::string, std::string> list_pngs(const std::string& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) throw IoError("directory not found: " + dir);
  if (!fs::is_directory(dir)) throw IoError(dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() != ".png") continue;
    out.emplace(entry.path().stem().string(), entry.path().string());
  }
  return out;
}

void report_offenders(const std::string& what,
                      const std::vector<std::string>& offenders) {
  if (offenders.empty()) return;
  std::string msg = what + " (" + std::to_string(offenders.size()) + "): ";
  std::size_t shown = std::min<std::size_t>(offenders.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) msg += ", ";
    msg += offenders[i];
  }
  if (offenders.size() > shown) {
    msg += ", +" + std::to_string(offenders.size() - shown) + " more";
  }
  throw IoError(msg);
}

void check_mask_dims(const DatasetIndex& index) {
  std::vector<std::string> mismatched;
  for (const auto& entry : index.entries) {
    auto [iw, ih] = png_dimensions(entry.image_path);
    for (const auto& [role, path] : entry.mask_paths) {
      auto [mw, mh] = png_dimensions(path);
      if (mw != iw || mh != ih) {
        mismatched.push_back(entry.image_id + "/" + role + " (" +
                             std::to_string(mw) + "x" + std::to_string(mh) +
                             " vs " + std::to_string(iw) + "x" +
                             std::to_string(ih) + ")");
      }
    }
  }
  report_offenders("mask/image dimension mismatches", mismatched);
}

DatasetIndex discover_task1(const std::string& image_dir,
                            const std::string& mask_dir) {
  auto images = list_pngs(image_dir);
  auto masks = list_pngs(mask_dir);

  DatasetIndex index;
  index.task = 1;
  std::vector<std::string> missing_masks;
  for (const auto& [id, image_path] : images) {
    auto it = masks.find(id + "_segmentation");
    if (it == masks.end()) {
      missing_masks.push_back(id);
      continue;
    }
    DatasetEntry entry;
    entry.image_id = id;
    entry.image_path = image_path;
    entry.mask_paths.emplace("segmentation", it->second);
    index.entries.push_back(std::move(entry));
    masks.erase(it);
  }
  report_offenders("images without a segmentation mask", missing_masks);

  std::vector<std::string> orphans;
  for (const auto& [stem, path] : masks) orphans.push_back(stem);
  report_offenders("masks without an image", orphans);

  check_mask_dims(index);
  return index;
}

DatasetIndex discover_task2(const std::string& image_dir,
                            const std::string& mask_dir) {
  auto images = list_pngs(image_dir);
  auto masks = list_pngs(mask_dir);

  DatasetIndex index;
  index.task = 2;
  std::vector<std::string> missing_masks;
  for (const auto& [id, image_path] : images) {
    DatasetEntry entry;
    entry.image_id = id;
    entry.image_path = image_path;
    for (auto cls : all_attribute_classes()) {
      std::string stem = id + "_attribute_" + std::string(attribute_name(cls));
      auto it = masks.find(stem);
      if (it == masks.end()) {
        missing_masks.push_back(stem);
        continue;
      }
      entry.mask_paths.emplace(std::string(attribute_name(cls)), it->second);
      masks.erase(it);
    }
    if (entry.mask_paths.size() == kAttributeClassCount) {
      index.entries.push_back(std::move(entry));
    }
  }
  report_offenders("missing attribute masks", missing_masks);

  std::vector<std::string> orphans;
  for (const auto& [stem, path] : masks) orphans.push_back(stem);
  report_offenders("masks without an image", orphans);

  check_mask_dims(index);
  return index;
}

DatasetIndex discover_task3(const std::string& image_dir,
                            const std::string& csv_path) {
  auto images = list_pngs(image_dir);
  GroundTruthTable table = load_ground_truth_csv(csv_path);

  DatasetIndex index;
  index.task = 3;
  std::vector<std::string> missing_rows;
  for (const auto& [id, image_path] : images) {
    auto it = table.rows.find(id);
    if (it == table.rows.end()) {
      missing_rows.push_back(id);
      continue;
    }
    DatasetEntry entry;
    entry.image_id = id;
    entry.image_path = image_path;
    entry.label = it->second;
    index.entries.push_back(std::move(entry));
    table.rows.erase(it);
  }
  report_offenders("images without a diagnosis row", missing_rows);

  std::vector<std::string> orphans;
  for (const auto& [id, label] : table.rows) orphans.push_back(id);
  report_offenders("diagnosis rows without an image", orphans);
  return index;
}

}  // namespace

DatasetIndex discover(int task, const std::string& image_dir,
                      const std::string& truth_path) {
  switch (task) {
    case 1:
      return discover_task1(image_dir, truth_path);
    case 2:
      return discover_task2(image_dir, truth_path);
    case 3:
      return discover_task3(image_dir, truth_path);
    default:
      throw ConfigError("task must be 1, 2 or 3, got " + std::to_string(task));
  }
}

SplitAssignment split(const DatasetIndex& index, std::size_t train_count,
                      std::size_t test_count, std::uint64_t seed) {
  if (train_count + test_count != index.entries.size()) {
    throw ConfigError("split counts " + std::to_string(train_count) + "+" +
                      std::to_string(test_count) + " do not cover " +
                      std::to_string(index.entries.size()) + " entries");
  }
  std::vector<std::string> ids = index.ids();  // already sorted
  SplitMix64 rng(seed);
  shuffle(ids, rng);

  SplitAssignment assignment;
  assignment.seed = seed;
  assignment.train_ids.assign(ids.begin(), ids.begin() + train_count);
  assignment.test_ids.assign(ids.begin() + train_count, ids.end());
  std::sort(assignment.train_ids.begin(), assignment.train_ids.end());
  std::sort(assignment.test_ids.begin(), assignment.test_ids.end());
  return assignment;
}

SplitAssignment split_stratified(const DatasetIndex& index,
                                 std::size_t train_count,
                                 std::size_t test_count, std::uint64_t seed) {
  if (train_count + test_count != index.entries.size()) {
    throw ConfigError("split counts " + std::to_string(train_count) + "+" +
                      std::to_string(test_count) + " do not cover " +
                      std::to_string(index.entries.size()) + " entries");
  }
  std::map<DiagnosisLabel, std::vector<std::string>> by_class;
  for (const auto& entry : index.entries) {
    if (!entry.label.has_value()) {
      throw ConfigError("stratified split requires diagnosis labels; entry '" +
                        entry.image_id + "' has none");
    }
    by_class[*entry.label].push_back(entry.image_id);
  }

  const double total = static_cast<double>(index.entries.size());
  // Largest-remainder allocation of the test quota across classes.
  std::vector<std::pair<DiagnosisLabel, std::size_t>> quota;
  std::vector<std::pair<double, DiagnosisLabel>> remainders;
  std::size_t assigned = 0;
  for (const auto& [label, ids] : by_class) {
    double ideal = test_count * (ids.size() / total);
    auto base = static_cast<std::size_t>(std::floor(ideal));
    quota.emplace_back(label, base);
    remainders.emplace_back(ideal - std::floor(ideal), label);
    assigned += base;
  }
  std::sort(remainders.begin(), remainders.end(), [](auto& a, auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; assigned < test_count; ++i, ++assigned) {
    auto label = remainders[i % remainders.size()].second;
    for (auto& [l, q] : quota) {
      if (l == label) ++q;
    }
  }

  SplitAssignment assignment;
  assignment.seed = seed;
  for (const auto& [label, take] : quota) {
    auto ids = by_class[label];
    SplitMix64 rng(mix64(seed) ^ mix64(static_cast<std::uint64_t>(label) + 1));
    shuffle(ids, rng);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < take ? assignment.test_ids : assignment.train_ids)
          .push_back(ids[i]);
    }
  }
  std::sort(assignment.train_ids.begin(), assignment.train_ids.end());
  std::sort(assignment.test_ids.begin(), assignment.test_ids.end());
  return assignment;
}

std::string index_to_json(const DatasetIndex& index) {
  nlohmann::json doc;
  doc["task"] = index.task;
  doc["entries"] = nlohmann::json::array();
  for (const auto& entry : index.entries) {
    nlohmann::json e;
    e["image_id"] = entry.image_id;
    e["image_path"] = entry.image_path;
    e["mask_paths"] = entry.mask_paths;
    if (entry.label.has_value()) {
      e["label"] = std::string(label_name(*entry.label));
    }
    doc["entries"].push_back(std::move(e));
  }
  return doc.dump(2);
}

DatasetIndex index_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid index JSON: ") + e.what());
  }
  DatasetIndex index;
  try {
    index.task = doc.at("task").get<int>();
    for (const auto& e : doc.at("entries")) {
      DatasetEntry entry;
      entry.image_id = e.at("image_id").get<std::string>();
      entry.image_path = e.at("image_path").get<std::string>();
      entry.mask_paths =
          e.at("mask_paths").get<std::map<std::string, std::string>>();
      if (e.contains("label")) {
        auto label = label_from_name(e.at("label").get<std::string>());
        if (!label) {
          throw ParseError("unknown label in index JSON: " +
                           e.at("label").get<std::string>());
        }
        entry.label = *label;
      }
      index.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid index JSON: ") + e.what());
  }
  std::sort(index.entries.begin(), index.entries.end(),
            [](const DatasetEntry& a, const DatasetEntry& b) {
              return a.image_id < b.image_id;
            });
  return index;
}

void write_id_list(const std::string& path,
                   const std::vector<std::string>& ids) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& id : ids) out << id << "\n";
  if (!out) throw IoError("failed writing " + path);
}

std::vector<std::string> read_id_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

}  // namespace lesionbench
