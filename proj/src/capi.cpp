#include "lesionbench.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "lesionbench/diagnose.hpp"
#include "lesionbench/error.hpp"
#include "lesionbench/mask.hpp"
#include "lesionbench/metrics.hpp"
#include "lesionbench/png_io.hpp"
#include "lesionbench/report.hpp"
#include "lesionbench/runner.hpp"

using namespace lesionbench;

struct lb_mask {
  BinaryMask value;
};
struct lb_image {
  RasterImage value;
};
struct lb_run_config {
  RunConfig value;
};
struct lb_report {
  Report value;
};

namespace {

thread_local std::string g_last_error;

lb_status fail(lb_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps the C++ error taxonomy onto status codes; the catch-all keeps
// exceptions from crossing the C boundary.
template <typename Fn>
lb_status guarded(Fn&& fn) {
  try {
    fn();
    return LB_OK;
  } catch (const DimensionError& e) {
    return fail(LB_ERR_DIMENSION, e.what());
  } catch (const IoError& e) {
    return fail(LB_ERR_IO, e.what());
  } catch (const ParseError& e) {
    return fail(LB_ERR_PARSE, e.what());
  } catch (const ConfigError& e) {
    return fail(LB_ERR_CONFIG, e.what());
  } catch (const UndefinedScoreError& e) {
    return fail(LB_ERR_UNDEFINED_SCORE, e.what());
  } catch (const std::exception& e) {
    return fail(LB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LB_ERR_INTERNAL, "unknown error");
  }
}

lb_status require_arg(bool ok, const char* message) {
  return ok ? LB_OK : fail(LB_ERR_INVALID_ARGUMENT, message);
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* lb_version(void) {
  static const std::string version(kToolVersion);
  return version.c_str();
}

const char* lb_last_error(void) { return g_last_error.c_str(); }

const char* lb_status_name(lb_status status) {
  switch (status) {
    case LB_OK: return "ok";
    case LB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LB_ERR_DIMENSION: return "dimension mismatch";
    case LB_ERR_IO: return "io error";
    case LB_ERR_PARSE: return "parse error";
    case LB_ERR_CONFIG: return "config error";
    case LB_ERR_UNDEFINED_SCORE: return "undefined score";
    case LB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void lb_string_free(char* text) { std::free(text); }

lb_status lb_mask_create(int32_t width, int32_t height, lb_mask** out) {
  if (auto s = require_arg(out != nullptr, "null output pointer")) return s;
  return guarded([&] { *out = new lb_mask{BinaryMask(width, height)}; });
}

lb_status lb_mask_from_bits(int32_t width, int32_t height,
                            const uint8_t* bits, lb_mask** out) {
  if (auto s = require_arg(out && bits, "null argument")) return s;
  return guarded([&] {
    std::vector<std::uint8_t> grid(
        bits, bits + static_cast<std::size_t>(width > 0 ? width : 0) *
                         (height > 0 ? height : 0));
    *out = new lb_mask{BinaryMask(width, height, std::move(grid))};
  });
}

void lb_mask_free(lb_mask* mask) { delete mask; }

int32_t lb_mask_width(const lb_mask* mask) {
  return mask ? mask->value.width() : 0;
}

int32_t lb_mask_height(const lb_mask* mask) {
  return mask ? mask->value.height() : 0;
}

lb_status lb_mask_get(const lb_mask* mask, int32_t x, int32_t y,
                      int32_t* out_active) {
  if (auto s = require_arg(mask && out_active, "null argument")) return s;
  if (auto s = require_arg(x >= 0 && x < mask->value.width() && y >= 0 &&
                               y < mask->value.height(),
                           "pixel out of range")) {
    return s;
  }
  *out_active = mask->value.at(x, y) ? 1 : 0;
  return LB_OK;
}

lb_status lb_mask_set(lb_mask* mask, int32_t x, int32_t y, int32_t active) {
  if (auto s = require_arg(mask != nullptr, "null mask")) return s;
  if (auto s = require_arg(x >= 0 && x < mask->value.width() && y >= 0 &&
                               y < mask->value.height(),
                           "pixel out of range")) {
    return s;
  }
  mask->value.set(x, y, active != 0);
  return LB_OK;
}

lb_status lb_mask_active_count(const lb_mask* mask, uint64_t* out) {
  if (auto s = require_arg(mask && out, "null argument")) return s;
  *out = mask->value.active_count();
  return LB_OK;
}

lb_status lb_mask_normalized_area(const lb_mask* mask, double* out) {
  if (auto s = require_arg(mask && out, "null argument")) return s;
  *out = mask->value.normalized_area();
  return LB_OK;
}

lb_status lb_mask_read_png(const char* path, lb_mask** out) {
  if (auto s = require_arg(path && out, "null argument")) return s;
  return guarded([&] { *out = new lb_mask{read_mask_png(path)}; });
}

lb_status lb_mask_write_png(const lb_mask* mask, const char* path) {
  if (auto s = require_arg(mask && path, "null argument")) return s;
  return guarded([&] { write_mask_png(mask->value, path); });
}

lb_status lb_jaccard(const lb_mask* a, const lb_mask* b, double* out) {
  if (auto s = require_arg(a && b && out, "null argument")) return s;
  return guarded([&] { *out = jaccard(a->value, b->value); });
}

lb_status lb_image_read_png(const char* path, lb_image** out) {
  if (auto s = require_arg(path && out, "null argument")) return s;
  return guarded([&] { *out = new lb_image{read_image_png(path)}; });
}

lb_status lb_image_write_png(const lb_image* image, const char* path) {
  if (auto s = require_arg(image && path, "null argument")) return s;
  return guarded([&] { write_image_png(image->value, path); });
}

void lb_image_free(lb_image* image) { delete image; }

int32_t lb_image_width(const lb_image* image) {
  return image ? image->value.width() : 0;
}

int32_t lb_image_height(const lb_image* image) {
  return image ? image->value.height() : 0;
}

int32_t lb_image_channels(const lb_image* image) {
  return image ? image->value.channels() : 0;
}

lb_status lb_baseline_segment(const lb_image* image, lb_mask** out) {
  if (auto s = require_arg(image && out, "null argument")) return s;
  return guarded([&] { *out = new lb_mask{baseline_segment(image->value)}; });
}

lb_status lb_vote(const lb_mask* const masks[LB_LABEL_COUNT],
                  int32_t* out_label,
                  double out_confidences[LB_LABEL_COUNT]) {
  if (auto s = require_arg(masks && out_label, "null argument")) return s;
  for (int i = 0; i < LB_LABEL_COUNT; ++i) {
    if (auto s = require_arg(masks[i] != nullptr, "null mask in set")) {
      return s;
    }
  }
  return guarded([&] {
    std::array<BinaryMask, kDiagnosisClassCount> set = {
        masks[0]->value, masks[1]->value, masks[2]->value, masks[3]->value,
        masks[4]->value, masks[5]->value, masks[6]->value};
    VoteResult result = vote(ClassMaskSet(std::move(set)));
    *out_label = static_cast<int32_t>(result.label);
    if (out_confidences) {
      for (int i = 0; i < LB_LABEL_COUNT; ++i) {
        out_confidences[i] = result.confidences[i];
      }
    }
  });
}

const char* lb_diagnosis_label_name(int32_t label) {
  if (label < 0 || label >= LB_LABEL_COUNT) return nullptr;
  return label_name(static_cast<DiagnosisLabel>(label)).data();
}

lb_status lb_config_create(lb_run_config** out) {
  if (auto s = require_arg(out != nullptr, "null output pointer")) return s;
  *out = new lb_run_config{};
  return LB_OK;
}

void lb_config_free(lb_run_config* config) { delete config; }

lb_status lb_config_set_string(lb_run_config* config, const char* key,
                               const char* value) {
  if (auto s = require_arg(config && key && value, "null argument")) return s;
  std::string k = key;
  RunConfig& cfg = config->value;
  if (k == "images") cfg.images_dir = value;
  else if (k == "truth") cfg.truth_path = value;
  else if (k == "pred") cfg.pred_path = value;
  else if (k == "out") cfg.out_dir = value;
  else if (k == "ids") cfg.ids_path = value;
  else if (k == "format") {
    if (std::string(value) != "json" && std::string(value) != "csv") {
      return fail(LB_ERR_INVALID_ARGUMENT, "format must be json or csv");
    }
    cfg.format = value;
  } else {
    return fail(LB_ERR_INVALID_ARGUMENT,
                "unknown string config key '" + k + "'");
  }
  return LB_OK;
}

lb_status lb_config_set_int(lb_run_config* config, const char* key,
                            int64_t value) {
  if (auto s = require_arg(config && key, "null argument")) return s;
  std::string k = key;
  RunConfig& cfg = config->value;
  if (k == "task") cfg.task = static_cast<int>(value);
  else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(value);
  else if (k == "strict") cfg.strict = value != 0;
  else if (k == "intersect-boundary") cfg.intersect_boundary = value != 0;
  else if (k == "baseline") cfg.use_baseline = value != 0;
  else if (k == "stratified") cfg.stratified = value != 0;
  else if (k == "train-count") cfg.train_count = static_cast<std::size_t>(value);
  else if (k == "test-count") cfg.test_count = static_cast<std::size_t>(value);
  else if (k == "count") cfg.augment_count = static_cast<int>(value);
  else if (k == "threads") cfg.threads = static_cast<int>(value);
  else {
    return fail(LB_ERR_INVALID_ARGUMENT,
                "unknown integer config key '" + k + "'");
  }
  return LB_OK;
}

lb_status lb_run(const lb_run_config* config, const char* command,
                 lb_report** out_report) {
  if (auto s = require_arg(config && command && out_report, "null argument")) {
    return s;
  }
  return guarded([&] {
    *out_report = new lb_report{run_command(command, config->value)};
  });
}

void lb_report_free(lb_report* report) { delete report; }

lb_status lb_report_json(const lb_report* report, char** out_text) {
  if (auto s = require_arg(report && out_text, "null argument")) return s;
  return guarded([&] {
    *out_text = copy_string(report->value.to_json_text());
    if (!*out_text) throw Error("out of memory");
  });
}

lb_status lb_report_aggregates_json(const lb_report* report,
                                    char** out_text) {
  if (auto s = require_arg(report && out_text, "null argument")) return s;
  return guarded([&] {
    *out_text = copy_string(report->value.aggregates.dump());
    if (!*out_text) throw Error("out of memory");
  });
}

size_t lb_report_warning_count(const lb_report* report) {
  return report ? report->value.warnings.size() : 0;
}

const char* lb_report_warning(const lb_report* report, size_t index) {
  if (!report || index >= report->value.warnings.size()) return nullptr;
  return report->value.warnings[index].c_str();
}

size_t lb_report_error_count(const lb_report* report) {
  return report ? report->value.errors.size() : 0;
}

const char* lb_report_error(const lb_report* report, size_t index) {
  if (!report || index >= report->value.errors.size()) return nullptr;
  return report->value.errors[index].c_str();
}

}  // extern "C"
