/* lesionbench C API: skin-lesion mask metrics, augmentation and the
 * area-voting diagnosis pipeline behind opaque handles and error codes.
 *
 * Every function that can fail returns lb_status; LB_OK is 0. On failure
 * a human-readable message is available from lb_last_error() until the
 * next failing call on the same thread. Handles are created by the
 * library and must be released with the matching *_free function.
 */
#ifndef LESIONBENCH_H
#define LESIONBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LB_API __declspec(dllexport)
#else
#define LB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lb_status {
  LB_OK = 0,
  LB_ERR_INVALID_ARGUMENT = 1, /* null handle, bad index, bad key */
  LB_ERR_DIMENSION = 2,        /* mask/image shape disagreement */
  LB_ERR_IO = 3,               /* filesystem or PNG codec failure */
  LB_ERR_PARSE = 4,            /* malformed CSV/JSON */
  LB_ERR_CONFIG = 5,           /* invalid run configuration */
  LB_ERR_UNDEFINED_SCORE = 6,  /* score undefined for the inputs */
  LB_ERR_INTERNAL = 7
} lb_status;

typedef struct lb_mask lb_mask;             /* binary pixel mask */
typedef struct lb_image lb_image;           /* 8-bit raster image */
typedef struct lb_run_config lb_run_config; /* subcommand configuration */
typedef struct lb_report lb_report;         /* result of one run */

/* Diagnosis label indices, in confusion-matrix order. */
enum {
  LB_LABEL_MEL = 0,
  LB_LABEL_NV = 1,
  LB_LABEL_BCC = 2,
  LB_LABEL_AKIEC = 3,
  LB_LABEL_BKL = 4,
  LB_LABEL_DF = 5,
  LB_LABEL_VASC = 6,
  LB_LABEL_COUNT = 7
};

LB_API const char* lb_version(void);
LB_API const char* lb_last_error(void);
LB_API const char* lb_status_name(lb_status status);
LB_API void lb_string_free(char* text);

/* ---- masks ---- */

LB_API lb_status lb_mask_create(int32_t width, int32_t height, lb_mask** out);
/* bits: width*height bytes, row-major, nonzero = active. */
LB_API lb_status lb_mask_from_bits(int32_t width, int32_t height,
                                   const uint8_t* bits, lb_mask** out);
LB_API void lb_mask_free(lb_mask* mask);
LB_API int32_t lb_mask_width(const lb_mask* mask);
LB_API int32_t lb_mask_height(const lb_mask* mask);
LB_API lb_status lb_mask_get(const lb_mask* mask, int32_t x, int32_t y,
                             int32_t* out_active);
LB_API lb_status lb_mask_set(lb_mask* mask, int32_t x, int32_t y,
                             int32_t active);
LB_API lb_status lb_mask_active_count(const lb_mask* mask, uint64_t* out);
LB_API lb_status lb_mask_normalized_area(const lb_mask* mask, double* out);
LB_API lb_status lb_mask_read_png(const char* path, lb_mask** out);
LB_API lb_status lb_mask_write_png(const lb_mask* mask, const char* path);

/* Jaccard index |A∩B|/|A∪B|; 1.0 when both masks are empty. */
LB_API lb_status lb_jaccard(const lb_mask* a, const lb_mask* b, double* out);

/* ---- images ---- */

LB_API lb_status lb_image_read_png(const char* path, lb_image** out);
LB_API lb_status lb_image_write_png(const lb_image* image, const char* path);
LB_API void lb_image_free(lb_image* image);
LB_API int32_t lb_image_width(const lb_image* image);
LB_API int32_t lb_image_height(const lb_image* image);
LB_API int32_t lb_image_channels(const lb_image* image);

/* Otsu baseline segmenter (darker side, largest component, holes filled). */
LB_API lb_status lb_baseline_segment(const lb_image* image, lb_mask** out);

/* ---- diagnosis voting ---- */

/* masks: 7 same-shape masks indexed by LB_LABEL_*. Writes the winning
 * label and, when out_confidences is non-null, the 7 normalized-area
 * confidences (sum 1). */
LB_API lb_status lb_vote(const lb_mask* const masks[LB_LABEL_COUNT],
                         int32_t* out_label,
                         double out_confidences[LB_LABEL_COUNT]);
LB_API const char* lb_diagnosis_label_name(int32_t label);

/* ---- runs ---- */

LB_API lb_status lb_config_create(lb_run_config** out);
LB_API void lb_config_free(lb_run_config* config);

/* String keys: "images", "truth", "pred", "out", "ids", "format".
 * Integer keys: "task", "seed", "strict", "intersect-boundary",
 * "baseline", "stratified", "train-count", "test-count", "count",
 * "threads". Booleans take 0/1. */
LB_API lb_status lb_config_set_string(lb_run_config* config, const char* key,
                                      const char* value);
LB_API lb_status lb_config_set_int(lb_run_config* config, const char* key,
                                   int64_t value);

/* command: "split", "augment", "eval-boundary", "eval-attributes",
 * "diagnose", "eval-diagnosis" or "baseline-segment". On success the
 * caller owns *out_report. Output files land under the configured "out"
 * directory. */
LB_API lb_status lb_run(const lb_run_config* config, const char* command,
                        lb_report** out_report);

/* ---- reports ---- */

LB_API void lb_report_free(lb_report* report);
/* Full report document / aggregates object as JSON text; free the result
 * with lb_string_free. */
LB_API lb_status lb_report_json(const lb_report* report, char** out_text);
LB_API lb_status lb_report_aggregates_json(const lb_report* report,
                                           char** out_text);
LB_API size_t lb_report_warning_count(const lb_report* report);
LB_API const char* lb_report_warning(const lb_report* report, size_t index);
LB_API size_t lb_report_error_count(const lb_report* report);
LB_API const char* lb_report_error(const lb_report* report, size_t index);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LESIONBENCH_H */
