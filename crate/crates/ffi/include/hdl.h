#ifndef HDL_H
#define HDL_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Length of a prediction: the five label blocks concatenated.
 */
#define HDL_OUTPUT_DIM 21

typedef enum HdlStatus {
  HDL_STATUS_OK = 0,
  HDL_STATUS_NULL_POINTER = 1,
  HDL_STATUS_INVALID_ARGUMENT = 2,
  HDL_STATUS_SHAPE = 3,
  HDL_STATUS_IO = 4,
  HDL_STATUS_CHECKPOINT = 5,
  HDL_STATUS_NON_FINITE = 6,
  HDL_STATUS_RANK_DEFICIENT = 7,
  HDL_STATUS_BUFFER_TOO_SMALL = 8,
  HDL_STATUS_PANIC = 9,
  HDL_STATUS_OTHER = 10,
} HdlStatus;

typedef enum HdlModelKind {
  HDL_MODEL_KIND_EMBED_MLP = 1,
  HDL_MODEL_KIND_HDLN = 2,
} HdlModelKind;

typedef enum HdlMetric {
  HDL_METRIC_CLARK = 0,
  HDL_METRIC_CANBERRA = 1,
  HDL_METRIC_COSINE = 2,
  HDL_METRIC_INTERSECTION = 3,
} HdlMetric;

/*
 Opaque model handle.
 */
typedef struct HdlModel HdlModel;

/*
 Coefficients are ordered intercept, pre-trend, level change, slope change.
 */
typedef struct HdlItsResult {
  double coefficients[4];
  double std_errors[4];
  double p_values[4];
  double ci95_low[4];
  double ci95_high[4];
  double r_squared;
  size_t df;
} HdlItsResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *hdl_version(void);

/*
 Fingerprint of the label schema compiled into the library.
 */
uint64_t hdl_schema_fingerprint(void);

/*
 Message for the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call into the library on this thread.
 */
const char *hdl_last_error_message(void);

/*
 Loads a checkpoint. On success `*out` owns a handle to release with [`hdl_model_free`].

 # Safety
 `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HdlStatus hdl_model_load(const char *path, struct HdlModel **out);

/*
 Releases a handle from [`hdl_model_load`]. Null is ignored.

 # Safety
 `model` must be null or a handle not yet freed.
 */
void hdl_model_free(struct HdlModel *model);

/*
 # Safety
 `model` must be a live handle and `out` a writable pointer.
 */
enum HdlStatus hdl_model_input_dim(const struct HdlModel *model, size_t *out);

/*
 # Safety
 `model` must be a live handle and `out` a writable pointer.
 */
enum HdlStatus hdl_model_kind(const struct HdlModel *model, enum HdlModelKind *out);

/*
 Predicts one post into `out` (at least [`HDL_OUTPUT_DIM`] doubles): the
 lonely, duration, context, interpersonal and interaction distributions in
 that order. `beta` blends HDLN local and global heads; pass NaN for the
 default (global only). EmbedMlp models require NaN.

 # Safety
 `features` must point to `n_features` floats and `out` to `out_len` doubles.
 */
enum HdlStatus hdl_model_predict(const struct HdlModel *model,
                                 const float *features,
                                 size_t n_features,
                                 double beta,
                                 double *out,
                                 size_t out_len);

/*
 Distance or similarity between a target and a predicted distribution of length `len`.

 # Safety
 `target` and `pred` must each point to `len` doubles; `out` must be writable.
 */
enum HdlStatus hdl_metric(enum HdlMetric metric,
                          const double *target,
                          const double *pred,
                          size_t len,
                          double *out);

/*
 Fits `y = b0 + b1·T + b2·D + b3·M` with `D = [T ≥ t0]`, `M = max(0, T − t0)`.
 `months` must be consecutive and increasing.

 # Safety
 `months` and `values` must each point to `n` elements; `out` must be writable.
 */
enum HdlStatus hdl_its_fit(const int64_t *months,
                           const double *values,
                           size_t n,
                           int64_t intervention_month,
                           struct HdlItsResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HDL_H */
