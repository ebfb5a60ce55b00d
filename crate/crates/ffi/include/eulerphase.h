#ifndef EULERPHASE_H
#define EULERPHASE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Pixel state in an [`EpPhaseMap`].
typedef enum EpPixelKind {
  EP_PIXEL_KIND_OUTSIDE = 0,
  EP_PIXEL_KIND_EMPTY = 1,
  EP_PIXEL_KIND_LABELED = 2,
} EpPixelKind;

// Status codes; 2–4 match the command-line exit codes.
typedef enum EpStatus {
  EP_STATUS_OK = 0,
  // A required pointer was null or a string was not UTF-8.
  EP_STATUS_INVALID_ARGUMENT = 1,
  EP_STATUS_CONFIG = 2,
  // Domain, pole, boundary or convergence failure.
  EP_STATUS_DOMAIN = 3,
  EP_STATUS_UNSUPPORTED_FAMILY = 4,
  EP_STATUS_IO = 5,
  // A Rust panic was caught at the boundary.
  EP_STATUS_INTERNAL = 6,
} EpStatus;

// Opaque rasterized phase diagram.
typedef struct EpPhaseMap EpPhaseMap;

// Opaque weight sequence.
typedef struct EpWeights EpWeights;

// Classification of one point of the disk.
typedef struct EpPhase {
  uint64_t dominant_h;
  uint64_t dominant_k;
  uint64_t major_arc_count;
  double leading;
  double margin;
  // 1 when the point lies within the tie tolerance of a phase boundary.
  int32_t boundary;
} EpPhase;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length excluding the NUL,
// or 0 when no error has been recorded.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t ep_last_error_message(char *buf, size_t len);

// Parse a family spec such as `power:s0=2` into a new handle.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum EpStatus ep_weights_parse(const char *spec, struct EpWeights **out);

// Replace the continuation abscissa σ0 (must lie in (−1, 0)).
//
// # Safety
// `weights` must be a live handle from [`ep_weights_parse`].
enum EpStatus ep_weights_set_sigma0(struct EpWeights *weights, double sigma0);

// # Safety
// `weights` must be null or a handle from [`ep_weights_parse`] not yet freed.
void ep_weights_free(struct EpWeights *weights);

// Pole location s0 of the handle's Dirichlet series.
//
// # Safety
// `weights` must be a live handle; `out` writable.
enum EpStatus ep_weights_s0(const struct EpWeights *weights, double *out);

// Canonical spec string of the handle; release with [`ep_string_free`].
//
// # Safety
// `weights` must be a live handle.
char *ep_weights_describe(const struct EpWeights *weights);

// # Safety
// `s` must be null or a string returned by this library.
void ep_string_free(char *s);

// Q_n(z) by the exact log-exp recurrence.
//
// # Safety
// `weights` must be a live handle; `out_re`, `out_im` writable.
enum EpStatus ep_eval_exact(const struct EpWeights *weights,
                            double z_re,
                            double z_im,
                            uint64_t n,
                            double *out_re,
                            double *out_im);

// Q_n(z) by the trapezoid rule on a circle; `radius <= 0` and `points == 0`
// select the defaults.
//
// # Safety
// `weights` must be a live handle; `out_re`, `out_im` writable.
enum EpStatus ep_contour_extract(const struct EpWeights *weights,
                                 double z_re,
                                 double z_im,
                                 uint64_t n,
                                 double radius,
                                 uint64_t points,
                                 double *out_re,
                                 double *out_im);

// Classify z among arcs with k ≤ k_max.
//
// # Safety
// `weights` must be a live handle; `out` writable.
enum EpStatus ep_classify(const struct EpWeights *weights,
                          double z_re,
                          double z_im,
                          uint64_t k_max,
                          double tie_tol,
                          struct EpPhase *out);

// Saddle-point estimate of Q_n(z) summed over the major arcs, with its
// error exponent μ. `mu` may be null.
//
// # Safety
// `weights` must be a live handle; `out_re`, `out_im` writable.
enum EpStatus ep_estimate(const struct EpWeights *weights,
                          double z_re,
                          double z_im,
                          uint64_t n,
                          uint64_t k_max,
                          double *out_re,
                          double *out_im,
                          double *mu);

// Leading-order growth estimate of Q_n(1).
//
// # Safety
// `weights` must be a live handle; `out` writable.
enum EpStatus ep_meinardus_r(const struct EpWeights *weights, uint64_t n, double *out);

// Raster the window [re_min, re_max] × [im_min, im_max] at width × height.
//
// # Safety
// `weights` must be a live handle; `out` writable.
enum EpStatus ep_phase_map_new(const struct EpWeights *weights,
                               double re_min,
                               double re_max,
                               double im_min,
                               double im_max,
                               uint32_t width,
                               uint32_t height,
                               uint64_t k_max,
                               struct EpPhaseMap **out);

// # Safety
// `map` must be null or a handle from [`ep_phase_map_new`] not yet freed.
void ep_phase_map_free(struct EpPhaseMap *map);

// Pixel at (col, row), row 0 at the top. `h`, `k` are set to 0 unless the
// pixel is labeled; `boundary` may be null.
//
// # Safety
// `map` must be a live handle; `kind`, `h`, `k` writable.
enum EpStatus ep_phase_map_pixel(const struct EpPhaseMap *map,
                                 uint32_t col,
                                 uint32_t row,
                                 enum EpPixelKind *kind,
                                 uint64_t *h,
                                 uint64_t *k,
                                 int32_t *boundary);

// Fraction of in-disk pixels whose dominant arc is (h, k).
//
// # Safety
// `map` must be a live handle; `out` writable.
enum EpStatus ep_phase_map_fraction(const struct EpPhaseMap *map,
                                    uint64_t h,
                                    uint64_t k,
                                    double *out);

// Write the map as a binary PPM image.
//
// # Safety
// `map` must be a live handle; `path` a NUL-terminated string.
enum EpStatus ep_phase_map_write_ppm(const struct EpPhaseMap *map, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EULERPHASE_H */
