/* lrbslglr — hyperspectral target detection via low-rank background
 * subspace learning and graph-Laplacian-regularized sparse coding.
 *
 * C interface of the shared library. All objects are opaque handles that
 * must be released with their matching *_free function. Every fallible call
 * returns lrg_status; on failure lrg_last_error() describes what went wrong
 * for the calling thread.
 */
#ifndef LRBSLGLR_H
#define LRBSLGLR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LRG_API
#elif defined(__GNUC__)
#define LRG_API __attribute__((visibility("default")))
#else
#define LRG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrg_status {
  LRG_OK = 0,
  LRG_ERR_VALIDATION = 1, /* bad arguments or inconsistent inputs */
  LRG_ERR_IO = 2,         /* unreadable, missing or corrupt files */
  LRG_ERR_NUMERIC = 3     /* solver divergence or factorization failure */
} lrg_status;

/* Message for the most recent failure on this thread; never NULL. */
LRG_API const char* lrg_last_error(void);

/* ------------------------------------------------------------------ */
/* Hyperspectral cube: <base>.json sidecar + <base>.raw payload,
 * band-sequential, row-major within band, little-endian f32/f64.      */

typedef struct lrg_cube lrg_cube;

LRG_API lrg_status lrg_cube_load(const char* path, lrg_cube** out);
/* dtype is "f32" or "f64". */
LRG_API lrg_status lrg_cube_save(const lrg_cube* cube, const char* path, const char* dtype);
LRG_API lrg_status lrg_cube_dims(const lrg_cube* cube, int32_t* height, int32_t* width,
                                 int32_t* bands);
/* Copies all bands*height*width values in storage order. */
LRG_API lrg_status lrg_cube_values(const lrg_cube* cube, double* buffer, size_t buffer_len);
LRG_API void lrg_cube_free(lrg_cube* cube);

/* ------------------------------------------------------------------ */
/* Ground-truth mask: ASCII PGM (P2), nonzero = target.                */

typedef struct lrg_mask lrg_mask;

LRG_API lrg_status lrg_mask_load(const char* path, lrg_mask** out);
LRG_API lrg_status lrg_mask_save(const lrg_mask* mask, const char* path);
LRG_API lrg_status lrg_mask_dims(const lrg_mask* mask, int32_t* height, int32_t* width);
LRG_API void lrg_mask_free(lrg_mask* mask);

/* ------------------------------------------------------------------ */
/* Target spectrum: CSV, one reflectance per line.                     */

typedef struct lrg_spectrum lrg_spectrum;

LRG_API lrg_status lrg_spectrum_load_csv(const char* path, lrg_spectrum** out);
LRG_API lrg_status lrg_spectrum_save_csv(const lrg_spectrum* spectrum, const char* path);
/* Average spectrum of the mask's target pixels, in the cube's raw scale. */
LRG_API lrg_status lrg_spectrum_from_mask(const lrg_cube* cube, const lrg_mask* mask,
                                          lrg_spectrum** out);
LRG_API lrg_status lrg_spectrum_length(const lrg_spectrum* spectrum, int32_t* length);
LRG_API lrg_status lrg_spectrum_values(const lrg_spectrum* spectrum, double* buffer,
                                       size_t buffer_len);
LRG_API void lrg_spectrum_free(lrg_spectrum* spectrum);

/* ------------------------------------------------------------------ */
/* Detection pipeline.                                                 */

typedef struct lrg_params {
  int32_t k;          /* background subspace size */
  double lambda1;     /* stage-1 sparsity */
  double lambda2;     /* nuclear-norm weight */
  double lambda3;     /* graph smoothness weight */
  double lambda4;     /* joint-coding sparsity */
  double sigma;       /* squared-distance threshold for region graphs */
  int32_t omega;      /* region grid cell side, pixels */
  double mu0;         /* ADMM penalty start */
  double mu_max;      /* ADMM penalty cap */
  double gamma;       /* ADMM penalty growth factor */
  double eps;         /* ADMM primal-residual tolerance */
  int32_t k_max;      /* ADMM iteration cap */
  int32_t warm_start; /* nonzero: seed the subspace refinement with the SVD basis */
  double eps_guard;   /* detector denominator guard */
} lrg_params;

/* Fills the documented defaults (K=12, lambda1=lambda2=1e-4,
 * lambda3=lambda4=1, sigma=0.3, omega=10, mu0=1e-3, mu_max=1e10,
 * gamma=1.2, eps=1e-6, k_max=200, warm_start=0, eps_guard=1e-12). */
LRG_API void lrg_params_init(lrg_params* params);

typedef struct lrg_result lrg_result;

/* Runs the full detector on a raw (unnormalized) cube. Either a target
 * spectrum (raw scale) or a mask must be given; with a NULL target the
 * spectrum is averaged from the mask's target pixels. A mask also adds
 * ROC/AUC to the result. */
LRG_API lrg_status lrg_detect(const lrg_cube* cube, const lrg_spectrum* target,
                              const lrg_mask* mask, const lrg_params* params, lrg_result** out);

/* Per-pixel detection scores, row-major. */
LRG_API lrg_status lrg_result_scores(const lrg_result* result, double* buffer, size_t buffer_len);
/* The score map as a 1-band cube (caller frees). */
LRG_API lrg_status lrg_result_map_cube(const lrg_result* result, lrg_cube** out);
/* JSON run report (auc, params, iteration counts, stage timings);
 * owned by the result. */
LRG_API const char* lrg_result_report_json(const lrg_result* result);
LRG_API lrg_status lrg_result_auc(const lrg_result* result, double* auc);
LRG_API lrg_status lrg_result_seconds_total(const lrg_result* result, double* seconds);
/* Writes "row,col,score" rows. */
LRG_API lrg_status lrg_result_write_scores_csv(const lrg_result* result, const char* path);
/* Writes "threshold,fpr,tpr" rows; fails if no mask was supplied. */
LRG_API lrg_status lrg_result_write_roc_csv(const lrg_result* result, const char* path);
LRG_API void lrg_result_free(lrg_result* result);

/* ------------------------------------------------------------------ */
/* Standalone evaluation of a stored score map against a mask.         */

LRG_API lrg_status lrg_eval_auc(const lrg_cube* map, const lrg_mask* mask, double* auc);
LRG_API lrg_status lrg_eval_write_roc_csv(const lrg_cube* map, const lrg_mask* mask,
                                          const char* path);

/* ------------------------------------------------------------------ */
/* Synthetic scenes.                                                   */

typedef struct lrg_synth_spec {
  int32_t height;
  int32_t width;
  int32_t bands;
  int32_t background_rank;
  int32_t n_targets;
  double target_abundance; /* in (0, 1] */
  double noise_snr_db;     /* INFINITY = noise-free */
  uint64_t seed;
} lrg_synth_spec;

/* Defaults: 50x50x40, rank 8, 20 targets, abundance 1.0, 30 dB, seed 10. */
LRG_API void lrg_synth_spec_init(lrg_synth_spec* spec);

/* Deterministic in the seed. Any output pointer may be NULL to skip it. */
LRG_API lrg_status lrg_synth(const lrg_synth_spec* spec, lrg_cube** cube, lrg_mask** mask,
                             lrg_spectrum** target);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LRBSLGLR_H */
