/*
 * protozoa: Artificial Protozoa Optimizer with sequential and data-parallel
 * engines, benchmark functions and Otsu image thresholding.
 *
 * All functions return a pz_status. On failure a description is available
 * from pz_last_error() on the calling thread until the next failing call.
 * Handles are opaque and owned by the caller; release them with the matching
 * *_destroy function. Destroy functions accept NULL.
 */
#ifndef PROTOZOA_PROTOZOA_H
#define PROTOZOA_PROTOZOA_H

#include <stddef.h>
#include <stdint.h>

#if defined(PROTOZOA_BUILDING_LIBRARY)
#define PZ_API __attribute__((visibility("default")))
#else
#define PZ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pz_status {
    PZ_OK = 0,
    PZ_ERR_INVALID_ARGUMENT = 1,
    PZ_ERR_CONFIG = 2,
    PZ_ERR_OBJECTIVE = 3,
    PZ_ERR_IO = 4,
    PZ_ERR_PARSE = 5,
    PZ_ERR_INTERNAL = 6
} pz_status;

typedef enum pz_objective {
    PZ_SPHERE = 0,
    PZ_BENT_CIGAR = 1,
    PZ_HIGH_CONDITIONED_ELLIPTIC = 2,
    PZ_HGBAT = 3,
    PZ_ROSENBROCK = 4,
    PZ_GRIEWANK = 5
} pz_objective;

typedef enum pz_engine {
    PZ_ENGINE_SEQUENTIAL = 0,
    PZ_ENGINE_PARALLEL = 1
} pz_engine;

typedef enum pz_pgm_encoding {
    PZ_PGM_ASCII = 0,  /* P2 */
    PZ_PGM_BINARY = 1  /* P5 */
} pz_pgm_encoding;

typedef struct pz_config pz_config;
typedef struct pz_result pz_result;
typedef struct pz_image pz_image;

/* User objective. Must be safe to call concurrently in parallel mode. */
typedef double (*pz_objective_fn)(const double* x, size_t dim, void* user_data);

PZ_API const char* pz_version(void);
PZ_API const char* pz_last_error(void);
/* Byte offset of the last PZ_ERR_PARSE failure on this thread. */
PZ_API size_t pz_last_error_offset(void);

/* ---- objectives -------------------------------------------------------- */

PZ_API pz_status pz_objective_from_name(const char* name, pz_objective* out);
PZ_API const char* pz_objective_name(pz_objective id);
/* Comma-separated list of accepted names. */
PZ_API const char* pz_objective_names(void);
PZ_API pz_status pz_evaluate(pz_objective id, const double* x, size_t dim, double* out);

/* ---- configuration ----------------------------------------------------- */

/* Defaults: ps 100, dim 10, np 1, pf_max 0.1, bounds [-100, 100],
 * 1000 iterations, no FE budget, seed 0, eps 2^-52. */
PZ_API pz_status pz_config_create(pz_config** out);
PZ_API void pz_config_destroy(pz_config* cfg);
PZ_API pz_status pz_config_set_population(pz_config* cfg, size_t ps);
PZ_API pz_status pz_config_set_dimension(pz_config* cfg, size_t dim);
PZ_API pz_status pz_config_set_neighbor_pairs(pz_config* cfg, size_t np);
PZ_API pz_status pz_config_set_pf_max(pz_config* cfg, double pf_max);
PZ_API pz_status pz_config_set_bounds(pz_config* cfg, double lower, double upper);
PZ_API pz_status pz_config_set_max_iterations(pz_config* cfg, uint64_t iterations);
/* 0 clears the budget. */
PZ_API pz_status pz_config_set_max_fes(pz_config* cfg, uint64_t max_fes);
PZ_API pz_status pz_config_set_seed(pz_config* cfg, uint64_t seed);
PZ_API pz_status pz_config_set_eps(pz_config* cfg, double eps);
/* PZ_ERR_CONFIG with every violated invariant in pz_last_error(). */
PZ_API pz_status pz_config_validate(const pz_config* cfg);

/* ---- runs -------------------------------------------------------------- */

/* workers = 0 selects the hardware concurrency; ignored for sequential. */
PZ_API pz_status pz_run(const pz_config* cfg, pz_objective id, pz_engine engine, unsigned workers,
                        pz_result** out);
PZ_API pz_status pz_run_custom(const pz_config* cfg, pz_objective_fn fn, void* user_data,
                               pz_engine engine, unsigned workers, pz_result** out);
PZ_API void pz_result_destroy(pz_result* result);

PZ_API double pz_result_best_fitness(const pz_result* result);
PZ_API size_t pz_result_dimension(const pz_result* result);
/* Copies min(capacity, dim) coordinates; returns dim. */
PZ_API size_t pz_result_best_position(const pz_result* result, double* out, size_t capacity);
/* trace[0] is the initial best; one entry per iteration follows. */
PZ_API size_t pz_result_trace_length(const pz_result* result);
PZ_API size_t pz_result_trace(const pz_result* result, double* out, size_t capacity);
PZ_API uint64_t pz_result_fe_count(const pz_result* result);
PZ_API uint64_t pz_result_iterations(const pz_result* result);
PZ_API uint64_t pz_result_warnings(const pz_result* result);
PZ_API double pz_result_seconds(const pz_result* result);
PZ_API unsigned pz_result_workers(const pz_result* result);
PZ_API pz_engine pz_result_engine(const pz_result* result);

/* ---- imaging ----------------------------------------------------------- */

PZ_API pz_status pz_image_load(const char* path, pz_image** out);
PZ_API pz_status pz_image_load_memory(const uint8_t* bytes, size_t size, pz_image** out);
/* pixels: width * height row-major intensities. */
PZ_API pz_status pz_image_create(size_t width, size_t height, const uint8_t* pixels, pz_image** out);
PZ_API void pz_image_destroy(pz_image* img);
PZ_API size_t pz_image_width(const pz_image* img);
PZ_API size_t pz_image_height(const pz_image* img);
PZ_API const uint8_t* pz_image_pixels(const pz_image* img);
PZ_API pz_status pz_image_save(const pz_image* img, const char* path, pz_pgm_encoding encoding);

PZ_API pz_status pz_between_class_variance(const pz_image* img, int threshold, double* out);
PZ_API pz_status pz_otsu_brute_force(const pz_image* img, int* threshold, double* variance);
/* Uses ps, max_iterations and seed from cfg; dim and bounds are forced to 1 and [0, 255].
 * result may be NULL. */
PZ_API pz_status pz_otsu_apo(const pz_image* img, const pz_config* cfg, pz_engine engine,
                             unsigned workers, int* threshold, double* variance,
                             pz_result** result);
PZ_API pz_status pz_image_threshold(const pz_image* img, int threshold, pz_image** out);

#ifdef __cplusplus
}
#endif

#endif /* PROTOZOA_PROTOZOA_H */
