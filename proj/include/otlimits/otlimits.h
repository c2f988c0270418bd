#ifndef OTLIMITS_H
#define OTLIMITS_H

/* C interface to the otlimits library. All handles are opaque; every call
 * that can fail returns an otl_status and leaves a message for
 * otl_last_error() on the calling thread. Measures are passed as arrays of
 * otl_space_size() doubles. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define OTL_API __declspec(dllexport)
#else
#  define OTL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum otl_status {
  OTL_OK = 0,
  OTL_USAGE = 1,
  OTL_VALIDATION = 2,
  OTL_SOLVER = 3,
  OTL_IO = 4,
  OTL_INTERNAL = 5
} otl_status;

typedef struct otl_space otl_space;
typedef struct otl_sweep otl_sweep;

OTL_API const char* otl_version(void);

/* Message of the last failed call on this thread, "" if none. */
OTL_API const char* otl_last_error(void);

OTL_API size_t otl_thread_count(void);

OTL_API otl_status otl_space_torus_1d(size_t m, otl_space** out);
OTL_API otl_status otl_space_interval(size_t m, otl_space** out);
/* Shortest-path metric of an undirected weighted graph. */
OTL_API otl_status otl_space_from_edges(size_t count, const size_t* from, const size_t* to,
                                        const double* weight, otl_space** out);
OTL_API void otl_space_free(otl_space* space);
OTL_API size_t otl_space_size(const otl_space* space);
OTL_API otl_status otl_space_distance(const otl_space* space, size_t i, size_t j, double* out);

/* W1 of pos − neg, by the transportation LP and by the Lipschitz dual LP. */
OTL_API otl_status otl_w1(const otl_space* space, const double* pos, const double* neg, double* primal,
                          double* dual);

OTL_API otl_status otl_wp(const otl_space* space, double p, const double* a, const double* b, double* out);

/* n·min_mu W_p for each n in n_list (strictly increasing). */
OTL_API otl_status otl_sweep_run(const otl_space* space, double p, const double* pos, const double* neg,
                                 const size_t* n_list, size_t count, otl_sweep** out);
OTL_API void otl_sweep_free(otl_sweep* sweep);
OTL_API size_t otl_sweep_length(const otl_sweep* sweep);
OTL_API otl_status otl_sweep_entry(const otl_sweep* sweep, size_t k, size_t* n, double* scaled_value);
/* Copies the minimizing measure of entry k into weights (space size). */
OTL_API otl_status otl_sweep_mu(const otl_sweep* sweep, size_t k, double* weights);
OTL_API double otl_sweep_limit(const otl_sweep* sweep);
OTL_API double otl_sweep_rate(const otl_sweep* sweep);

/* Conditional action for the homogeneous model. bounded is set to 0 and
 * value to +inf when mu leaves part of the transport disconnected. */
OTL_API otl_status otl_conditional(const otl_space* space, double p, double T, const double* pos,
                                   const double* neg, const double* mu, double* value, int* bounded);

/* Runs a CLI experiment from a config file. out_dir may be NULL. Returns
 * the exit code used by the otlimits tool. */
OTL_API otl_status otl_run_experiment(const char* subcommand, const char* config_path, const char* out_dir,
                                      uint64_t seed);

/* Same, from an in-memory config; *result_json receives the JSON result
 * and must be released with otl_string_free. */
OTL_API otl_status otl_run_experiment_json(const char* subcommand, const char* config_json, uint64_t seed,
                                           char** result_json);
OTL_API void otl_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
