#ifndef QDIFF_QDIFF_H
#define QDIFF_QDIFF_H

/* C interface to the quadratic differential library. Every function returns
 * a qd_status; on failure qd_last_error() describes the problem for the
 * calling thread. Strings returned through char** are owned by the caller
 * and released with qd_string_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QD_API __declspec(dllexport)
#else
#define QD_API __attribute__((visibility("default")))
#endif

typedef enum qd_status {
  QD_OK = 0,
  QD_ERR_INVALID_ARGUMENT = 1,
  QD_ERR_INVALID_DIFFERENTIAL = 2,
  QD_ERR_DEGENERATE = 3,
  QD_ERR_DOMAIN = 4,
  QD_ERR_CONTINUATION = 5,
  QD_ERR_CONVERGENCE = 6,
  QD_ERR_POLE_PROXIMITY = 7,
  QD_ERR_INSUFFICIENT_RESOLUTION = 8,
  QD_ERR_VALIDATION = 20,
  QD_ERR_INTERNAL = 99
} qd_status;

typedef struct qd_complex {
  double re;
  double im;
} qd_complex;

/* Zero-valued geometric thresholds are derived from (a, b). */
typedef struct qd_trace_config {
  double rel_tol;
  double abs_tol;
  double launch_offset;
  double r_max;
  double r_min;
  double eps_hit;
  uint64_t step_budget;
  double level_tol;
  int project_level;
  double crit_tol;
} qd_trace_config;

typedef enum qd_criterion_class {
  QD_CRITERION_BOTH_REAL = 0,
  QD_CRITERION_PLUS_REAL = 1,
  QD_CRITERION_MINUS_REAL = 2,
  QD_CRITERION_NEITHER = 3
} qd_criterion_class;

typedef struct qd_criterion {
  qd_criterion_class cls;
  double im_plus;
  double im_minus;
  double relative_distance;
  int ambiguous;
} qd_criterion;

typedef struct qd_graph_summary {
  const char* case_label; /* static storage */
  int critical_count;
  int short_count;
  int loop_zero;
  int has_criterion;
  int critical_evidence;
  int agreement;
  int ambiguous;
  int validation_failed;
  int same_zero_ok;
  int both_zeros_ok;
  size_t arc_count;
  size_t face_count;
  double teichmuller_max_deviation;
} qd_graph_summary;

typedef struct qd_region {
  double x0, x1, y0, y1;
} qd_region;

typedef struct qd_diff qd_diff;
typedef struct qd_graph qd_graph;
typedef struct qd_survey qd_survey;
typedef struct qd_laguerre qd_laguerre;

QD_API const char* qd_version(void);
QD_API const char* qd_status_name(qd_status status);
QD_API const char* qd_last_error(void);
QD_API void qd_string_free(char* s);

QD_API void qd_trace_config_default(qd_trace_config* cfg);
QD_API qd_region qd_region_default(void);

/* Differential -(z-a)(z-b)/z^2 dz^2. */
QD_API qd_status qd_diff_new(qd_complex a, qd_complex b, qd_diff** out);
QD_API void qd_diff_free(qd_diff* d);
QD_API qd_status qd_diff_zeros(const qd_diff* d, qd_complex* a, qd_complex* b);
QD_API qd_status qd_diff_criterion(const qd_diff* d, double tau, qd_criterion* out);
/* sheet: +1 or -1 */
QD_API qd_status qd_diff_residue_origin(const qd_diff* d, int sheet, qd_complex* out);
QD_API qd_status qd_diff_period_json(const qd_diff* d, const qd_trace_config* cfg, uint64_t seed,
                                     char** out);

/* Horizontal critical graph; cfg may be NULL. */
QD_API qd_status qd_graph_classify(const qd_diff* d, const qd_trace_config* cfg, qd_graph** out);
QD_API void qd_graph_free(qd_graph* g);
QD_API qd_status qd_graph_summarize(const qd_graph* g, qd_graph_summary* out);
/* QD_ERR_VALIDATION with a report in qd_last_error() when tracing
 * contradicts the criterion or a structural guard fails. */
QD_API qd_status qd_graph_validate(const qd_graph* g);
/* with_vertical adds the vertical arcs from the zeros. */
QD_API qd_status qd_graph_json(const qd_graph* g, uint64_t seed, int with_vertical, char** out);
QD_API qd_status qd_graph_svg(const qd_graph* g, int with_vertical, char** out);
/* Parses a graph document and emits it again. */
QD_API qd_status qd_graph_document_normalize(const char* json, char** out);

QD_API qd_status qd_locus_json(qd_complex a, qd_region region, int per_branch, uint64_t seed,
                               char** out);
QD_API qd_status qd_locus_csv(qd_complex a, qd_region region, int per_branch, char** out);

/* trace_samples cells are verified by tracing, chosen with seed. */
QD_API qd_status qd_survey_run(qd_complex a, qd_region region, int resolution, int trace_samples,
                               uint64_t seed, const qd_trace_config* cfg, qd_survey** out);
QD_API void qd_survey_free(qd_survey* s);
QD_API qd_status qd_survey_json(const qd_survey* s, uint64_t seed, char** out);
QD_API qd_status qd_survey_csv(const qd_survey* s, char** out);
QD_API qd_status qd_survey_svg(const qd_survey* s, char** out);
/* traced: cells traced; agreements among the unambiguous ones */
QD_API qd_status qd_survey_counts(const qd_survey* s, int* traced, int* traced_unambiguous,
                                  int* agreements);

/* Root measures of the rescaled Laguerre polynomials for each n in ns,
 * compared with the algebraic Cauchy transform at the standard probes. */
QD_API qd_status qd_laguerre_run(qd_complex A, const int* ns, size_t count,
                                 const qd_trace_config* cfg, qd_laguerre** out);
QD_API void qd_laguerre_free(qd_laguerre* l);
QD_API qd_status qd_laguerre_json(const qd_laguerre* l, uint64_t seed, char** out);
QD_API qd_status qd_laguerre_csv(const qd_laguerre* l, char** out);
QD_API qd_status qd_laguerre_svg(const qd_laguerre* l, char** out);
/* monotone: errors strictly decrease in n at every probe */
QD_API qd_status qd_laguerre_summary(const qd_laguerre* l, int* monotone, double* max_error_last,
                                     double* max_root_distance_last);

#ifdef __cplusplus
}
#endif

#endif
