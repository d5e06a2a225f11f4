#ifndef MINLES_MINLES_H
#define MINLES_MINLES_H

#include <stddef.h>

#if defined(MINLES_BUILDING_LIBRARY)
#define MINLES_API __attribute__((visibility("default")))
#else
#define MINLES_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum minles_status {
  MINLES_OK = 0,
  MINLES_ERR_CONFIG = 1,
  MINLES_ERR_IO = 2,
  MINLES_ERR_MESH = 3,
  MINLES_ERR_TREE = 4,
  MINLES_ERR_SOLVER = 5,
  MINLES_ERR_DIVERGENCE = 6,
  MINLES_ERR_INTEGRATOR = 7,
  MINLES_ERR_STATS = 8,
  MINLES_ERR_BUDGET = 9,
  MINLES_ERR_ARGUMENT = 10,
  MINLES_ERR_INTERNAL = 11
} minles_status;

typedef enum minles_budget_mode { MINLES_BUDGET_KE = 0, MINLES_BUDGET_TKE = 1, MINLES_BUDGET_BOTH = 2 } minles_budget_mode;

typedef struct minles_config minles_config;
typedef struct minles_report minles_report;
typedef struct minles_mesh minles_mesh;

/* Message of the most recent failure on the calling thread; empty after success. */
MINLES_API const char* minles_last_error(void);
MINLES_API const char* minles_version(void);
/* User errors (bad config, missing files, invalid requests) versus internal failures. */
MINLES_API int minles_status_is_user_error(minles_status status);

/* Configuration. */
MINLES_API minles_status minles_config_load(const char* path, minles_config** out);
MINLES_API minles_status minles_config_parse(const char* text, minles_config** out);
/* Overrides one "section.key" value and re-resolves the configuration. */
MINLES_API minles_status minles_config_set(minles_config* config, const char* key, const char* value);
MINLES_API minles_status minles_config_write_resolved(const minles_config* config, const char* path);
MINLES_API const char* minles_config_output_dir(const minles_config* config);
MINLES_API void minles_config_free(minles_config* config);

/* Pipeline stages; artifacts go to the configured output directory. */
MINLES_API minles_status minles_run(const minles_config* config);
MINLES_API minles_status minles_budget(const minles_config* config, minles_budget_mode mode);
MINLES_API minles_status minles_estimate(const minles_config* config);
/* Full adaptation cycle; reuse_base != 0 keeps a complete base run already on disk. */
MINLES_API minles_status minles_adapt(const minles_config* config, int reuse_base, minles_report** out);
/* Rebuilds the report from artifacts on disk and writes report.txt/report.csv. */
MINLES_API minles_status minles_report_write(const minles_config* config, minles_report** out);

/* Report accessors. */
MINLES_API size_t minles_report_stage_count(const minles_report* report);
MINLES_API const char* minles_report_stage_name(const minles_report* report, size_t index);
MINLES_API double minles_report_stage_seconds(const minles_report* report, size_t index);
MINLES_API size_t minles_report_leaves_before(const minles_report* report);
MINLES_API size_t minles_report_leaves_after(const minles_report* report);
MINLES_API size_t minles_report_flagged(const minles_report* report);
MINLES_API size_t minles_report_closure(const minles_report* report);
MINLES_API double minles_report_band_fraction(const minles_report* report);
MINLES_API size_t minles_report_negative_ke_columns(const minles_report* report);
MINLES_API size_t minles_report_rerun_steps(const minles_report* report);
/* Histogram of the selected estimator, 10 bins on [0,1]; after != 0 selects the adapted run. */
MINLES_API size_t minles_report_histogram(const minles_report* report, int after, size_t bin);
MINLES_API void minles_report_free(minles_report* report);

/* Meshes. */
MINLES_API minles_status minles_mesh_load(const char* path, minles_mesh** out);
MINLES_API size_t minles_mesh_leaf_count(const minles_mesh* mesh);
MINLES_API size_t minles_mesh_node_count(const minles_mesh* mesh);
/* Refines leaves by node id (plus 2:1 closure); closure_count may be NULL. */
MINLES_API minles_status minles_mesh_refine(minles_mesh* mesh, const int* ids, size_t count, size_t* closure_count);
MINLES_API minles_status minles_mesh_save(const minles_mesh* mesh, const char* path);
MINLES_API minles_status minles_mesh_export_vtk(const minles_mesh* mesh, const char* path);
MINLES_API void minles_mesh_free(minles_mesh* mesh);

/* Scalar estimator formulas. */
MINLES_API double minles_iq_nu(double nu_eff, double nu, double alpha, double n);
MINLES_API double minles_iq_eta(double h, double nu, double eps_total, double alpha, double m);
MINLES_API double minles_iq_k(double k_res, double k_sgs, double k_num);
MINLES_API double minles_k_sgs(double nu_sgs, double delta, double c_nu);
MINLES_API double minles_wale_nu_t(const double grad[9], double h, double c_w);

#ifdef __cplusplus
}
#endif

#endif
