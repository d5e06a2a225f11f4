#include "minles/minles.h"

#include <memory>
#include <string>
#include <vector>

#include "minles/error.hpp"
#include "minles/io.hpp"
#include "minles/pipeline.hpp"
#include "minles/sgs.hpp"

struct minles_config {
  minles::ConfigData data;
  minles::RunConfig config;
};

struct minles_report {
  minles::Report report;
};

struct minles_mesh {
  minles::Mesh mesh;
};

namespace {

thread_local std::string g_last_error;

minles_status status_of(minles::ErrorKind kind) {
  using minles::ErrorKind;
  switch (kind) {
    case ErrorKind::config: return MINLES_ERR_CONFIG;
    case ErrorKind::io: return MINLES_ERR_IO;
    case ErrorKind::mesh: return MINLES_ERR_MESH;
    case ErrorKind::tree: return MINLES_ERR_TREE;
    case ErrorKind::solver: return MINLES_ERR_SOLVER;
    case ErrorKind::divergence: return MINLES_ERR_DIVERGENCE;
    case ErrorKind::integrator: return MINLES_ERR_INTEGRATOR;
    case ErrorKind::stats: return MINLES_ERR_STATS;
    case ErrorKind::budget: return MINLES_ERR_BUDGET;
    case ErrorKind::internal: return MINLES_ERR_INTERNAL;
  }
  return MINLES_ERR_INTERNAL;
}

template <class F>
minles_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return MINLES_OK;
  } catch (const minles::Error& e) {
    g_last_error = std::string(minles::to_string(e.kind())) + ": " + e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MINLES_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("InternalError: ") + e.what();
    return MINLES_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "InternalError: unknown exception";
    return MINLES_ERR_INTERNAL;
  }
}

minles_status bad_argument(const char* what) {
  g_last_error = std::string("invalid argument: ") + what;
  return MINLES_ERR_ARGUMENT;
}

minles_status make_config(minles::ConfigData data, minles_config** out) {
  auto handle = std::make_unique<minles_config>();
  handle->config = minles::resolve_config(data);
  handle->data = std::move(data);
  *out = handle.release();
  return MINLES_OK;
}

minles_status make_report(minles::Report report, minles_report** out) {
  if (out) *out = new minles_report{std::move(report)};
  return MINLES_OK;
}

}  // namespace

extern "C" {

const char* minles_last_error(void) { return g_last_error.c_str(); }

const char* minles_version(void) { return "0.1.0"; }

int minles_status_is_user_error(minles_status status) {
  switch (status) {
    case MINLES_ERR_CONFIG:
    case MINLES_ERR_IO:
    case MINLES_ERR_MESH:
    case MINLES_ERR_TREE:
    case MINLES_ERR_STATS:
    case MINLES_ERR_BUDGET:
    case MINLES_ERR_ARGUMENT: return 1;
    default: return 0;
  }
}

minles_status minles_config_load(const char* path, minles_config** out) {
  if (!path || !out) return bad_argument("path and out must be non-null");
  *out = nullptr;
  return guarded([&] { make_config(minles::load_config_file(path), out); });
}

minles_status minles_config_parse(const char* text, minles_config** out) {
  if (!text || !out) return bad_argument("text and out must be non-null");
  *out = nullptr;
  return guarded([&] { make_config(minles::parse_ini(text), out); });
}

minles_status minles_config_set(minles_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return bad_argument("config, key and value must be non-null");
  return guarded([&] {
    minles::ConfigData data = config->data;
    data.set(key, value);
    config->config = minles::resolve_config(data);
    config->data = std::move(data);
  });
}

minles_status minles_config_write_resolved(const minles_config* config, const char* path) {
  if (!config || !path) return bad_argument("config and path must be non-null");
  return guarded([&] { minles::write_text(path, minles::render_resolved(config->config)); });
}

const char* minles_config_output_dir(const minles_config* config) {
  return config ? config->config.out_dir.c_str() : "";
}

void minles_config_free(minles_config* config) { delete config; }

minles_status minles_run(const minles_config* config) {
  if (!config) return bad_argument("config must be non-null");
  return guarded([&] { minles::stage_run(config->config); });
}

minles_status minles_budget(const minles_config* config, minles_budget_mode mode) {
  if (!config) return bad_argument("config must be non-null");
  minles::BudgetMode m;
  switch (mode) {
    case MINLES_BUDGET_KE: m = minles::BudgetMode::ke; break;
    case MINLES_BUDGET_TKE: m = minles::BudgetMode::tke; break;
    case MINLES_BUDGET_BOTH: m = minles::BudgetMode::both; break;
    default: return bad_argument("unknown budget mode");
  }
  return guarded([&] { minles::stage_budget(config->config, minles::base_paths(config->config), m); });
}

minles_status minles_estimate(const minles_config* config) {
  if (!config) return bad_argument("config must be non-null");
  return guarded([&] { minles::stage_estimate(config->config, minles::base_paths(config->config)); });
}

minles_status minles_adapt(const minles_config* config, int reuse_base, minles_report** out) {
  if (!config) return bad_argument("config must be non-null");
  if (out) *out = nullptr;
  return guarded([&] {
    minles::CycleOptions opt;
    opt.reuse_base = reuse_base != 0;
    make_report(minles::adaptation_cycle(config->config, opt), out);
  });
}

minles_status minles_report_write(const minles_config* config, minles_report** out) {
  if (!config) return bad_argument("config must be non-null");
  if (out) *out = nullptr;
  return guarded([&] {
    minles::Report r = minles::build_report(config->config);
    minles::write_report(config->config, r);
    make_report(std::move(r), out);
  });
}

size_t minles_report_stage_count(const minles_report* report) { return report ? report->report.stages.size() : 0; }

const char* minles_report_stage_name(const minles_report* report, size_t index) {
  if (!report || index >= report->report.stages.size()) return "";
  return report->report.stages[index].stage.c_str();
}

double minles_report_stage_seconds(const minles_report* report, size_t index) {
  if (!report || index >= report->report.stages.size()) return 0.0;
  return report->report.stages[index].seconds;
}

size_t minles_report_leaves_before(const minles_report* report) { return report ? report->report.leaves_before : 0; }
size_t minles_report_leaves_after(const minles_report* report) { return report ? report->report.leaves_after : 0; }
size_t minles_report_flagged(const minles_report* report) { return report ? report->report.flagged : 0; }
size_t minles_report_closure(const minles_report* report) { return report ? report->report.closure : 0; }
double minles_report_band_fraction(const minles_report* report) {
  return report ? report->report.band_fraction() : 0.0;
}
size_t minles_report_negative_ke_columns(const minles_report* report) {
  return report ? report->report.negative_ke_columns : 0;
}
size_t minles_report_rerun_steps(const minles_report* report) { return report ? report->report.rerun_steps : 0; }

size_t minles_report_histogram(const minles_report* report, int after, size_t bin) {
  if (!report || bin >= minles::Histogram::kBins) return 0;
  return (after ? report->report.after : report->report.before).counts[bin];
}

void minles_report_free(minles_report* report) { delete report; }

minles_status minles_mesh_load(const char* path, minles_mesh** out) {
  if (!path || !out) return bad_argument("path and out must be non-null");
  *out = nullptr;
  return guarded([&] { *out = new minles_mesh{minles::read_grid(path)}; });
}

size_t minles_mesh_leaf_count(const minles_mesh* mesh) { return mesh ? mesh->mesh.leaf_count() : 0; }
size_t minles_mesh_node_count(const minles_mesh* mesh) { return mesh ? mesh->mesh.size() : 0; }

minles_status minles_mesh_refine(minles_mesh* mesh, const int* ids, size_t count, size_t* closure_count) {
  if (!mesh || (count > 0 && !ids)) return bad_argument("mesh and ids must be non-null");
  return guarded([&] {
    const std::vector<minles::CellId> targets(ids, ids + count);
    const minles::MeshDelta d = mesh->mesh.refine(targets);
    if (closure_count) *closure_count = d.closure.size();
  });
}

minles_status minles_mesh_save(const minles_mesh* mesh, const char* path) {
  if (!mesh || !path) return bad_argument("mesh and path must be non-null");
  return guarded([&] { minles::write_grid(path, mesh->mesh); });
}

minles_status minles_mesh_export_vtk(const minles_mesh* mesh, const char* path) {
  if (!mesh || !path) return bad_argument("mesh and path must be non-null");
  return guarded([&] { minles::export_vtk(path, mesh->mesh, {}); });
}

void minles_mesh_free(minles_mesh* mesh) { delete mesh; }

double minles_iq_nu(double nu_eff, double nu, double alpha, double n) { return minles::iq_nu(nu_eff, nu, alpha, n); }
double minles_iq_eta(double h, double nu, double eps_total, double alpha, double m) {
  return minles::iq_eta(h, nu, eps_total, alpha, m);
}
double minles_iq_k(double k_res, double k_sgs, double k_num) { return minles::iq_k(k_res, k_sgs, k_num); }
double minles_k_sgs(double nu_sgs, double delta, double c_nu) { return minles::k_sgs_from_nu(nu_sgs, delta, c_nu); }

double minles_wale_nu_t(const double grad[9], double h, double c_w) {
  if (!grad) return 0.0;
  minles::Mat3 g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[i][j] = grad[3 * i + j];
  return minles::wale_nu_t(g, h, c_w);
}

}  // extern "C"
