#pragma once

#include <array>
#include <string>
#include <vector>

#include "minles/budget.hpp"
#include "minles/config.hpp"
#include "minles/estimators.hpp"
#include "minles/stats.hpp"

namespace minles {

// Files of one simulation directory.
struct RunPaths {
  std::string dir;
  std::string grid() const { return dir + "/grid.bin"; }
  std::string final_state() const { return dir + "/final.bin"; }
  std::string stats() const { return dir + "/stats.bin"; }
  std::string run_info() const { return dir + "/run.json"; }
  std::string budget() const { return dir + "/budget.bin"; }
  std::string snapshot(std::size_t k) const;
};

RunPaths base_paths(const RunConfig& config);
RunPaths adapted_paths(const RunConfig& config, EstimatorId estimator);

struct RunSummary {
  std::size_t steps = 0;
  double dt_finest = 0.0;
  double dt_root = 0.0;
  std::size_t sample_stride = 1;
  std::size_t snapshots = 0;
  std::size_t leaves = 0;
  double t_start = 0.0;
  double t_end = 0.0;
};

// Advances `state` for `duration` on `mesh`, accumulating statistics and writing
// window snapshots, the final state and the statistics into paths.dir.
RunSummary run_simulation(const RunConfig& config, const Mesh& mesh, FlowState state, double duration,
                          const RunPaths& paths);
// Case set-up followed by run_simulation over run.t_end into the base directory.
RunSummary stage_run(const RunConfig& config);
RunSummary read_run_summary(const RunPaths& paths);

enum class BudgetMode { ke, tke, both };
BudgetMode parse_budget_mode(const std::string& text);

// Replays the snapshot triplets of a run directory and writes the mean budget terms.
BudgetMeans stage_budget(const RunConfig& config, const RunPaths& paths, BudgetMode mode);

struct EstimateResult {
  std::vector<double> x, y;  // column centroids
  std::vector<ColumnInputs> inputs;
  std::vector<IqColumn> columns;
  bool has_ke = false;
  bool has_tke = false;
  std::vector<double> eps_n_ke;   // per column, per unit mass; NaN when absent
  std::vector<double> eps_n_tke;  // per column; NaN when absent

  // Column values of one estimator; NaN where its budget is missing.
  std::vector<double> iq(EstimatorId id) const;
};

// Estimator inputs and outputs per column; writes estimate.csv (and .vtk).
EstimateResult stage_estimate(const RunConfig& config, const RunPaths& paths);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
  bool reused = false;
};

struct Histogram {
  static constexpr std::size_t kBins = 10;  // uniform bins over [0, 1]
  std::array<std::size_t, kBins> counts{};
  std::size_t missing = 0;
};
Histogram iq_histogram(const std::vector<double>& iq);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
  bool valid = false;
};

struct Report {
  std::string case_name;
  EstimatorId estimator;
  double fraction = 0.0;
  bool adapted = false;
  std::vector<StageTiming> stages;
  std::size_t leaves_before = 0;
  std::size_t leaves_after = 0;
  std::size_t flagged = 0;
  std::size_t closure = 0;
  std::size_t flagged_in_band = 0;
  std::size_t negative_ke_columns = 0;
  std::size_t invalid_ke_columns = 0;
  std::size_t rerun_steps = 0;
  std::array<Extrema, 3> k_num{};  // by method, base run
  Histogram before;
  Histogram after;
  bool has_ke = false;
  bool has_tke = false;

  double band_fraction() const {
    return flagged == 0 ? 0.0 : static_cast<double>(flagged_in_band) / static_cast<double>(flagged);
  }
};

// Geometric band of the plan check: y below band_y_max or within band_wall_distance of a wall.
bool in_band(const RunConfig& config, const Mesh& mesh, const Vec3& x);

struct CycleOptions {
  // Keep base-run artifacts already present in the output directory.
  bool reuse_base = false;
};

// run -> stats -> budget -> estimate -> flag -> refine -> rerun -> report.
Report adaptation_cycle(const RunConfig& config, const CycleOptions& options = {});

// Summary of the artifacts on disk; the adapted run is included when present.
Report build_report(const RunConfig& config);
// report.txt, report.csv and timings.txt in output.dir.
void write_report(const RunConfig& config, const Report& report);

}  // namespace minles
