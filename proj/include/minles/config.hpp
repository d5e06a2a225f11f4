#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "minles/estimators.hpp"
#include "minles/mesh.hpp"
#include "minles/solver.hpp"

namespace minles {

enum class CaseKind { tgv2d, tgv3d, bump_channel, custom_grid_file };
const char* to_string(CaseKind k);

// Raw "section.key" -> value pairs as written by the user; only known keys are accepted.
class ConfigData {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

ConfigData parse_ini(const std::string& text, const std::string& origin = "<string>");
ConfigData load_config_file(const std::string& path);

struct RunConfig {
  CaseKind kind = CaseKind::tgv2d;
  std::string case_name;
  std::uint64_t seed = 1;
  std::string grid_file;

  GridConfig grid;
  FluidProps fluid;
  double re = 100.0;
  double u_ref = 1.0;
  double l_ref = 1.0;
  double perturbation = 0.0;

  SchemeParams scheme;
  double dt = 0.0;  // finest-level step; 0 derives it from cfl

  double t_end = 1.0;
  double sample_interval = 0.0;
  double window_fraction = 0.25;
  long max_steps = 0;

  EstimatorConstants estimator_constants;
  EstimatorId estimator;
  double fraction = 0.05;
  double rerun_time = 0.0;
  int cycles = 1;
  bool allow_multiple_cycles = false;
  double band_y_max = 0.7;
  double band_wall_distance = 0.1;

  std::string out_dir = "out";
  bool vtk = true;

  // Every key with its resolved value, in documentation order.
  std::vector<std::pair<std::string, std::string>> resolved;
};

RunConfig resolve_config(const ConfigData& data);
RunConfig parse_config(const std::string& path);
std::string render_resolved(const RunConfig& config);

// Documented keys and defaults, in order; "auto" means derived from the case.
const std::vector<std::pair<std::string, std::string>>& config_defaults();

}  // namespace minles
