#include "minles/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "minles/error.hpp"

namespace minles {

const char* to_string(CaseKind k) {
  switch (k) {
    case CaseKind::tgv2d: return "tgv2d";
    case CaseKind::tgv3d: return "tgv3d";
    case CaseKind::bump_channel: return "bump_channel";
    case CaseKind::custom_grid_file: return "custom_grid_file";
  }
  return "?";
}

const std::vector<std::pair<std::string, std::string>>& config_defaults() {
  static const std::vector<std::pair<std::string, std::string>> table{
      {"case.name", ""},
      {"case.seed", "1"},
      {"case.grid_file", ""},
      {"grid.nx", "32"},
      {"grid.ny", "32"},
      {"grid.nz", "1"},
      {"grid.x0", "auto"},
      {"grid.y0", "auto"},
      {"grid.z0", "auto"},
      {"grid.lx", "auto"},
      {"grid.ly", "auto"},
      {"grid.lz", "auto"},
      {"grid.mapping", "auto"},
      {"grid.bc_x", "auto"},
      {"grid.bc_y", "auto"},
      {"grid.bc_z", "auto"},
      {"grid.bump_height", "0.5"},
      {"grid.bump_center", "0"},
      {"grid.bump_half_width", "1.5"},
      {"grid.wall_stretch", "0"},
      {"flow.re", "100"},
      {"flow.u_ref", "1"},
      {"flow.l_ref", "1"},
      {"flow.rho", "1"},
      {"flow.sound_speed", "5"},
      {"flow.perturbation", "auto"},
      {"scheme.kappa2", "0"},
      {"scheme.kappa4", "0.015625"},
      {"scheme.cfl", "1.8"},
      {"scheme.dt", "0"},
      {"scheme.sgs", "auto"},
      {"scheme.c_w", "0.325"},
      {"scheme.damping_rate", "0"},
      {"scheme.forcing", "auto"},
      {"scheme.target_bulk", "auto"},
      {"scheme.relaxation", "1"},
      {"run.t_end", "1"},
      {"run.sample_interval", "0"},
      {"run.window_fraction", "0.25"},
      {"run.max_steps", "0"},
      {"estimate.c_nu", "0.094"},
      {"estimate.c_n", "1"},
      {"estimate.alpha_nu", "0.05"},
      {"estimate.n_nu", "0.53"},
      {"estimate.alpha_eta", "0.05"},
      {"estimate.m_eta", "0.5"},
      {"estimate.c_filter", "1"},
      {"estimate.k_floor", "1e-12"},
      {"estimate.den_floor", "1e-12"},
      {"estimate.laminar_correction", "off"},
      {"adapt.estimator", "iq_k_tke"},
      {"adapt.fraction", "0.05"},
      {"adapt.rerun_time", "0"},
      {"adapt.cycles", "1"},
      {"adapt.allow_multiple_cycles", "off"},
      {"adapt.band_y_max", "0.7"},
      {"adapt.band_wall_distance", "0.1"},
      {"output.dir", "out"},
      {"output.vtk", "on"},
  };
  return table;
}

namespace {

bool known_key(const std::string& key) {
  const auto& d = config_defaults();
  return std::any_of(d.begin(), d.end(), [&](const auto& kv) { return kv.first == key; });
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Reader {
 public:
  explicit Reader(const ConfigData& data) : data_(data) {}

  std::string raw(const std::string& key) const {
    const auto it = data_.values().find(key);
    if (it != data_.values().end()) return it->second;
    for (const auto& [k, v] : config_defaults()) {
      if (k == key) return v;
    }
    throw ConfigError("unknown key '" + key + "'");
  }
  bool is_auto(const std::string& key) const { return raw(key) == "auto"; }

  double number(const std::string& key) const {
    const std::string s = raw(key);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError("key '" + key + "' expects a number, got '" + s + "'");
    }
    return v;
  }
  long integer(const std::string& key) const {
    const std::string s = raw(key);
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw ConfigError("key '" + key + "' expects an integer, got '" + s + "'");
    }
    return v;
  }
  bool flag(const std::string& key) const {
    std::string s = raw(key);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "on" || s == "true" || s == "yes" || s == "1") return true;
    if (s == "off" || s == "false" || s == "no" || s == "0") return false;
    throw ConfigError("key '" + key + "' expects on/off, got '" + raw(key) + "'");
  }

 private:
  const ConfigData& data_;
};

Boundary parse_boundary(const std::string& key, const std::string& v) {
  if (v == "periodic") return Boundary::periodic;
  if (v == "wall") return Boundary::wall;
  if (v == "freestream") return Boundary::freestream;
  throw ConfigError("key '" + key + "' expects periodic|wall|freestream, got '" + v + "'");
}

const char* boundary_name(Boundary b) {
  switch (b) {
    case Boundary::periodic: return "periodic";
    case Boundary::wall: return "wall";
    case Boundary::freestream: return "freestream";
  }
  return "?";
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void ConfigData::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

ConfigData parse_ini(const std::string& text, const std::string& origin) {
  ConfigData data;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      require(line.back() == ']', where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty(), where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, where + ": expected key = value");
    require(!section.empty(), where + ": key outside of a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    require(known_key(key), where + ": unknown key '" + key + "'");
    require(!data.has(key), where + ": duplicate key '" + key + "'");
    data.set(key, value);
  }
  return data;
}

ConfigData load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_ini(ss.str(), path);
}

RunConfig resolve_config(const ConfigData& data) {
  const Reader r(data);
  RunConfig c;
  std::vector<std::pair<std::string, std::string>> echo;
  auto put = [&](const std::string& key, const std::string& v) { echo.emplace_back(key, v); };
  auto put_num = [&](const std::string& key, double v) { put(key, format_double(v)); };

  c.case_name = r.raw("case.name");
  require(!c.case_name.empty(), "missing required key 'case.name'");
  if (c.case_name == "tgv2d") c.kind = CaseKind::tgv2d;
  else if (c.case_name == "tgv3d") c.kind = CaseKind::tgv3d;
  else if (c.case_name == "bump_channel") c.kind = CaseKind::bump_channel;
  else if (c.case_name == "custom_grid_file") c.kind = CaseKind::custom_grid_file;
  else throw ConfigError("key 'case.name' has unknown case '" + c.case_name + "'");
  put("case.name", c.case_name);
  const long seed = r.integer("case.seed");
  require(seed >= 0, "key 'case.seed' must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  put("case.seed", std::to_string(c.seed));
  c.grid_file = r.raw("case.grid_file");
  require(c.kind != CaseKind::custom_grid_file || !c.grid_file.empty(),
          "missing required key 'case.grid_file' for case custom_grid_file");
  put("case.grid_file", c.grid_file);

  const bool bump = c.kind == CaseKind::bump_channel;
  const double two_pi = 2.0 * std::numbers::pi;
  const char* axes[3] = {"x", "y", "z"};
  const long dims[3] = {r.integer("grid.nx"), r.integer("grid.ny"), r.integer("grid.nz")};
  for (int a = 0; a < 3; ++a) {
    require(dims[a] >= 1 && dims[a] <= 4096, std::string("key 'grid.n") + axes[a] + "' out of range");
    c.grid.dims[a] = static_cast<int>(dims[a]);
    put(std::string("grid.n") + axes[a], std::to_string(dims[a]));
  }
  if (c.kind == CaseKind::tgv2d) require(dims[2] == 1, "case tgv2d needs grid.nz = 1");
  if (c.kind == CaseKind::tgv3d) require(dims[2] >= 2, "case tgv3d needs grid.nz >= 2");

  const double default_len[3] = {bump ? 6.0 : two_pi, bump ? 2.0 : two_pi,
                                 bump ? 1.5 : (c.kind == CaseKind::tgv2d ? 1.0 : two_pi)};
  Vec3 len;
  for (int a = 0; a < 3; ++a) {
    const std::string key = std::string("grid.l") + axes[a];
    len[a] = r.is_auto(key) ? default_len[a] : r.number(key);
    require(len[a] > 0.0, "key '" + key + "' must be positive");
  }
  for (int a = 0; a < 3; ++a) {
    const std::string key = std::string("grid.") + axes[a] + "0";
    c.grid.lo[a] = r.is_auto(key) ? (bump && a == 0 ? -0.5 * len.x : 0.0) : r.number(key);
    put_num(key, c.grid.lo[a]);
  }
  for (int a = 0; a < 3; ++a) put_num(std::string("grid.l") + axes[a], len[a]);
  c.grid.hi = c.grid.lo + len;

  const std::string mapping = r.is_auto("grid.mapping") ? (bump ? "bump_channel" : "cartesian") : r.raw("grid.mapping");
  if (mapping == "cartesian") c.grid.mapping = Mapping::cartesian;
  else if (mapping == "bump_channel") c.grid.mapping = Mapping::bump_channel;
  else throw ConfigError("key 'grid.mapping' expects cartesian|bump_channel, got '" + mapping + "'");
  put("grid.mapping", mapping);
  for (int a = 0; a < 3; ++a) {
    const std::string key = std::string("grid.bc_") + axes[a];
    const Boundary def = (bump && a == 1) ? Boundary::wall : Boundary::periodic;
    c.grid.boundary[a] = r.is_auto(key) ? def : parse_boundary(key, r.raw(key));
    put(key, boundary_name(c.grid.boundary[a]));
  }
  c.grid.bump.height = r.number("grid.bump_height");
  c.grid.bump.center = r.number("grid.bump_center");
  c.grid.bump.half_width = r.number("grid.bump_half_width");
  c.grid.wall_stretch = r.number("grid.wall_stretch");
  put_num("grid.bump_height", c.grid.bump.height);
  put_num("grid.bump_center", c.grid.bump.center);
  put_num("grid.bump_half_width", c.grid.bump.half_width);
  put_num("grid.wall_stretch", c.grid.wall_stretch);

  c.re = r.number("flow.re");
  require(c.re > 0.0, "key 'flow.re' must be positive");
  c.u_ref = r.number("flow.u_ref");
  c.l_ref = r.number("flow.l_ref");
  require(c.u_ref > 0.0 && c.l_ref > 0.0, "flow.u_ref and flow.l_ref must be positive");
  c.fluid.rho = r.number("flow.rho");
  require(c.fluid.rho > 0.0, "key 'flow.rho' must be positive");
  c.fluid.sound_speed = r.number("flow.sound_speed");
  require(c.fluid.sound_speed > 0.0, "key 'flow.sound_speed' must be positive");
  c.fluid.nu = c.u_ref * c.l_ref / c.re;
  c.perturbation = r.is_auto("flow.perturbation") ? (bump ? 0.1 : 0.0) : r.number("flow.perturbation");
  require(c.perturbation >= 0.0, "key 'flow.perturbation' must be non-negative");
  put_num("flow.re", c.re);
  put_num("flow.u_ref", c.u_ref);
  put_num("flow.l_ref", c.l_ref);
  put_num("flow.rho", c.fluid.rho);
  put_num("flow.sound_speed", c.fluid.sound_speed);
  put_num("flow.perturbation", c.perturbation);

  c.scheme.jst.kappa2 = r.number("scheme.kappa2");
  c.scheme.jst.kappa4 = r.number("scheme.kappa4");
  require(c.scheme.jst.kappa2 >= 0.0 && c.scheme.jst.kappa4 >= 0.0, "JST coefficients must be non-negative");
  c.scheme.cfl = r.number("scheme.cfl");
  require(c.scheme.cfl > 0.0, "key 'scheme.cfl' must be positive");
  c.dt = r.number("scheme.dt");
  require(c.dt >= 0.0, "key 'scheme.dt' must be non-negative");
  const std::string sgs = r.is_auto("scheme.sgs") ? (c.kind == CaseKind::tgv2d ? "none" : "wale") : r.raw("scheme.sgs");
  if (sgs == "none") c.scheme.sgs = SgsModel::none;
  else if (sgs == "wale") c.scheme.sgs = SgsModel::wale;
  else throw ConfigError("key 'scheme.sgs' expects none|wale, got '" + sgs + "'");
  c.scheme.c_w = r.number("scheme.c_w");
  c.scheme.damping_rate = r.number("scheme.damping_rate");
  c.scheme.forcing.enabled = r.is_auto("scheme.forcing") ? bump : r.flag("scheme.forcing");
  c.scheme.forcing.target_bulk = r.is_auto("scheme.target_bulk") ? c.u_ref : r.number("scheme.target_bulk");
  c.scheme.forcing.relaxation = r.number("scheme.relaxation");
  put_num("scheme.kappa2", c.scheme.jst.kappa2);
  put_num("scheme.kappa4", c.scheme.jst.kappa4);
  put_num("scheme.cfl", c.scheme.cfl);
  put_num("scheme.dt", c.dt);
  put("scheme.sgs", sgs);
  put_num("scheme.c_w", c.scheme.c_w);
  put_num("scheme.damping_rate", c.scheme.damping_rate);
  put("scheme.forcing", c.scheme.forcing.enabled ? "on" : "off");
  put_num("scheme.target_bulk", c.scheme.forcing.target_bulk);
  put_num("scheme.relaxation", c.scheme.forcing.relaxation);
  if (c.scheme.forcing.enabled) {
    require(c.grid.boundary[0] == Boundary::periodic, "forcing needs a periodic x direction");
  }
  c.fluid.u_inf = Vec3{c.u_ref, 0.0, 0.0};
  c.fluid.e_inf = 0.5 * c.u_ref * c.u_ref + 1.0;

  c.t_end = r.number("run.t_end");
  require(c.t_end > 0.0, "key 'run.t_end' must be positive");
  c.sample_interval = r.number("run.sample_interval");
  require(c.sample_interval >= 0.0, "key 'run.sample_interval' must be non-negative");
  c.window_fraction = r.number("run.window_fraction");
  require(c.window_fraction > 0.0 && c.window_fraction <= 1.0, "key 'run.window_fraction' must lie in (0, 1]");
  c.max_steps = r.integer("run.max_steps");
  require(c.max_steps >= 0, "key 'run.max_steps' must be non-negative");
  put_num("run.t_end", c.t_end);
  put_num("run.sample_interval", c.sample_interval);
  put_num("run.window_fraction", c.window_fraction);
  put("run.max_steps", std::to_string(c.max_steps));

  EstimatorConstants& e = c.estimator_constants;
  e.c_nu = r.number("estimate.c_nu");
  e.c_n = r.number("estimate.c_n");
  e.alpha_nu = r.number("estimate.alpha_nu");
  e.n_nu = r.number("estimate.n_nu");
  e.alpha_eta = r.number("estimate.alpha_eta");
  e.m_eta = r.number("estimate.m_eta");
  e.c_filter = r.number("estimate.c_filter");
  e.k_floor = r.number("estimate.k_floor");
  e.den_floor = r.number("estimate.den_floor");
  e.laminar_correction = r.flag("estimate.laminar_correction");
  require(e.c_nu > 0.0, "key 'estimate.c_nu' must be positive");
  require(e.c_filter >= 1.0, "key 'estimate.c_filter' must be >= 1");
  put_num("estimate.c_nu", e.c_nu);
  put_num("estimate.c_n", e.c_n);
  put_num("estimate.alpha_nu", e.alpha_nu);
  put_num("estimate.n_nu", e.n_nu);
  put_num("estimate.alpha_eta", e.alpha_eta);
  put_num("estimate.m_eta", e.m_eta);
  put_num("estimate.c_filter", e.c_filter);
  put_num("estimate.k_floor", e.k_floor);
  put_num("estimate.den_floor", e.den_floor);
  put("estimate.laminar_correction", e.laminar_correction ? "on" : "off");

  const auto est = EstimatorId::parse(r.raw("adapt.estimator"));
  require(est.has_value(), "key 'adapt.estimator' has unknown estimator '" + r.raw("adapt.estimator") + "'");
  c.estimator = *est;
  c.fraction = r.number("adapt.fraction");
  require(c.fraction > 0.0 && c.fraction <= 1.0, "key 'adapt.fraction' must lie in (0, 1]");
  c.rerun_time = r.number("adapt.rerun_time");
  require(c.rerun_time >= 0.0, "key 'adapt.rerun_time' must be non-negative");
  c.cycles = static_cast<int>(r.integer("adapt.cycles"));
  c.allow_multiple_cycles = r.flag("adapt.allow_multiple_cycles");
  require(c.cycles >= 1, "key 'adapt.cycles' must be >= 1");
  require(c.cycles == 1 || c.allow_multiple_cycles, "key 'adapt.cycles' > 1 needs adapt.allow_multiple_cycles = on");
  c.band_y_max = r.number("adapt.band_y_max");
  c.band_wall_distance = r.number("adapt.band_wall_distance");
  put("adapt.estimator", c.estimator.name());
  put_num("adapt.fraction", c.fraction);
  put_num("adapt.rerun_time", c.rerun_time);
  put("adapt.cycles", std::to_string(c.cycles));
  put("adapt.allow_multiple_cycles", c.allow_multiple_cycles ? "on" : "off");
  put_num("adapt.band_y_max", c.band_y_max);
  put_num("adapt.band_wall_distance", c.band_wall_distance);

  c.out_dir = r.raw("output.dir");
  require(!c.out_dir.empty(), "key 'output.dir' must not be empty");
  c.vtk = r.flag("output.vtk");
  put("output.dir", c.out_dir);
  put("output.vtk", c.vtk ? "on" : "off");

  c.resolved = std::move(echo);
  return c;
}

RunConfig parse_config(const std::string& path) { return resolve_config(load_config_file(path)); }

std::string render_resolved(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& [key, value] : config.resolved) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << "\n";
      out << "[" << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace minles
