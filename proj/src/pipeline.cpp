#include "minles/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "minles/adapt.hpp"
#include "minles/cases.hpp"
#include "minles/error.hpp"
#include "minles/io.hpp"
#include "minles/solver.hpp"

namespace minles {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kRunInfoVersion = 1;

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void remove_snapshots(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".bin") fs::remove(entry.path(), ec);
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Re-throws a library error with the failing stage named in the message.
template <class F>
auto tagged(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + stage + "] " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::internal, std::string("[") + stage + "] " + e.what());
  }
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::vector<double> leaf_values(const Mesh& mesh, auto&& at) {
  std::vector<double> out;
  out.reserve(mesh.leaf_count());
  for (CellId leaf : mesh.leaves()) out.push_back(at(leaf));
  return out;
}

StatsSample make_sample(const Solver& solver, const FlowState& state, std::vector<Mat3>& grad) {
  const Mesh& mesh = solver.mesh();
  solver.velocity_gradients(state, grad);
  StatsSample s;
  s.time = state.time;
  s.u.reserve(mesh.leaf_count());
  for (CellId leaf : mesh.leaves()) {
    const auto i = static_cast<std::size_t>(leaf);
    s.u.push_back(state.u[i]);
    s.p.push_back(state.p[i]);
    s.nu_t.push_back(state.nu_t[i]);
    s.tau_grad.push_back(tau_grad(grad[i]));
  }
  return s;
}

bool budget_matches(const BudgetMeans& b, std::size_t leaves, const RunSummary& run) {
  const auto sized = [&](const auto& terms) {
    return std::all_of(terms.begin(), terms.end(), [&](const auto& t) { return t.size() == leaves; });
  };
  const double tol = 1e-9 * std::max(1.0, std::abs(run.t_end));
  const bool window = std::abs(b.t_end - b.t_start - (run.t_end - run.t_start - 2.0 * run.dt_root *
                                                           static_cast<double>(run.sample_stride))) <= tol;
  return window && (b.ke_samples == 0 || sized(b.ke)) && (b.tke_samples == 0 || sized(b.tke));
}

std::string histogram_row(const Histogram& h) {
  std::string s;
  for (std::size_t b = 0; b < Histogram::kBins; ++b) {
    if (b) s += ' ';
    s += std::to_string(h.counts[b]);
  }
  if (h.missing) s += " (missing " + std::to_string(h.missing) + ")";
  return s;
}

}  // namespace

std::string RunPaths::snapshot(std::size_t k) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "/snap_%06zu.bin", k);
  return dir + buf;
}

RunPaths base_paths(const RunConfig& config) { return {config.out_dir + "/base"}; }

RunPaths adapted_paths(const RunConfig& config, EstimatorId estimator) {
  return {config.out_dir + "/adapted_" + estimator.name()};
}

RunSummary run_simulation(const RunConfig& config, const Mesh& mesh, FlowState state, double duration,
                          const RunPaths& paths) {
  if (!(duration > 0.0)) throw ConfigError("run duration must be positive");
  make_dir(paths.dir);
  remove_snapshots(paths.dir);
  write_grid(paths.grid(), mesh);

  Solver solver(mesh, config.fluid, config.scheme);
  solver.refresh_derived(state);
  const int lmax = mesh.max_level();

  RunSummary sum;
  const double dt_finest = config.dt > 0.0 ? config.dt : solver.stable_dt(state);
  const double steps_real = std::ceil(duration / std::ldexp(dt_finest, lmax) - 1e-9);
  sum.steps = static_cast<std::size_t>(std::max(1.0, steps_real));
  if (config.max_steps > 0 && sum.steps > static_cast<std::size_t>(config.max_steps)) {
    throw ConfigError("run needs " + std::to_string(sum.steps) + " steps, above run.max_steps = " +
                      std::to_string(config.max_steps));
  }
  sum.dt_root = duration / static_cast<double>(sum.steps);
  sum.dt_finest = std::ldexp(sum.dt_root, -lmax);
  sum.leaves = mesh.leaf_count();
  sum.sample_stride = config.sample_interval > 0.0
                          ? static_cast<std::size_t>(std::max(1LL, std::llround(config.sample_interval / sum.dt_root)))
                          : 1;
  const auto window =
      static_cast<std::size_t>(std::floor(config.window_fraction * static_cast<double>(sum.steps) + 1e-9));
  const std::size_t first = sum.steps - std::min(window, sum.steps);

  Integrator integrator(solver);
  RunningStats stats(mesh.leaf_count());
  std::vector<Mat3> grad;
  std::vector<double> times;
  const ForcingParams& forcing = config.scheme.forcing;
  const double t0 = state.time;
  for (std::size_t step = 0;; ++step) {
    if (step >= first && (step - first) % sum.sample_stride == 0) {
      stats.accumulate(make_sample(solver, state, grad));
      SnapshotMeta meta;
      meta.step = step;
      if (forcing.enabled) {
        meta.body_force = forcing_term(solver.bulk_velocity(state, forcing.axis), forcing.target_bulk, sum.dt_root,
                                       forcing.relaxation);
      }
      write_snapshot(paths.snapshot(sum.snapshots++), mesh, state, meta);
      times.push_back(state.time);
    }
    if (step == sum.steps) break;
    integrator.advance(state, sum.dt_finest);
    state.time = t0 + sum.dt_root * static_cast<double>(step + 1);
  }
  sum.t_start = times.front();
  sum.t_end = times.back();

  write_snapshot(paths.final_state(), mesh, state, {sum.steps, 0.0});
  write_stats(paths.stats(), stats);

  nlohmann::ordered_json j;
  j["format"] = "minles-run";
  j["version"] = kRunInfoVersion;
  j["steps"] = sum.steps;
  j["dt_finest"] = sum.dt_finest;
  j["dt_root"] = sum.dt_root;
  j["sample_stride"] = sum.sample_stride;
  j["snapshots"] = sum.snapshots;
  j["leaves"] = sum.leaves;
  j["t_start"] = sum.t_start;
  j["t_end"] = sum.t_end;
  j["times"] = times;
  write_text(paths.run_info(), j.dump(1) + "\n");
  return sum;
}

RunSummary stage_run(const RunConfig& config) {
  make_dir(config.out_dir);
  write_text(config.out_dir + "/resolved_config.ini", render_resolved(config));
  const Mesh mesh = build_case_mesh(config);
  return run_simulation(config, mesh, initial_state(config, mesh), config.t_end, base_paths(config));
}

RunSummary read_run_summary(const RunPaths& paths) {
  std::ifstream in(paths.run_info());
  if (!in) throw IoError("cannot open '" + paths.run_info() + "' (run stage missing?)");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + paths.run_info() + "' is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != "minles-run" || j.value("version", -1) != kRunInfoVersion) {
    throw IoError("'" + paths.run_info() + "' has an unsupported format or version");
  }
  RunSummary s;
  try {
    s.steps = j.at("steps").get<std::size_t>();
    s.dt_finest = j.at("dt_finest").get<double>();
    s.dt_root = j.at("dt_root").get<double>();
    s.sample_stride = j.at("sample_stride").get<std::size_t>();
    s.snapshots = j.at("snapshots").get<std::size_t>();
    s.leaves = j.at("leaves").get<std::size_t>();
    s.t_start = j.at("t_start").get<double>();
    s.t_end = j.at("t_end").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + paths.run_info() + "': " + e.what());
  }
  return s;
}

BudgetMode parse_budget_mode(const std::string& text) {
  if (text == "ke") return BudgetMode::ke;
  if (text == "tke") return BudgetMode::tke;
  if (text == "both") return BudgetMode::both;
  throw ConfigError("unknown budget mode '" + text + "' (expected ke, tke or both)");
}

BudgetMeans stage_budget(const RunConfig& config, const RunPaths& paths, BudgetMode mode) {
  const Mesh mesh = read_grid(paths.grid());
  const RunSummary run = read_run_summary(paths);
  if (run.snapshots < 3) {
    throw BudgetError("budget needs at least three snapshots, the run stored " + std::to_string(run.snapshots));
  }
  const bool do_ke = mode != BudgetMode::tke;
  const bool do_tke = mode != BudgetMode::ke;

  // Keep the other family from an earlier pass over the same run.
  BudgetMeans means;
  if (fs::exists(paths.budget())) {
    BudgetMeans old = read_budget(paths.budget());
    if (budget_matches(old, mesh.leaf_count(), run)) means = std::move(old);
  }
  if (do_ke) {
    means.ke_samples = 0;
    for (auto& t : means.ke) t.clear();
  }
  if (do_tke) {
    means.tke_samples = 0;
    for (auto& t : means.tke) t.clear();
  }

  RunningStats stats;
  if (do_tke) stats = read_stats(paths.stats());
  Solver solver(mesh, config.fluid, config.scheme);

  std::array<FlowState, 3> win;
  std::array<SnapshotMeta, 3> meta;
  win[0] = read_snapshot(paths.snapshot(0), mesh, &meta[0]);
  win[1] = read_snapshot(paths.snapshot(1), mesh, &meta[1]);
  means.t_start = win[1].time;
  for (std::size_t k = 2; k < run.snapshots; ++k) {
    win[2] = read_snapshot(paths.snapshot(k), mesh, &meta[2]);
    if (do_ke) {
      KeBudget b = ke_budget(solver, win[0], win[1], win[2], meta[1].body_force);
      means.add(b);
    }
    if (do_tke) {
      TkeBudget b = tke_budget(solver, win[0], win[1], win[2], stats);
      means.add(b);
    }
    means.t_end = win[1].time;
    std::swap(win[0], win[1]);
    std::swap(win[1], win[2]);
    std::swap(meta[0], meta[1]);
    std::swap(meta[1], meta[2]);
  }
  write_budget(paths.budget(), means);

  // Column profiles of every available term, and the leaf fields for inspection.
  std::vector<std::string> header{"x", "y"};
  std::vector<std::vector<double>> cols{spanwise_average(mesh, leaf_values(mesh, [&](CellId c) {
                                          return mesh[c].centroid.x;
                                        })),
                                        spanwise_average(mesh, leaf_values(mesh, [&](CellId c) {
                                          return mesh[c].centroid.y;
                                        }))};
  std::vector<NamedField> fields;
  if (means.ke_samples > 0) {
    for (std::size_t t = 0; t < KeBudget::kTerms; ++t) {
      header.push_back("ke_" + std::string(KeBudget::kNames[t]));
      cols.push_back(spanwise_average(mesh, means.ke[t]));
      fields.push_back({header.back(), means.ke[t]});
    }
  }
  if (means.tke_samples > 0) {
    for (std::size_t t = 0; t < TkeBudget::kTerms; ++t) {
      header.push_back("tke_" + std::string(TkeBudget::kNames[t]));
      cols.push_back(spanwise_average(mesh, means.tke[t]));
      fields.push_back({header.back(), means.tke[t]});
    }
  }
  std::vector<std::vector<double>> rows(cols.front().size(), std::vector<double>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) rows[r][c] = cols[c][r];
  write_csv(paths.dir + "/budget.csv", header, rows);
  if (config.vtk) export_vtk(paths.dir + "/budget.vtk", mesh, fields);
  return means;
}

std::vector<double> EstimateResult::iq(EstimatorId id) const {
  std::vector<double> out;
  out.reserve(columns.size());
  for (const IqColumn& c : columns) {
    out.push_back(c.iq[static_cast<std::size_t>(id.family)][static_cast<std::size_t>(id.method)]);
  }
  return out;
}

EstimateResult stage_estimate(const RunConfig& config, const RunPaths& paths) {
  const Mesh mesh = read_grid(paths.grid());
  const RunningStats stats = read_stats(paths.stats());
  if (stats.cells() != mesh.leaf_count()) throw StatsError("statistics do not match the grid in " + paths.dir);
  BudgetMeans means;
  if (fs::exists(paths.budget())) means = read_budget(paths.budget());
  const EstimatorConstants& k = config.estimator_constants;
  const double rho = config.fluid.rho;

  EstimateResult r;
  const std::size_t n = mesh.leaf_count();
  r.has_ke = means.ke_samples > 0 && means.ke.back().size() == n;
  r.has_tke = means.tke_samples > 0 && means.tke.back().size() == n;

  r.x = spanwise_average(mesh, leaf_values(mesh, [&](CellId c) { return mesh[c].centroid.x; }));
  r.y = spanwise_average(mesh, leaf_values(mesh, [&](CellId c) { return mesh[c].centroid.y; }));
  const auto h = spanwise_average(mesh, leaf_values(mesh, [&](CellId c) { return std::cbrt(mesh[c].volume); }));
  const auto vol = spanwise_average(mesh, leaf_values(mesh, [&](CellId c) { return mesh[c].volume; }));
  const auto nu_sgs = spanwise_average(mesh, stats.mean_nu_t);
  const auto k_res = spanwise_average(mesh, stats.resolved_tke());

  // 2 S:S of the mean velocity with the solver's gradient and ghost treatment.
  const FaceTable table(mesh);
  std::vector<Vec3> mean_u(mesh.size());
  for (std::size_t q = 0; q < n; ++q) mean_u[static_cast<std::size_t>(mesh.leaves()[q])] = stats.mean_u[q];
  restrict_to_parents(mesh, table, mean_u);
  std::vector<Mat3> grad;
  gradient_field(mesh, table, mean_u, solver_ghost_rules(config.fluid).u, mesh.leaves(), grad);
  const auto strain2 = spanwise_average(mesh, leaf_values(mesh, [&](CellId c) {
                                          const Mat3& g = grad[static_cast<std::size_t>(c)];
                                          const Mat3 s = (g + g.transposed()) * 0.5;
                                          return 2.0 * ddot(s, s);
                                        }));
  const StrainDenominator den = strain_dissipation_denominator(stats, mesh, k.den_floor);
  const std::vector<double> zeros(mesh.column_count(), 0.0);
  const std::vector<double> eps_ke =
      r.has_ke ? spanwise_average(mesh, means.ke[KeBudget::kTerms - 1]) : zeros;
  const std::vector<double> eps_tke =
      r.has_tke ? mean_dissipation_from_mean(mesh, means.tke[TkeBudget::kTerms - 1]).eps_bar : zeros;

  const std::size_t ncol = static_cast<std::size_t>(mesh.column_count());
  r.inputs.resize(ncol);
  r.eps_n_ke.assign(ncol, kNaN);
  r.eps_n_tke.assign(ncol, kNaN);
  for (std::size_t c = 0; c < ncol; ++c) {
    ColumnInputs& in = r.inputs[c];
    in.h = h[c];
    in.volume = vol[c];
    in.nu_sgs = nu_sgs[c];
    in.k_res = k_res[c];
    in.strain2 = strain2[c];
    in.eps_ke = eps_ke[c] / rho;
    in.eps_tke_pos = std::max(eps_tke[c], 0.0);
    in.denominator = den.value[c];
    in.denominator_flagged = den.flagged[c];
    if (r.has_ke) r.eps_n_ke[c] = in.eps_ke;
    if (r.has_tke) r.eps_n_tke[c] = eps_tke[c];
  }
  r.columns = estimate_columns(r.inputs, config.fluid.nu, k);
  for (IqColumn& col : r.columns) {
    for (Method m : {Method::ke, Method::tke}) {
      if ((m == Method::ke && r.has_ke) || (m == Method::tke && r.has_tke)) continue;
      const auto mi = static_cast<std::size_t>(m);
      col.k_num[mi] = col.nu_num[mi] = col.nu_eff[mi] = kNaN;
      for (auto& fam : col.iq) fam[mi] = kNaN;
    }
  }

  std::vector<std::string> header{"x", "y", "h", "k_res", "nu_sgs", "strain2", "denominator", "eps_n_ke",
                                  "eps_n_tke", "k_sgs"};
  for (Method m : {Method::emp, Method::ke, Method::tke}) header.push_back(std::string("k_num_") + to_string(m));
  for (Family f : {Family::nu, Family::eta, Family::k})
    for (Method m : {Method::emp, Method::ke, Method::tke}) header.push_back(EstimatorId{f, m}.name());
  header.push_back("ke_invalid");
  std::vector<std::vector<double>> rows;
  rows.reserve(ncol);
  for (std::size_t c = 0; c < ncol; ++c) {
    const ColumnInputs& in = r.inputs[c];
    const IqColumn& col = r.columns[c];
    std::vector<double> row{r.x[c],         r.y[c],          in.h,           in.k_res,
                            in.nu_sgs,      in.strain2,      in.denominator, r.eps_n_ke[c],
                            r.eps_n_tke[c], col.k_sgs};
    for (double v : col.k_num) row.push_back(v);
    for (const auto& fam : col.iq)
      for (double v : fam) row.push_back(v);
    row.push_back(col.ke_invalid ? 1.0 : 0.0);
    rows.push_back(std::move(row));
  }
  write_csv(paths.dir + "/estimate.csv", header, rows);
  if (config.vtk) {
    std::vector<NamedField> fields;
    for (std::size_t q = 2; q < header.size(); ++q) {
      std::vector<double> v(ncol);
      for (std::size_t c = 0; c < ncol; ++c) v[c] = rows[c][q];
      fields.push_back({header[q], std::move(v)});
    }
    export_vtk(paths.dir + "/estimate.vtk", mesh, fields);
  }
  return r;
}

Histogram iq_histogram(const std::vector<double>& iq) {
  Histogram h;
  for (double v : iq) {
    if (!std::isfinite(v)) {
      ++h.missing;
      continue;
    }
    const double c = std::clamp(v, 0.0, 1.0);
    const auto b = std::min(static_cast<std::size_t>(c * Histogram::kBins), Histogram::kBins - 1);
    ++h.counts[b];
  }
  return h;
}

bool in_band(const RunConfig& config, const Mesh& mesh, const Vec3& x) {
  if (x.y < config.band_y_max) return true;
  const BaseGrid& base = mesh.base();
  if (base.boundary[1] == Boundary::periodic) return false;
  const double lower = base.lo.y + base.bump_height_at(x.x);
  const double wall = std::min(x.y - lower, base.hi.y - x.y);
  return wall < config.band_wall_distance;
}

namespace {

void fill_base_summary(Report& rep, const EstimateResult& est, EstimatorId id) {
  rep.has_ke = est.has_ke;
  rep.has_tke = est.has_tke;
  for (std::size_t m = 0; m < 3; ++m) {
    Extrema e;
    for (const IqColumn& c : est.columns) {
      const double v = c.k_num[m];
      if (!std::isfinite(v)) continue;
      if (!e.valid) e = {v, v, true};
      e.min = std::min(e.min, v);
      e.max = std::max(e.max, v);
    }
    rep.k_num[m] = e;
  }
  rep.negative_ke_columns = 0;
  rep.invalid_ke_columns = 0;
  if (est.has_ke) {
    for (std::size_t c = 0; c < est.columns.size(); ++c) {
      if (est.eps_n_ke[c] < 0.0) ++rep.negative_ke_columns;
      if (est.columns[c].ke_invalid) ++rep.invalid_ke_columns;
    }
  }
  rep.before = iq_histogram(est.iq(id));
}

bool base_complete(const RunPaths& p) {
  for (const std::string& f : {p.grid(), p.final_state(), p.stats(), p.run_info(), p.budget()}) {
    if (!fs::exists(f)) return false;
  }
  const BudgetMeans b = read_budget(p.budget());
  return b.ke_samples > 0 && b.tke_samples > 0;
}

void write_report_csv(const std::string& path, const EstimateResult& est) {
  std::vector<std::vector<double>> rows;
  const std::vector<double> iq = est.iq({Family::k, Method::tke});
  for (std::size_t c = 0; c < est.columns.size(); ++c) {
    rows.push_back({est.x[c], est.y[c], est.eps_n_ke[c], est.eps_n_tke[c], iq[c]});
  }
  write_csv(path, {"x", "y", "eps_n_ke", "eps_n_tke", "iq_k_tke"}, rows);
}

}  // namespace

Report adaptation_cycle(const RunConfig& config, const CycleOptions& options) {
  Report rep;
  rep.case_name = config.case_name;
  rep.estimator = config.estimator;
  rep.fraction = config.fraction;
  rep.adapted = true;
  const RunPaths base = base_paths(config);
  make_dir(config.out_dir);
  write_text(config.out_dir + "/resolved_config.ini", render_resolved(config));

  const bool reuse = options.reuse_base && tagged("run", [&] { return base_complete(base); });
  const auto timed = [&](const char* stage, auto&& body) {
    Stopwatch sw;
    tagged(stage, body);
    rep.stages.push_back({stage, sw.seconds(), false});
  };
  if (reuse) {
    for (const char* s : {"run", "stats", "budget"}) rep.stages.push_back({s, 0.0, true});
  } else {
    timed("run", [&] { stage_run(config); });
    timed("stats", [&] {
      const RunningStats s = read_stats(base.stats());
      if (s.n_samples < 3) throw StatsError("the statistics window holds fewer than three samples");
      (void)s.resolved_tke();
    });
    timed("budget", [&] { stage_budget(config, base, BudgetMode::both); });
  }

  EstimateResult est;
  timed("estimate", [&] { est = stage_estimate(config, base); });
  fill_base_summary(rep, est, config.estimator);

  RunPaths current = base;
  Mesh mesh;
  AdaptPlan plan;
  for (int cycle = 0; cycle < config.cycles; ++cycle) {
    if (cycle > 0) timed("estimate", [&] { est = stage_estimate(config, current); });
    timed("flag", [&] {
      mesh = read_grid(current.grid());
      const std::vector<double> iq_col = est.iq(config.estimator);
      if (std::any_of(iq_col.begin(), iq_col.end(), [](double v) { return !std::isfinite(v); })) {
        throw BudgetError("estimator " + config.estimator.name() + " needs a budget that is missing");
      }
      plan = flag_worst(mesh, broadcast_columns(mesh, iq_col), config.fraction, config.estimator);
    });
    AdaptedGrid adapted;
    RunPaths next = adapted_paths(config, config.estimator);
    if (cycle > 0) next.dir += "_" + std::to_string(cycle + 1);
    timed("refine", [&] {
      const FlowState state = read_snapshot(current.final_state(), mesh);
      adapted = apply_plan(plan, mesh, state);
      make_dir(next.dir);
      write_plan(next.dir + "/plan.json", plan, &adapted.delta);
    });
    if (cycle == 0) {
      rep.leaves_before = plan.leaf_count;
      rep.flagged = plan.flagged.size();
      rep.flagged_in_band = static_cast<std::size_t>(std::count_if(
          plan.flagged.begin(), plan.flagged.end(), [&](CellId c) { return in_band(config, mesh, mesh[c].centroid); }));
    }
    rep.closure += adapted.delta.closure.size();
    rep.leaves_after = adapted.delta.leaves_after;
    timed("rerun", [&] {
      const double duration = config.rerun_time > 0.0 ? config.rerun_time : config.t_end;
      const RunSummary s = run_simulation(config, adapted.mesh, adapted.state, duration, next);
      rep.rerun_steps = s.steps;
      stage_budget(config, next, BudgetMode::both);
      est = stage_estimate(config, next);
    });
    current = next;
  }
  rep.after = iq_histogram(est.iq(config.estimator));

  timed("report", [&] {
    write_report_csv(config.out_dir + "/report.csv", stage_estimate(config, base));
    write_report(config, rep);
  });
  // The report stage timing is only known now; rewrite the timing table.
  write_report(config, rep);
  return rep;
}

Report build_report(const RunConfig& config) {
  Report rep;
  rep.case_name = config.case_name;
  rep.estimator = config.estimator;
  rep.fraction = config.fraction;
  const RunPaths base = base_paths(config);
  const EstimateResult est = tagged("report", [&] { return stage_estimate(config, base); });
  fill_base_summary(rep, est, config.estimator);
  rep.leaves_before = est.columns.empty() ? 0 : read_run_summary(base).leaves;
  tagged("report", [&] { write_report_csv(config.out_dir + "/report.csv", est); });

  const RunPaths adapted = adapted_paths(config, config.estimator);
  if (fs::exists(adapted.dir + "/plan.json") && fs::exists(adapted.stats())) {
    tagged("report", [&] {
      const AdaptPlan plan = read_plan(adapted.dir + "/plan.json");
      const Mesh mesh = read_grid(base.grid());
      const Mesh fine = read_grid(adapted.grid());
      rep.adapted = true;
      rep.flagged = plan.flagged.size();
      rep.leaves_after = fine.leaf_count();
      rep.closure = 0;
      rep.flagged_in_band = 0;
      for (CellId c : plan.flagged) {
        if (c < 0 || static_cast<std::size_t>(c) >= mesh.size()) throw IoError("plan does not match the base grid");
        if (in_band(config, mesh, mesh[c].centroid)) ++rep.flagged_in_band;
      }
      std::ifstream in(adapted.dir + "/plan.json");
      const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
      if (!j.is_discarded() && j.contains("closure")) rep.closure = j["closure"].size();
      rep.rerun_steps = read_run_summary(adapted).steps;
      rep.after = iq_histogram(stage_estimate(config, adapted).iq(config.estimator));
    });
  }
  return rep;
}

void write_report(const RunConfig& config, const Report& rep) {
  make_dir(config.out_dir);
  std::ostringstream out;
  out << "minles report\n";
  out << "case: " << rep.case_name << "\n";
  out << "estimator: " << rep.estimator.name() << "\n";
  out << "fraction: " << format_number(rep.fraction) << "\n";
  if (!rep.stages.empty()) {
    out << "stages:";
    for (const StageTiming& s : rep.stages) out << ' ' << s.stage << (s.reused ? "(reused)" : "");
    out << "\n";
  }
  out << "leaves before: " << rep.leaves_before << "\n";
  if (rep.adapted) {
    out << "flagged: " << rep.flagged << " (" << format_number(100.0 * rep.flagged / std::max<std::size_t>(1, rep.leaves_before))
        << "% of leaves)\n";
    out << "balance closure: " << rep.closure << "\n";
    out << "leaves after: " << rep.leaves_after << "\n";
    out << "flagged in band: " << rep.flagged_in_band << " (" << format_number(100.0 * rep.band_fraction()) << "%)\n";
    out << "rerun steps: " << rep.rerun_steps << "\n";
  }
  out << "budgets: ke " << (rep.has_ke ? "present" : "absent") << ", tke " << (rep.has_tke ? "present" : "absent")
      << "\n";
  out << "ke columns with negative mean dissipation: " << rep.negative_ke_columns << "\n";
  out << "ke columns with flagged denominator: " << rep.invalid_ke_columns << "\n";
  out << "k_num extrema (desk-case values, not literature values):\n";
  for (Method m : {Method::emp, Method::ke, Method::tke}) {
    const Extrema& e = rep.k_num[static_cast<std::size_t>(m)];
    out << "  " << to_string(m) << ": ";
    if (e.valid) out << "min " << format_number(e.min) << " max " << format_number(e.max) << "\n";
    else out << "absent\n";
  }
  out << "iq histogram, 10 bins on [0,1]\n";
  out << "  before: " << histogram_row(rep.before) << "\n";
  if (rep.adapted) out << "  after: " << histogram_row(rep.after) << "\n";
  write_text(config.out_dir + "/report.txt", out.str());

  std::ostringstream t;
  for (const StageTiming& s : rep.stages) {
    t << s.stage << ' ' << format_number(s.seconds) << (s.reused ? " reused" : "") << "\n";
  }
  write_text(config.out_dir + "/timings.txt", t.str());
}

}  // namespace minles
