#include "minles/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "binio.hpp"

namespace minles {

void write_snapshot(const std::string& path, const Mesh& mesh, const FlowState& state, const SnapshotMeta& meta) {
  const auto& leaves = mesh.leaves();
  std::vector<Vec3> u;
  std::vector<double> e, p, nu_t;
  u.reserve(leaves.size());
  for (CellId leaf : leaves) {
    const auto i = static_cast<std::size_t>(leaf);
    u.push_back(state.u[i]);
    e.push_back(state.e[i]);
    p.push_back(state.p[i]);
    nu_t.push_back(state.nu_t[i]);
  }
  detail::BinWriter w(path, "MLSNAP", kSnapshotVersion);
  w.put(state.time);
  w.put(meta.step);
  w.put(meta.body_force);
  w.put_vector(u);
  w.put_vector(e);
  w.put_vector(p);
  w.put_vector(nu_t);
  w.close();
}

FlowState read_snapshot(const std::string& path, const Mesh& mesh, SnapshotMeta* meta) {
  detail::BinReader r(path, "MLSNAP", kSnapshotVersion);
  FlowState s;
  s.time = r.get<double>();
  SnapshotMeta m;
  m.step = r.get<std::uint64_t>();
  m.body_force = r.get<double>();
  const auto u = r.get_vector<Vec3>();
  const auto e = r.get_vector<double>();
  const auto p = r.get_vector<double>();
  const auto nu_t = r.get_vector<double>();
  const auto& leaves = mesh.leaves();
  if (u.size() != leaves.size() || e.size() != leaves.size() || p.size() != leaves.size() ||
      nu_t.size() != leaves.size()) {
    throw IoError("'" + path + "' does not match the mesh (" + std::to_string(u.size()) + " leaves vs " +
                  std::to_string(leaves.size()) + ")");
  }
  s.resize(mesh.size());
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const auto i = static_cast<std::size_t>(leaves[k]);
    s.u[i] = u[k];
    s.e[i] = e[k];
    s.p[i] = p[k];
    s.nu_t[i] = nu_t[k];
  }
  restrict_state(mesh, s);
  if (meta) *meta = m;
  return s;
}

void write_stats(const std::string& path, const RunningStats& stats) {
  detail::BinWriter w(path, "MLSTAT", kStatsVersion);
  w.put<std::uint64_t>(stats.n_samples);
  w.put(stats.t_start);
  w.put(stats.t_end);
  w.put_vector(stats.mean_u);
  w.put_vector(stats.comoment);
  w.put_vector(stats.mean_p);
  w.put_vector(stats.mean_nu_t);
  w.put_vector(stats.mean_tau_grad);
  w.close();
}

RunningStats read_stats(const std::string& path) {
  detail::BinReader r(path, "MLSTAT", kStatsVersion);
  RunningStats s;
  s.n_samples = r.get<std::uint64_t>();
  s.t_start = r.get<double>();
  s.t_end = r.get<double>();
  s.mean_u = r.get_vector<Vec3>();
  s.comoment = r.get_vector<Sym3>();
  s.mean_p = r.get_vector<double>();
  s.mean_nu_t = r.get_vector<double>();
  s.mean_tau_grad = r.get_vector<double>();
  const std::size_t n = s.mean_u.size();
  if (s.comoment.size() != n || s.mean_p.size() != n || s.mean_nu_t.size() != n || s.mean_tau_grad.size() != n) {
    throw IoError("'" + path + "' has inconsistent array sizes");
  }
  return s;
}

void write_budget(const std::string& path, const BudgetMeans& means) {
  detail::BinWriter w(path, "MLBUDG", kBudgetVersion);
  w.put<std::uint64_t>(means.ke_samples);
  w.put<std::uint64_t>(means.tke_samples);
  w.put(means.t_start);
  w.put(means.t_end);
  for (const auto& v : means.ke) w.put_vector(v);
  for (const auto& v : means.tke) w.put_vector(v);
  w.close();
}

BudgetMeans read_budget(const std::string& path) {
  detail::BinReader r(path, "MLBUDG", kBudgetVersion);
  BudgetMeans m;
  m.ke_samples = r.get<std::uint64_t>();
  m.tke_samples = r.get<std::uint64_t>();
  m.t_start = r.get<double>();
  m.t_end = r.get<double>();
  for (auto& v : m.ke) v = r.get_vector<double>();
  for (auto& v : m.tke) v = r.get_vector<double>();
  return m;
}

void write_plan(const std::string& path, const AdaptPlan& plan, const MeshDelta* delta) {
  nlohmann::ordered_json j;
  j["format"] = "minles-plan";
  j["version"] = kPlanVersion;
  j["estimator"] = plan.estimator.name();
  j["fraction"] = plan.fraction;
  j["leaf_count"] = plan.leaf_count;
  j["flagged"] = plan.flagged;
  if (delta) j["closure"] = delta->closure;
  write_text(path, j.dump(1) + "\n");
}

AdaptPlan read_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != "minles-plan") throw IoError("'" + path + "' is not a plan file");
  const int version = j.value("version", -1);
  if (version != kPlanVersion) {
    throw IoError("'" + path + "' has unsupported plan version " + std::to_string(version));
  }
  AdaptPlan plan;
  try {
    const auto id = EstimatorId::parse(j.at("estimator").get<std::string>());
    if (!id) throw IoError("'" + path + "' names an unknown estimator");
    plan.estimator = *id;
    plan.fraction = j.at("fraction").get<double>();
    plan.leaf_count = j.at("leaf_count").get<std::size_t>();
    plan.flagged = j.at("flagged").get<std::vector<CellId>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path + "' is malformed: " + e.what());
  }
  return plan;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      if (std::isnan(row[k])) {
        out << "NA";
      } else {
        const auto res = std::to_chars(buf, buf + sizeof buf, row[k]);
        out.write(buf, res.ptr - buf);
      }
    }
    out << '\n';
  }
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace minles
