#include "minles/budget.hpp"

#include <algorithm>
#include <cmath>

#include "minles/error.hpp"

namespace minles {

double tau_grad(const Mat3& g) { return ddot(g + g.transposed(), g); }

namespace {

double triplet_span(const FlowState& prev, const FlowState& mid, const FlowState& next) {
  const double a = mid.time - prev.time;
  const double b = next.time - mid.time;
  if (!(a > 0.0) || !(b > 0.0)) throw BudgetError("snapshot times must increase");
  if (std::abs(a - b) > 1e-9 * (a + b)) {
    throw BudgetError("snapshot spacing is not uniform around t=" + std::to_string(mid.time));
  }
  return next.time - prev.time;
}

template <class T, class F>
std::vector<T> node_field(const Mesh& mesh, const FaceTable& table, F&& at_leaf) {
  std::vector<T> out(mesh.size(), T{});
  for (CellId leaf : mesh.leaves()) out[static_cast<std::size_t>(leaf)] = at_leaf(static_cast<std::size_t>(leaf));
  restrict_to_parents(mesh, table, out);
  return out;
}

// Per-leaf sums of sign * face value divided by the leaf volume.
std::vector<double> divergence(const Mesh& mesh, const FaceTable& table, const std::vector<double>& face_values) {
  std::vector<double> out;
  out.reserve(mesh.leaf_count());
  for (CellId leaf : mesh.leaves()) {
    double s = 0.0;
    for (const GatherEntry& ge : table.gather(leaf)) s += ge.sign * face_values[ge.face];
    out.push_back(s / mesh[leaf].volume);
  }
  return out;
}

}  // namespace

KeBudget ke_budget(const Solver& solver, const FlowState& prev, const FlowState& mid, const FlowState& next,
                   double body_force) {
  const double span = triplet_span(prev, mid, next);
  const Mesh& mesh = solver.mesh();
  const FaceTable& table = solver.table();
  const FluidProps& props = solver.props();
  const GhostRules& rules = solver.ghost_rules();
  const double rho = props.rho;

  FlowState s = mid;
  restrict_state(mesh, table, s);
  const auto ek = node_field<double>(mesh, table, [&](std::size_t i) { return 0.5 * rho * dot(s.u[i], s.u[i]); });
  const GhostRule<double> ek_rule{false, 0.5 * rho * dot(props.u_inf, props.u_inf)};
  std::vector<Mat3> grad;
  solver.velocity_gradients(s, grad);

  const auto& faces = table.faces();
  std::vector<double> fe(faces.size()), fac(faces.size()), fnu(faces.size(), 0.0);
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const Face& f = faces[k];
    const Vec3 um = ghost_value(s.u, f.m1, rules.u), up = ghost_value(s.u, f.p1, rules.u);
    const Vec3 uf = (um + up) * 0.5;
    const double vol_flux = dot(uf, f.area);
    const double ekf = 0.5 * (ghost_value(ek, f.m1, ek_rule) + ghost_value(ek, f.p1, ek_rule));
    fe[k] = ekf * vol_flux;
    if (!f.on_boundary()) {
      const JstCoefficients jc = jst_coefficients(f, props, solver.scheme().jst, s.u, s.p);
      fe[k] -= jst_dissipation(f, jc, ek, ek_rule);
    }
    const double pf = 0.5 * (ghost_value(s.p, f.m1, rules.p) + ghost_value(s.p, f.p1, rules.p));
    fac[k] = pf * vol_flux;
    const double nu_f = props.nu + face_nu_t(f, s.nu_t);
    if (nu_f > 0.0) {
      const Mat3 g = face_gradient(f, um, up, grad[static_cast<std::size_t>(f.m1.node)],
                                   grad[static_cast<std::size_t>(f.p1.node)]);
      const Mat3 tau = g + g.transposed();
      fnu[k] = -rho * nu_f * dot(tau.apply(uf), f.area);
    }
  }

  KeBudget b;
  b.F_ekin = divergence(mesh, table, fe);
  b.F_ac = divergence(mesh, table, fac);
  b.F_nu = divergence(mesh, table, fnu);
  const std::size_t n = mesh.leaf_count();
  b.e_kin_t.resize(n);
  b.eps_nu.resize(n);
  b.forcing.resize(n);
  b.eps_n.resize(n);
  const int axis = solver.scheme().forcing.axis;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(mesh.leaves()[k]);
    b.e_kin_t[k] = 0.5 * rho * (dot(next.u[i], next.u[i]) - dot(prev.u[i], prev.u[i])) / span;
    b.eps_nu[k] = rho * (props.nu + s.nu_t[i]) * tau_grad(grad[i]);
    b.forcing[k] = -rho * body_force * s.u[i][axis];
    b.eps_n[k] = b.closure(k);
  }
  return b;
}

TkeBudget tke_budget(const Solver& solver, const FlowState& prev, const FlowState& mid, const FlowState& next,
                     const RunningStats& stats) {
  if (stats.n_samples == 0) throw BudgetError("statistics window is empty");
  const Mesh& mesh = solver.mesh();
  if (stats.cells() != mesh.leaf_count()) throw BudgetError("statistics do not match the mesh");
  const double span = triplet_span(prev, mid, next);
  const FaceTable& table = solver.table();
  const FluidProps& props = solver.props();
  const GhostRules& rules = solver.ghost_rules();
  const double rho = props.rho;

  std::vector<std::size_t> pos(mesh.size(), 0);
  for (std::size_t k = 0; k < mesh.leaf_count(); ++k) pos[static_cast<std::size_t>(mesh.leaves()[k])] = k;

  FlowState s = mid;
  restrict_state(mesh, table, s);
  const auto mean_u = node_field<Vec3>(mesh, table, [&](std::size_t i) { return stats.mean_u[pos[i]]; });
  const auto up = node_field<Vec3>(mesh, table, [&](std::size_t i) { return s.u[i] - stats.mean_u[pos[i]]; });
  const auto kf = node_field<double>(mesh, table, [&](std::size_t i) { return 0.5 * dot(up[i], up[i]); });
  const auto pp = node_field<double>(mesh, table, [&](std::size_t i) { return s.p[i] - stats.mean_p[pos[i]]; });

  const GhostRule<Vec3> fluct_rule{true, Vec3{}};
  const GhostRule<Vec3> mean_rule{true, props.u_inf};
  const GhostRule<double> scalar_rule{false, 0.0};

  std::vector<Mat3> grad_fluct, grad_mean;
  std::vector<Vec3> grad_k;
  gradient_field(mesh, table, up, fluct_rule, mesh.leaves(), grad_fluct);
  gradient_field(mesh, table, mean_u, mean_rule, mesh.leaves(), grad_mean);
  gradient_field(mesh, table, kf, scalar_rule, mesh.leaves(), grad_k);

  const auto& faces = table.faces();
  std::vector<double> fk(faces.size()), fac(faces.size()), fnu(faces.size());
  std::vector<double> lap[3];
  for (auto& l : lap) l.assign(faces.size(), 0.0);
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const Face& f = faces[k];
    const std::size_t im = static_cast<std::size_t>(f.m1.node), ip = static_cast<std::size_t>(f.p1.node);
    const Vec3 uf = (ghost_value(s.u, f.m1, rules.u) + ghost_value(s.u, f.p1, rules.u)) * 0.5;
    const double vol_flux = dot(uf, f.area);
    const double km = ghost_value(kf, f.m1, scalar_rule), kp = ghost_value(kf, f.p1, scalar_rule);
    fk[k] = 0.5 * (km + kp) * vol_flux;
    if (!f.on_boundary()) {
      const JstCoefficients jc = jst_coefficients(f, props, solver.scheme().jst, s.u, s.p);
      fk[k] -= jst_dissipation(f, jc, kf, scalar_rule);
    }
    const Vec3 upf = (ghost_value(up, f.m1, fluct_rule) + ghost_value(up, f.p1, fluct_rule)) * 0.5;
    const double ppf = 0.5 * (ghost_value(pp, f.m1, scalar_rule) + ghost_value(pp, f.p1, scalar_rule));
    fac[k] = ppf * dot(upf, f.area) / rho;
    const double nu_f = props.nu + face_nu_t(f, s.nu_t);
    fnu[k] = -nu_f * dot(face_gradient(f, km, kp, grad_k[im], grad_k[ip]), f.area);
    const Mat3 gm = face_gradient(f, ghost_value(mean_u, f.m1, mean_rule), ghost_value(mean_u, f.p1, mean_rule),
                                  grad_mean[im], grad_mean[ip]);
    const Vec3 flux = gm.apply(f.area);
    for (int a = 0; a < 3; ++a) lap[a][k] = flux[a];
  }

  TkeBudget b;
  b.F_k = divergence(mesh, table, fk);
  b.F_ac = divergence(mesh, table, fac);
  b.F_nu = divergence(mesh, table, fnu);
  const std::vector<double> lap_x = divergence(mesh, table, lap[0]);
  const std::vector<double> lap_y = divergence(mesh, table, lap[1]);
  const std::vector<double> lap_z = divergence(mesh, table, lap[2]);
  const std::size_t n = mesh.leaf_count();
  b.k_t.resize(n);
  b.P.resize(n);
  b.eps_nu.resize(n);
  b.eps_inter.resize(n);
  b.eps_n.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(mesh.leaves()[k]);
    const Vec3 un = next.u[i] - stats.mean_u[k];
    const Vec3 uo = prev.u[i] - stats.mean_u[k];
    b.k_t[k] = 0.5 * (dot(un, un) - dot(uo, uo)) / span;
    const Vec3& u = up[i];
    b.P[k] = dot(u, grad_mean[i].apply(u));
    b.eps_nu[k] = (props.nu + s.nu_t[i]) * ddot(grad_fluct[i], grad_fluct[i]);
    b.eps_inter[k] = -(s.nu_t[i] - stats.mean_nu_t[k]) * dot(u, Vec3{lap_x[k], lap_y[k], lap_z[k]});
    b.eps_n[k] = b.closure(k);
  }
  return b;
}

MeanDissipation mean_dissipation_from_mean(const Mesh& mesh, std::span<const double> leaf_mean) {
  MeanDissipation out;
  out.eps_bar = spanwise_average(mesh, leaf_mean);
  out.eps_bar_pos.resize(out.eps_bar.size());
  for (std::size_t c = 0; c < out.eps_bar.size(); ++c) out.eps_bar_pos[c] = std::max(out.eps_bar[c], 0.0);
  return out;
}

MeanDissipation mean_dissipation(const Mesh& mesh, const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) throw BudgetError("mean dissipation needs at least one sample");
  std::vector<double> mean(mesh.leaf_count(), 0.0);
  for (const auto& s : samples) {
    if (s.size() != mean.size()) throw BudgetError("sample is not sized to the leaves");
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += s[k];
  }
  for (double& m : mean) m /= static_cast<double>(samples.size());
  return mean_dissipation_from_mean(mesh, mean);
}

StrainDenominator strain_dissipation_denominator(const RunningStats& stats, const Mesh& mesh, double floor) {
  StrainDenominator out;
  out.value = spanwise_average(mesh, stats.mean_tau_grad);
  out.flagged.resize(out.value.size());
  for (std::size_t c = 0; c < out.value.size(); ++c) out.flagged[c] = !(out.value[c] >= floor);
  return out;
}

namespace {

template <std::size_t N>
void add_terms(std::array<std::vector<double>, N>& mean, std::size_t& count, std::array<std::vector<double>*, N> terms) {
  ++count;
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t t = 0; t < N; ++t) {
    const std::vector<double>& v = *terms[t];
    if (mean[t].size() != v.size()) mean[t].assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) mean[t][i] += (v[i] - mean[t][i]) * w;
  }
}

}  // namespace

void BudgetMeans::add(KeBudget& b) { add_terms(ke, ke_samples, b.terms()); }
void BudgetMeans::add(TkeBudget& b) { add_terms(tke, tke_samples, b.terms()); }

}  // namespace minles
