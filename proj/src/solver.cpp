#include "minles/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "minles/error.hpp"

namespace minles {

double forcing_term(double u_bulk, double u_target, double dt, double relaxation) {
  return relaxation * (u_target - u_bulk) / dt;
}

double dt_at_level(double dt_finest, int level, int max_level) {
  if (level < 0 || level > max_level) {
    std::ostringstream msg;
    msg << "level " << level << " outside [0, " << max_level << "]";
    throw ConfigError(msg.str());
  }
  return std::ldexp(dt_finest, max_level - level);
}

Solver::Solver(const Mesh& mesh, FluidProps props, SchemeParams scheme)
    : mesh_(&mesh), table_(mesh), props_(props), scheme_(scheme), rules_(solver_ghost_rules(props)) {
  if (!(props_.rho > 0.0)) throw ConfigError("density must be positive");
  if (props_.nu < 0.0) throw ConfigError("viscosity must be non-negative");
  if (!(props_.sound_speed > 0.0)) throw ConfigError("sound_speed must be positive");
}

FaceFlux Solver::face_flux(const Face& f, const FlowState& s, const std::vector<Mat3>& grad_u) const {
  const Vec3 um = ghost_value(s.u, f.m1, rules_.u), up = ghost_value(s.u, f.p1, rules_.u);
  const double em = ghost_value(s.e, f.m1, rules_.e), ep = ghost_value(s.e, f.p1, rules_.e);
  const double pm = ghost_value(s.p, f.m1, rules_.p), pp = ghost_value(s.p, f.p1, rules_.p);
  const Vec3 uf = (um + up) * 0.5;
  const double ef = 0.5 * (em + ep);
  const double pf = 0.5 * (pm + pp);
  const double vol_flux = dot(uf, f.area);
  const double c2 = props_.sound_speed * props_.sound_speed;

  FaceFlux out;
  out.mom = uf * vol_flux + f.area * (pf / props_.rho);
  out.e = (ef + pf / props_.rho) * vol_flux;
  out.p = props_.rho * c2 * vol_flux;

  if (!f.on_boundary()) {
    const JstCoefficients jc = jst_coefficients(f, props_, scheme_.jst, s.u, s.p);
    out.mom -= jst_dissipation(f, jc, s.u, rules_.u);
    out.e -= jst_dissipation(f, jc, s.e, rules_.e);
    out.p -= jst_dissipation(f, jc, s.p, rules_.p);
  }

  const double nu_f = props_.nu + face_nu_t(f, s.nu_t);
  if (nu_f > 0.0) {
    const Mat3& gm = grad_u[static_cast<std::size_t>(f.m1.node)];
    const Mat3& gp = grad_u[static_cast<std::size_t>(f.p1.node)];
    const Mat3 g = face_gradient(f, um, up, gm, gp);
    const Mat3 tau = g + g.transposed();
    out.mom -= tau.apply(f.area) * nu_f;
    out.e -= nu_f * dot(tau.apply(uf), f.area);
  }
  return out;
}

void Solver::add_sources(CellId leaf, const FlowState& s, double body_force, Vec5& r) const {
  const auto i = static_cast<std::size_t>(leaf);
  const double vol = (*mesh_)[leaf].volume;
  if (scheme_.damping_rate != 0.0) {
    for (int a = 0; a < 3; ++a) r[a] += vol * scheme_.damping_rate * s.u[i][a];
  }
  if (body_force != 0.0) {
    const int a = scheme_.forcing.axis;
    r[a] -= vol * body_force;
    r[3] -= vol * body_force * s.u[i][a];
  }
}

void Solver::velocity_gradients(const FlowState& state, std::vector<Mat3>& grad_u) const {
  gradient_field(*mesh_, table_, state.u, rules_.u, mesh_->leaves(), grad_u);
}

void Solver::refresh_derived(FlowState& state) const {
  restrict_state(*mesh_, table_, state);
  std::vector<Mat3> grad;
  velocity_gradients(state, grad);
  update_eddy_viscosity(*mesh_, scheme_.sgs, scheme_.c_w, mesh_->leaves(), grad, state);
}

namespace {

bool finite(const FlowState& s, std::span<const CellId> cells) {
  for (CellId c : cells) {
    const auto i = static_cast<std::size_t>(c);
    if (!std::isfinite(s.u[i].x) || !std::isfinite(s.u[i].y) || !std::isfinite(s.u[i].z) ||
        !std::isfinite(s.e[i]) || !std::isfinite(s.p[i])) {
      return false;
    }
  }
  return true;
}

void accumulate(Vec5& r, const FaceFlux& f, double sign) {
  r[0] += sign * f.mom.x;
  r[1] += sign * f.mom.y;
  r[2] += sign * f.mom.z;
  r[3] += sign * f.e;
  r[4] += sign * f.p;
}

}  // namespace

void Solver::compute_residual(const FlowState& state, std::vector<Vec5>& residual, double body_force) const {
  if (!finite(state, mesh_->leaves())) throw SolverError("non-finite value in flow state");
  FlowState s = state;
  restrict_state(*mesh_, table_, s);
  std::vector<Mat3> grad;
  velocity_gradients(s, grad);
  std::vector<FaceFlux> flux(table_.faces().size());
  for (std::size_t k = 0; k < flux.size(); ++k) flux[k] = face_flux(table_.faces()[k], s, grad);
  residual.assign(mesh_->size(), Vec5{});
  for (CellId leaf : mesh_->leaves()) {
    Vec5& r = residual[static_cast<std::size_t>(leaf)];
    for (const GatherEntry& ge : table_.gather(leaf)) accumulate(r, flux[ge.face], ge.sign);
    add_sources(leaf, s, body_force, r);
  }
}

void Solver::rk5_step(FlowState& state, double dt, double body_force) const {
  if (!(dt > 0.0)) throw SolverError("time step must be positive");
  const double speed0 = max_speed(state);
  const FlowState start = state;
  std::vector<Vec5> r;
  for (double alpha : scheme_.rk_alpha) {
    compute_residual(state, r, body_force);
    for (CellId leaf : mesh_->leaves()) {
      const auto i = static_cast<std::size_t>(leaf);
      const double k = alpha * dt / (*mesh_)[leaf].volume;
      state.u[i] = start.u[i] - Vec3{r[i][0], r[i][1], r[i][2]} * k;
      state.e[i] = start.e[i] - k * r[i][3];
      state.p[i] = start.p[i] - k * r[i][4];
    }
  }
  state.time = start.time + dt;
  if (!finite(state, mesh_->leaves()) || max_speed(state) > 10.0 * std::max(speed0, 1e-8)) {
    throw DivergenceError("velocity blew up during step at t=" + std::to_string(start.time));
  }
  refresh_derived(state);
}

double Solver::stable_dt(const FlowState& state) const {
  const int lmax = mesh_->max_level();
  double dt = std::numeric_limits<double>::infinity();
  for (CellId leaf : mesh_->leaves()) {
    const auto i = static_cast<std::size_t>(leaf);
    const OctCell& c = (*mesh_)[leaf];
    const double nu_eff = props_.nu + state.nu_t[i];
    double conv = 0.0, visc = 0.0;
    for (const GatherEntry& ge : table_.gather(leaf)) {
      const Face& f = table_.faces()[ge.face];
      const double area = norm(f.area);
      conv += std::abs(dot(state.u[i], f.area)) + props_.sound_speed * area;
      visc += nu_eff * area / norm(f.d);
    }
    conv /= 2.0 * c.volume;
    visc *= 2.0 / c.volume;
    // The real-axis stability limit of the stage polynomial is about 2.59 against
    // 4 on the imaginary axis; scale the diffusive radius accordingly.
    const double rate = conv + 1.6 * visc;
    if (rate > 0.0) dt = std::min(dt, scheme_.cfl / rate / std::ldexp(1.0, lmax - c.level));
  }
  if (!std::isfinite(dt)) throw SolverError("cannot derive a stable time step");
  return dt;
}

double Solver::bulk_velocity(const FlowState& state, int axis) const {
  double num = 0.0, vol = 0.0;
  for (CellId leaf : mesh_->leaves()) {
    const double v = (*mesh_)[leaf].volume;
    num += v * state.u[static_cast<std::size_t>(leaf)][axis];
    vol += v;
  }
  return num / vol;
}

double Solver::max_speed(const FlowState& state) const {
  double m = 0.0;
  for (CellId leaf : mesh_->leaves()) m = std::max(m, norm(state.u[static_cast<std::size_t>(leaf)]));
  return m;
}

Integrator::Integrator(const Solver& solver) : solver_(&solver) {
  const std::size_t nf = solver.table().faces().size();
  flux_.resize(nf);
  register_.assign(nf, FaceFlux{});
  const std::size_t n = solver.mesh().size();
  grad_.resize(n);
  u0_.resize(n);
  e0_.resize(n);
  p0_.resize(n);
}

void Integrator::advance(FlowState& state, double dt_finest) {
  if (!(dt_finest > 0.0)) throw SolverError("time step must be positive");
  const Solver& s = *solver_;
  const int lmax = s.table().max_level();
  dt_finest_ = dt_finest;
  const double dt0 = dt_at_level(dt_finest, 0, lmax);
  const ForcingParams& fp = s.scheme().forcing;
  body_force_ = fp.enabled ? forcing_term(s.bulk_velocity(state, fp.axis), fp.target_bulk, dt0, fp.relaxation) : 0.0;
  const double speed0 = s.max_speed(state);
  const double t0 = state.time;
  level_time_.assign(static_cast<std::size_t>(lmax) + 1, t0);

  advance_level(state, 0);

  for (int l = 0; l <= lmax; ++l) {
    if (std::abs(level_time_[l] - (t0 + dt0)) > 1e-12 * dt0) {
      std::ostringstream msg;
      msg << "level " << l << " at t=" << level_time_[l] << " after advancing to " << t0 + dt0;
      throw IntegratorError(msg.str());
    }
  }
  state.time = t0 + dt0;
  if (!finite(state, s.mesh().leaves()) || s.max_speed(state) > 10.0 * std::max(speed0, 1e-8)) {
    throw DivergenceError("velocity blew up during step at t=" + std::to_string(t0));
  }
  s.refresh_derived(state);
}

void Integrator::advance_level(FlowState& state, int level) {
  if (level < solver_->table().max_level()) {
    advance_level(state, level + 1);
    advance_level(state, level + 1);
  }
  step_level(state, level);
}

void Integrator::step_level(FlowState& state, int level) {
  const Solver& s = *solver_;
  const Mesh& mesh = s.mesh();
  const FaceTable& table = s.table();
  const double dt = dt_at_level(dt_finest_, level, table.max_level());
  if (logging_) log_.push_back(level);

  const auto& leaves = table.leaves_at(level);
  const auto& faces = table.faces_at(level);
  const auto& coarse_side = table.coarse_side_faces(level);
  const auto& grad_cells = table.gradient_cells(level);
  for (CellId c : leaves) {
    const auto i = static_cast<std::size_t>(c);
    u0_[i] = state.u[i];
    e0_[i] = state.e[i];
    p0_[i] = state.p[i];
  }
  for (std::uint32_t f : coarse_side) flux_[f] = register_[f] * (1.0 / dt);

  const auto& alphas = s.scheme().rk_alpha;
  for (std::size_t stage = 0; stage < alphas.size(); ++stage) {
    restrict_state(mesh, table, state);
    gradient_field(mesh, table, state.u, s.ghost_rules().u, grad_cells, grad_);
    if (stage == 0) update_eddy_viscosity(mesh, s.scheme().sgs, s.scheme().c_w, leaves, grad_, state);
    for (std::uint32_t f : faces) flux_[f] = s.face_flux(table.faces()[f], state, grad_);
    if (stage + 1 == alphas.size()) {
      for (std::uint32_t f : faces) {
        const Face& face = table.faces()[f];
        if (!face.on_boundary() && mesh[face.m1.node].level != mesh[face.p1.node].level) {
          register_[f] += flux_[f] * dt;
        }
      }
    }
    // Stage updates read only fluxes, so leaves can be overwritten in place.
    for (CellId c : leaves) {
      const auto i = static_cast<std::size_t>(c);
      Vec5 r{};
      for (const GatherEntry& ge : table.gather(c)) accumulate(r, flux_[ge.face], ge.sign);
      s.add_sources(c, state, body_force_, r);
      const double k = alphas[stage] * dt / mesh[c].volume;
      state.u[i] = u0_[i] - Vec3{r[0], r[1], r[2]} * k;
      state.e[i] = e0_[i] - k * r[3];
      state.p[i] = p0_[i] - k * r[4];
    }
  }
  for (std::uint32_t f : coarse_side) register_[f] = FaceFlux{};
  level_time_[level] += dt;
}

}  // namespace minles
