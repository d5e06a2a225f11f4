#pragma once

#include <array>
#include <vector>

#include "minles/discretization.hpp"
#include "minles/sgs.hpp"

namespace minles {

// Conserved-variable layout of residuals and fluxes: u1, u2, u3, e, p.
using Vec5 = std::array<double, 5>;

struct FaceFlux {
  Vec3 mom;
  double e = 0.0;
  double p = 0.0;

  FaceFlux& operator+=(const FaceFlux& o) {
    mom += o.mom;
    e += o.e;
    p += o.p;
    return *this;
  }
  friend FaceFlux operator*(FaceFlux f, double s) {
    f.mom *= s;
    f.e *= s;
    f.p *= s;
    return f;
  }
};

struct ForcingParams {
  bool enabled = false;
  int axis = 0;
  double target_bulk = 1.0;
  double relaxation = 1.0;
};

struct SchemeParams {
  JstParams jst;
  double cfl = 1.8;
  // Low-storage multistage coefficients: w_k = w_0 - alpha_k dt R(w_{k-1}) / V.
  std::array<double, 5> rk_alpha{0.25, 1.0 / 6.0, 0.375, 0.5, 1.0};
  SgsModel sgs = SgsModel::none;
  double c_w = kWaleConstant;
  double damping_rate = 0.0;  // uniform linear drag -sigma*u on momentum
  ForcingParams forcing;
};

// Uniform body force driving the bulk velocity toward its target within one step.
double forcing_term(double u_bulk, double u_target, double dt, double relaxation = 1.0);

// Step of level `level` when dt_finest is the step of the finest level.
double dt_at_level(double dt_finest, int level, int max_level);

class Solver {
 public:
  Solver(const Mesh& mesh, FluidProps props, SchemeParams scheme);

  const Mesh& mesh() const { return *mesh_; }
  const FaceTable& table() const { return table_; }
  const FluidProps& props() const { return props_; }
  const SchemeParams& scheme() const { return scheme_; }
  const GhostRules& ghost_rules() const { return rules_; }

  // Net outward flux integral per leaf (V dw/dt + R = 0) with the current nu_t,
  // including sources. Indexed by node id; internal nodes stay zero.
  void compute_residual(const FlowState& state, std::vector<Vec5>& residual, double body_force = 0.0) const;

  FaceFlux face_flux(const Face& face, const FlowState& state, const std::vector<Mat3>& grad_u) const;

  // Gradients on all leaves and nu_t from the configured model; restricts internal nodes.
  void refresh_derived(FlowState& state) const;
  void velocity_gradients(const FlowState& state, std::vector<Mat3>& grad_u) const;

  // One multistage step of every leaf with the same dt (no subcycling).
  void rk5_step(FlowState& state, double dt, double body_force = 0.0) const;

  // Largest stable step of the finest level for the current state.
  double stable_dt(const FlowState& state) const;
  double bulk_velocity(const FlowState& state, int axis = 0) const;
  double max_speed(const FlowState& state) const;

 private:
  friend class Integrator;
  void add_sources(CellId leaf, const FlowState& state, double body_force, Vec5& r) const;

  const Mesh* mesh_;
  FaceTable table_;
  FluidProps props_;
  SchemeParams scheme_;
  GhostRules rules_;
};

// Recursive subcycled advance O(l) = O(l+1) O(l+1) A(l): finer levels take two
// half steps before each coarser step while the coarse state stays frozen; the
// coarse side of a coarse/fine face uses the time integral of the fine fluxes.
class Integrator {
 public:
  explicit Integrator(const Solver& solver);

  // Advances every leaf by dt_at_level(dt_finest, 0, max_level).
  void advance(FlowState& state, double dt_finest);

  void set_logging(bool on) { logging_ = on; }
  const std::vector<int>& call_log() const { return log_; }
  double last_body_force() const { return body_force_; }

 private:
  void advance_level(FlowState& state, int level);
  void step_level(FlowState& state, int level);

  const Solver* solver_;
  double dt_finest_ = 0.0;
  double body_force_ = 0.0;
  bool logging_ = false;
  std::vector<int> log_;
  std::vector<double> level_time_;
  std::vector<FaceFlux> flux_;
  std::vector<FaceFlux> register_;
  std::vector<Mat3> grad_;
  std::vector<Vec3> u0_;
  std::vector<double> e0_;
  std::vector<double> p0_;
};

}  // namespace minles
