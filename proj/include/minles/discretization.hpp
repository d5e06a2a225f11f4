#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "minles/mesh.hpp"

namespace minles {

struct FluidProps {
  double rho = 1.0;
  double nu = 0.0;
  double sound_speed = 5.0;  // artificial-compressibility wave speed
  // Ghost values used on freestream boundaries.
  Vec3 u_inf;
  double e_inf = 0.0;
  double p_inf = 0.0;
};

// Per-node flow variables. Leaves carry the solution; internal nodes hold
// volume-weighted restrictions used by the wide dissipation stencil.
struct FlowState {
  std::vector<Vec3> u;
  std::vector<double> e;
  std::vector<double> p;
  std::vector<double> nu_t;
  double time = 0.0;

  void resize(std::size_t n) {
    u.assign(n, Vec3{});
    e.assign(n, 0.0);
    p.assign(n, 0.0);
    nu_t.assign(n, 0.0);
  }
  std::size_t size() const { return u.size(); }
};

struct StencilRef {
  CellId node = kNoCell;
  Ghost ghost = Ghost::none;
};

// How a field behaves across non-periodic boundaries: vectors flip sign at walls
// (no-slip), scalars mirror; freestream ghosts take a fixed value.
template <class T>
struct GhostRule {
  bool negate_at_wall = false;
  T freestream{};
};

template <class T>
T ghost_value(const std::vector<T>& field, StencilRef ref, const GhostRule<T>& rule) {
  switch (ref.ghost) {
    case Ghost::none: return field[static_cast<std::size_t>(ref.node)];
    case Ghost::wall: {
      const T& v = field[static_cast<std::size_t>(ref.node)];
      return rule.negate_at_wall ? T(-v) : v;
    }
    case Ghost::freestream: return rule.freestream;
  }
  return rule.freestream;
}

// Face between m1 (minus side) and p1 (plus side) along `axis`; the area vector
// points from m1 to p1. Exactly one of m1/p1 carries a ghost flag on boundaries.
struct Face {
  StencilRef m2, m1, p1, p2;
  Vec3 area;
  Vec3 center;
  Vec3 d;  // centroid(p1) - centroid(m1), with periodic shifts and mirrored ghosts
  int axis = 0;
  int level = 0;  // level of the finer side

  Ghost ghost() const { return m1.ghost != Ghost::none ? m1.ghost : p1.ghost; }
  bool on_boundary() const { return ghost() != Ghost::none; }
  CellId interior_leaf() const { return m1.ghost == Ghost::none ? m1.node : p1.node; }
};

struct GatherEntry {
  std::uint32_t face;
  double sign;  // +1 when the leaf is the minus side
};

class FaceTable {
 public:
  FaceTable() = default;
  explicit FaceTable(const Mesh& mesh);

  const std::vector<Face>& faces() const { return faces_; }
  std::span<const GatherEntry> gather(CellId leaf) const {
    const auto i = static_cast<std::size_t>(leaf);
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  int max_level() const { return static_cast<int>(leaves_by_level_.size()) - 1; }
  const std::vector<CellId>& leaves_at(int level) const { return leaves_by_level_[level]; }
  const std::vector<std::uint32_t>& faces_at(int level) const { return faces_by_level_[level]; }
  // Faces whose coarse side is a leaf of `level` (their own level is level+1).
  const std::vector<std::uint32_t>& coarse_side_faces(int level) const { return coarse_side_[level]; }
  // Cells whose gradient feeds the viscous fluxes of faces_at(level).
  const std::vector<CellId>& gradient_cells(int level) const { return grad_cells_[level]; }
  const std::vector<CellId>& internal_descending() const { return internal_desc_; }
  const std::vector<std::uint32_t>& all_faces() const { return all_faces_; }

 private:
  std::vector<Face> faces_;
  std::vector<std::size_t> offsets_;
  std::vector<GatherEntry> entries_;
  std::vector<std::vector<CellId>> leaves_by_level_;
  std::vector<std::vector<std::uint32_t>> faces_by_level_;
  std::vector<std::vector<std::uint32_t>> coarse_side_;
  std::vector<std::vector<CellId>> grad_cells_;
  std::vector<CellId> internal_desc_;
  std::vector<std::uint32_t> all_faces_;
};

// Volume-weighted restriction of leaf values onto every internal node.
template <class T>
void restrict_to_parents(const Mesh& mesh, const FaceTable& table, std::vector<T>& field) {
  const int nchild = mesh.child_count();
  for (CellId id : table.internal_descending()) {
    const OctCell& c = mesh[id];
    T sum{};
    for (int k = 0; k < nchild; ++k) {
      const CellId ch = c.first_child + k;
      sum += field[static_cast<std::size_t>(ch)] * mesh[ch].volume;
    }
    field[static_cast<std::size_t>(id)] = sum * (1.0 / c.volume);
  }
}
void restrict_state(const Mesh& mesh, const FaceTable& table, FlowState& state);
// Same without a face table, walking node ids from the highest down.
void restrict_state(const Mesh& mesh, FlowState& state);

// Green-Gauss gradients from face-averaged values; g[i][j] = du_i/dx_j.
Mat3 cell_gradient(const Mesh& mesh, const FaceTable& table, const std::vector<Vec3>& field,
                   const GhostRule<Vec3>& rule, CellId leaf);
Vec3 cell_gradient(const Mesh& mesh, const FaceTable& table, const std::vector<double>& field,
                   const GhostRule<double>& rule, CellId leaf);
void gradient_field(const Mesh& mesh, const FaceTable& table, const std::vector<Vec3>& field,
                    const GhostRule<Vec3>& rule, std::span<const CellId> cells, std::vector<Mat3>& out);
void gradient_field(const Mesh& mesh, const FaceTable& table, const std::vector<double>& field,
                    const GhostRule<double>& rule, std::span<const CellId> cells, std::vector<Vec3>& out);

// Face gradient for viscous fluxes: averaged cell gradients with the component
// along the centroid offset replaced by the direct difference. At walls only the
// normal part of the averaged vector gradient is kept.
Mat3 face_gradient(const Face& f, const Vec3& vm, const Vec3& vp, const Mat3& gm, const Mat3& gp);
Vec3 face_gradient(const Face& f, double vm, double vp, const Vec3& gm, const Vec3& gp);

struct JstParams {
  double kappa2 = 0.0;
  double kappa4 = 1.0 / 64.0;
};

// Scaled coefficients of the blended second/fourth-difference dissipation on one face.
struct JstCoefficients {
  double lambda_area = 0.0;  // spectral radius times face area
  double eps2 = 0.0;
  double eps4 = 0.0;
};

JstCoefficients jst_coefficients(const Face& f, const FluidProps& props, const JstParams& jst,
                                 const std::vector<Vec3>& u, const std::vector<double>& p);

template <class T>
T jst_dissipation(const Face& f, const JstCoefficients& c, const std::vector<T>& field, const GhostRule<T>& rule) {
  if (f.on_boundary()) return T{};
  const T wm2 = ghost_value(field, f.m2, rule), wm1 = ghost_value(field, f.m1, rule);
  const T wp1 = ghost_value(field, f.p1, rule), wp2 = ghost_value(field, f.p2, rule);
  const T second = (wp1 - wm1) * c.eps2;
  const T fourth = (wp2 - wp1 * 3.0 + wm1 * 3.0 - wm2) * c.eps4;
  return (second - fourth) * c.lambda_area;
}

struct GhostRules {
  GhostRule<Vec3> u;
  GhostRule<double> e;
  GhostRule<double> p;
};
GhostRules solver_ghost_rules(const FluidProps& props);

// Eddy viscosity seen by a face; zero on walls.
double face_nu_t(const Face& f, const std::vector<double>& nu_t);

}  // namespace minles
