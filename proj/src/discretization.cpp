#include "minles/discretization.hpp"

#include <algorithm>
#include <cmath>

namespace minles {

namespace {

Vec3 reflect(const Vec3& c, const Vec3& plane_point, const Vec3& normal) {
  const Vec3 n = normal * (1.0 / norm(normal));
  return c - n * (2.0 * dot(c - plane_point, n));
}

}  // namespace

FaceTable::FaceTable(const Mesh& mesh) {
  const int levels = mesh.max_level() + 1;
  leaves_by_level_.assign(levels, {});
  faces_by_level_.assign(levels, {});
  coarse_side_.assign(levels, {});
  grad_cells_.assign(levels, {});

  const int naxes = mesh.two_d() ? 2 : 3;
  std::vector<std::vector<std::uint32_t>> per_leaf(mesh.size());
  for (CellId leaf : mesh.leaves()) {
    const OctCell& c = mesh[leaf];
    const int l = c.level;
    leaves_by_level_[l].push_back(leaf);
    for (int axis = 0; axis < naxes; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const int dir = 2 * axis + side;
        std::array<int, 3> idx = c.index;
        idx[axis] += side ? 1 : -1;
        const int n = mesh.extent(l, axis);
        const bool wrapped = idx[axis] < 0 || idx[axis] >= n;
        const Located nb = mesh.locate(l, idx);
        if (nb.ghost == Ghost::none) {
          const OctCell& o = mesh[nb.node];
          if (o.level == l && !o.is_leaf()) continue;  // built from the finer side
          if (o.level == l && side == 0) continue;     // built from the minus cell
        }

        Face f;
        f.axis = axis;
        f.level = l;
        f.center = mesh.face_center(leaf, dir);
        const Vec3 outward = mesh.face_area(leaf, dir);
        f.area = side ? outward : -outward;
        // Stencil positions at this level: minus cell index im, plus cell index im + 1.
        std::array<int, 3> im = c.index;
        if (side == 0) im[axis] -= 1;
        auto at = [&](int offset) {
          std::array<int, 3> q = im;
          q[axis] += offset;
          const Located loc = mesh.locate(l, q);
          return StencilRef{loc.node, loc.ghost};
        };
        f.m2 = at(-1);
        f.m1 = at(0);
        f.p1 = at(1);
        f.p2 = at(2);

        Vec3 cm = mesh[f.m1.node].centroid;
        Vec3 cp = mesh[f.p1.node].centroid;
        if (f.m1.ghost != Ghost::none) cm = reflect(cp, f.center, f.area);
        if (f.p1.ghost != Ghost::none) cp = reflect(cm, f.center, f.area);
        if (nb.ghost == Ghost::none && wrapped) {
          if (side == 0) cm -= mesh.base().period(axis);
          else cp += mesh.base().period(axis);
        }
        f.d = cp - cm;

        const auto fid = static_cast<std::uint32_t>(faces_.size());
        faces_.push_back(f);
        faces_by_level_[l].push_back(fid);
        if (f.m1.ghost == Ghost::none) per_leaf[static_cast<std::size_t>(f.m1.node)].push_back(fid);
        if (f.p1.ghost == Ghost::none) per_leaf[static_cast<std::size_t>(f.p1.node)].push_back(fid);
        if (nb.ghost == Ghost::none && mesh[nb.node].level < l) coarse_side_[l - 1].push_back(fid);
      }
    }
  }

  offsets_.assign(mesh.size() + 1, 0);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    offsets_[i + 1] = offsets_[i] + per_leaf[i].size();
  }
  entries_.reserve(offsets_.back());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    std::sort(per_leaf[i].begin(), per_leaf[i].end());
    for (std::uint32_t fid : per_leaf[i]) {
      const Face& f = faces_[fid];
      const bool minus = f.m1.ghost == Ghost::none && static_cast<std::size_t>(f.m1.node) == i;
      entries_.push_back({fid, minus ? 1.0 : -1.0});
    }
  }

  for (int l = 0; l < levels; ++l) {
    std::vector<CellId>& cells = grad_cells_[l];
    cells = leaves_by_level_[l];
    for (std::uint32_t fid : faces_by_level_[l]) {
      cells.push_back(faces_[fid].m1.node);
      cells.push_back(faces_[fid].p1.node);
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    std::sort(coarse_side_[l].begin(), coarse_side_[l].end());
  }

  for (CellId id = static_cast<CellId>(mesh.size()) - 1; id >= 0; --id) {
    if (!mesh.is_leaf(id)) internal_desc_.push_back(id);
  }
  all_faces_.resize(faces_.size());
  for (std::size_t i = 0; i < faces_.size(); ++i) all_faces_[i] = static_cast<std::uint32_t>(i);
}

void restrict_state(const Mesh& mesh, const FaceTable& table, FlowState& state) {
  restrict_to_parents(mesh, table, state.u);
  restrict_to_parents(mesh, table, state.e);
  restrict_to_parents(mesh, table, state.p);
  restrict_to_parents(mesh, table, state.nu_t);
}

void restrict_state(const Mesh& mesh, FlowState& state) {
  const int nchild = mesh.child_count();
  for (CellId id = static_cast<CellId>(mesh.size()) - 1; id >= 0; --id) {
    const OctCell& c = mesh[id];
    if (c.is_leaf()) continue;
    Vec3 su;
    double se = 0.0, sp = 0.0, sn = 0.0;
    for (int k = 0; k < nchild; ++k) {
      const auto ch = static_cast<std::size_t>(c.first_child + k);
      const double v = mesh[c.first_child + k].volume;
      su += state.u[ch] * v;
      se += state.e[ch] * v;
      sp += state.p[ch] * v;
      sn += state.nu_t[ch] * v;
    }
    const auto i = static_cast<std::size_t>(id);
    state.u[i] = su * (1.0 / c.volume);
    state.e[i] = se / c.volume;
    state.p[i] = sp / c.volume;
    state.nu_t[i] = sn / c.volume;
  }
}

namespace {

template <class T, class G>
G green_gauss(const Mesh& mesh, const FaceTable& table, const std::vector<T>& field, const GhostRule<T>& rule,
              CellId leaf, auto&& outer) {
  G g{};
  for (const GatherEntry& ge : table.gather(leaf)) {
    const Face& f = table.faces()[ge.face];
    const T vf = (ghost_value(field, f.m1, rule) + ghost_value(field, f.p1, rule)) * 0.5;
    outer(g, vf, f.area * ge.sign);
  }
  g *= 1.0 / mesh[leaf].volume;
  return g;
}

}  // namespace

Mat3 cell_gradient(const Mesh& mesh, const FaceTable& table, const std::vector<Vec3>& field,
                   const GhostRule<Vec3>& rule, CellId leaf) {
  return green_gauss<Vec3, Mat3>(mesh, table, field, rule, leaf, [](Mat3& g, const Vec3& v, const Vec3& s) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] += v[i] * s[j];
  });
}

Vec3 cell_gradient(const Mesh& mesh, const FaceTable& table, const std::vector<double>& field,
                   const GhostRule<double>& rule, CellId leaf) {
  return green_gauss<double, Vec3>(mesh, table, field, rule, leaf,
                                   [](Vec3& g, double v, const Vec3& s) { g += s * v; });
}

void gradient_field(const Mesh& mesh, const FaceTable& table, const std::vector<Vec3>& field,
                    const GhostRule<Vec3>& rule, std::span<const CellId> cells, std::vector<Mat3>& out) {
  out.resize(mesh.size());
  for (CellId c : cells) out[static_cast<std::size_t>(c)] = cell_gradient(mesh, table, field, rule, c);
}

void gradient_field(const Mesh& mesh, const FaceTable& table, const std::vector<double>& field,
                    const GhostRule<double>& rule, std::span<const CellId> cells, std::vector<Vec3>& out) {
  out.resize(mesh.size());
  for (CellId c : cells) out[static_cast<std::size_t>(c)] = cell_gradient(mesh, table, field, rule, c);
}

Mat3 face_gradient(const Face& f, const Vec3& vm, const Vec3& vp, const Mat3& gm, const Mat3& gp) {
  Mat3 g = (gm + gp) * 0.5;
  if (f.ghost() == Ghost::wall) {
    const Vec3 n = f.area * (1.0 / norm(f.area));
    for (int i = 0; i < 3; ++i) g.set_row(i, n * dot(g.row(i), n));
  }
  const double inv_d2 = 1.0 / dot(f.d, f.d);
  for (int i = 0; i < 3; ++i) {
    const double jump = (vp[i] - vm[i]) - dot(g.row(i), f.d);
    g.set_row(i, g.row(i) + f.d * (jump * inv_d2));
  }
  return g;
}

Vec3 face_gradient(const Face& f, double vm, double vp, const Vec3& gm, const Vec3& gp) {
  const Vec3 g = (gm + gp) * 0.5;
  const double jump = (vp - vm) - dot(g, f.d);
  return g + f.d * (jump / dot(f.d, f.d));
}

namespace {

double pressure_sensor(double pm, double p0, double pp) {
  const double den = std::abs(pp) + 2.0 * std::abs(p0) + std::abs(pm);
  return den > 0.0 ? std::abs(pp - 2.0 * p0 + pm) / den : 0.0;
}

}  // namespace

JstCoefficients jst_coefficients(const Face& f, const FluidProps& props, const JstParams& jst,
                                 const std::vector<Vec3>& u, const std::vector<double>& p) {
  const GhostRules rules = solver_ghost_rules(props);
  const Vec3 uf = (ghost_value(u, f.m1, rules.u) + ghost_value(u, f.p1, rules.u)) * 0.5;
  JstCoefficients c;
  c.lambda_area = std::abs(dot(uf, f.area)) + props.sound_speed * norm(f.area);
  if (jst.kappa2 > 0.0) {
    const double pm2 = ghost_value(p, f.m2, rules.p), pm1 = ghost_value(p, f.m1, rules.p);
    const double pp1 = ghost_value(p, f.p1, rules.p), pp2 = ghost_value(p, f.p2, rules.p);
    c.eps2 = jst.kappa2 * std::max(pressure_sensor(pm2, pm1, pp1), pressure_sensor(pm1, pp1, pp2));
  }
  c.eps4 = std::max(0.0, jst.kappa4 - c.eps2);
  return c;
}

GhostRules solver_ghost_rules(const FluidProps& props) {
  GhostRules r;
  r.u = {true, props.u_inf};
  r.e = {false, props.e_inf};
  r.p = {false, props.p_inf};
  return r;
}

double face_nu_t(const Face& f, const std::vector<double>& nu_t) {
  if (f.ghost() == Ghost::wall) return 0.0;
  const GhostRule<double> mirror{false, 0.0};
  const auto interior = [&](StencilRef r) { return r.ghost == Ghost::freestream ? StencilRef{r.node} : r; };
  return 0.5 * (ghost_value(nu_t, interior(f.m1), mirror) + ghost_value(nu_t, interior(f.p1), mirror));
}

}  // namespace minles
