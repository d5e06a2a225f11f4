#include "minles/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "minles/error.hpp"

namespace minles {

namespace {

constexpr int kBits = 18;
constexpr int kMaxIndex = 1 << kBits;

double stretch(double s, double beta) {
  if (beta <= 0.0) return s;
  return 0.5 * (1.0 + std::tanh(beta * (2.0 * s - 1.0)) / std::tanh(beta));
}

int offset_bit(int child, int axis, bool two_d) {
  if (axis == 2 && two_d) return 0;
  return (child >> axis) & 1;
}

}  // namespace

double BaseGrid::bump_height_at(double x) const {
  if (mapping != Mapping::bump_channel || bump.height == 0.0) return 0.0;
  const double length = hi.x - lo.x;
  double dx = x - bump.center;
  dx -= length * std::round(dx / length);
  if (std::abs(dx) >= bump.half_width) return 0.0;
  return bump.height * 0.5 * (1.0 + std::cos(std::numbers::pi * dx / bump.half_width));
}

Vec3 trilinear(const std::array<Vec3, 8>& v, double xi, double eta, double zeta) {
  Vec3 p;
  for (int c = 0; c < 8; ++c) {
    const double w = ((c & 1) ? xi : 1.0 - xi) * ((c & 2) ? eta : 1.0 - eta) * ((c & 4) ? zeta : 1.0 - zeta);
    p += v[c] * w;
  }
  return p;
}

void hex_volume_centroid(const std::array<Vec3, 8>& v, double& volume, Vec3& centroid) {
  // det J of a trilinear map is at most quadratic per reference direction, so a
  // 2-point Gauss rule per direction integrates volume and first moments exactly.
  const double g = 0.5 / std::sqrt(3.0);
  const double pts[2] = {0.5 - g, 0.5 + g};
  volume = 0.0;
  Vec3 moment;
  for (double xi : pts) {
    for (double eta : pts) {
      for (double zeta : pts) {
        Vec3 dxi, deta, dzeta;
        for (int c = 0; c < 8; ++c) {
          const double a = (c & 1) ? xi : 1.0 - xi, sa = (c & 1) ? 1.0 : -1.0;
          const double b = (c & 2) ? eta : 1.0 - eta, sb = (c & 2) ? 1.0 : -1.0;
          const double d = (c & 4) ? zeta : 1.0 - zeta, sd = (c & 4) ? 1.0 : -1.0;
          dxi += v[c] * (sa * b * d);
          deta += v[c] * (a * sb * d);
          dzeta += v[c] * (a * b * sd);
        }
        const double det = dot(dxi, cross(deta, dzeta));
        if (!(det > 0.0)) {
          throw MeshError("degenerate or inverted cell (non-positive Jacobian)");
        }
        const double w = 0.125 * det;
        volume += w;
        moment += trilinear(v, xi, eta, zeta) * w;
      }
    }
  }
  centroid = moment * (1.0 / volume);
}

BaseGrid build_base_grid(const GridConfig& config) {
  BaseGrid base;
  base.dims = config.dims;
  base.mapping = config.mapping;
  base.lo = config.lo;
  base.hi = config.hi;
  base.boundary = config.boundary;
  base.bump = config.bump;
  base.wall_stretch = config.wall_stretch;

  for (int a = 0; a < 3; ++a) {
    if (!(config.hi[a] - config.lo[a] > 0.0)) {
      std::ostringstream msg;
      msg << "non-positive extent along axis " << a;
      throw ConfigError(msg.str());
    }
  }
  if (config.dims[0] < 2 || config.dims[1] < 2 || config.dims[2] < 1) {
    throw ConfigError("grid dims must be >= 2 on x and y and >= 1 on z");
  }
  for (int a = 0; a < 3; ++a) {
    if (config.dims[a] >= kMaxIndex / 64) throw ConfigError("grid dims too large");
  }
  if (config.dims[2] == 1) base.boundary[2] = Boundary::periodic;
  if (config.mapping == Mapping::bump_channel) {
    if (config.boundary[1] == Boundary::periodic) {
      throw ConfigError("bump_channel mapping requires non-periodic y boundaries");
    }
    if (config.bump.height < 0.0 || config.bump.height >= config.hi.y - config.lo.y) {
      throw ConfigError("bump height must lie in [0, channel height)");
    }
    if (!(config.bump.half_width > 0.0)) throw ConfigError("bump half_width must be positive");
  }
  if (config.wall_stretch < 0.0) throw ConfigError("wall_stretch must be >= 0");

  const auto [nx, ny, nz] = config.dims;
  base.vertices.resize(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  const Vec3 length = config.hi - config.lo;
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        const double x = config.lo.x + length.x * i / nx;
        const double eta = stretch(static_cast<double>(j) / ny, config.wall_stretch);
        double y = config.lo.y + length.y * eta;
        if (config.mapping == Mapping::bump_channel) {
          const double b = base.bump_height_at(x);
          y = config.lo.y + b + eta * (length.y - b);
        }
        const double z = config.lo.z + length.z * k / nz;
        base.vertices[base.vertex_index(i, j, k)] = {x, y, z};
      }
    }
  }
  return base;
}

Mesh build_grid(const GridConfig& config) { return Mesh::from_base(build_base_grid(config)); }

std::uint64_t Mesh::key(int level, const std::array<int, 3>& index) {
  return (static_cast<std::uint64_t>(level) << (3 * kBits)) |
         (static_cast<std::uint64_t>(index[0]) << (2 * kBits)) |
         (static_cast<std::uint64_t>(index[1]) << kBits) | static_cast<std::uint64_t>(index[2]);
}

void Mesh::add_cell(OctCell cell) {
  hex_volume_centroid(cell.vertices, cell.volume, cell.centroid);
  lookup_.emplace(key(cell.level, cell.index), static_cast<CellId>(cells_.size()));
  max_level_ = std::max(max_level_, cell.level);
  cells_.push_back(cell);
}

Mesh Mesh::from_base(BaseGrid base) {
  Mesh mesh;
  mesh.base_ = std::move(base);
  const auto [nx, ny, nz] = mesh.base_.dims;
  mesh.cells_.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        OctCell cell;
        cell.index = {i, j, k};
        for (int c = 0; c < 8; ++c) {
          cell.vertices[c] = mesh.base_.vertex(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
        }
        mesh.add_cell(cell);
      }
    }
  }
  mesh.rebuild_connectivity();
  return mesh;
}

namespace {

OctCell make_child(const OctCell& parent, CellId parent_id, int child, bool two_d) {
  OctCell c;
  c.level = parent.level + 1;
  c.parent = parent_id;
  const int a = offset_bit(child, 0, two_d);
  const int b = offset_bit(child, 1, two_d);
  const int d = offset_bit(child, 2, two_d);
  c.index = {2 * parent.index[0] + a, 2 * parent.index[1] + b, two_d ? parent.index[2] : 2 * parent.index[2] + d};
  for (int corner = 0; corner < 8; ++corner) {
    const int ca = corner & 1, cb = (corner >> 1) & 1, cd = (corner >> 2) & 1;
    const double zeta = two_d ? static_cast<double>(cd) : 0.5 * (d + cd);
    c.vertices[corner] = trilinear(parent.vertices, 0.5 * (a + ca), 0.5 * (b + cb), zeta);
  }
  return c;
}

}  // namespace

Mesh Mesh::from_tree(BaseGrid base, const std::vector<TreeRecord>& records) {
  Mesh mesh = from_base(std::move(base));
  const std::size_t n_base = mesh.cells_.size();
  if (records.size() < n_base) throw MeshError("tree table shorter than base grid");
  for (std::size_t id = 0; id < n_base; ++id) {
    const TreeRecord& r = records[id];
    if (r.level != 0 || r.parent != kNoCell || r.index != mesh.cells_[id].index) {
      throw MeshError("tree table does not match base grid");
    }
  }
  const bool two_d = mesh.two_d();
  const int nchild = mesh.child_count();
  for (std::size_t id = 0; id < records.size(); ++id) {
    const TreeRecord& r = records[id];
    if (r.first_child == kNoCell) continue;
    if (static_cast<std::size_t>(r.first_child) != mesh.cells_.size() ||
        r.first_child + nchild > static_cast<CellId>(records.size())) {
      throw MeshError("tree table children are not contiguous");
    }
    mesh.cells_[id].first_child = r.first_child;
    const OctCell parent = mesh.cells_[id];
    for (int c = 0; c < nchild; ++c) {
      OctCell child = make_child(parent, static_cast<CellId>(id), c, two_d);
      const TreeRecord& cr = records[static_cast<std::size_t>(r.first_child + c)];
      if (cr.parent != static_cast<CellId>(id) || cr.level != child.level || cr.index != child.index) {
        throw MeshError("tree table child record inconsistent with parent");
      }
      mesh.add_cell(child);
    }
  }
  if (mesh.cells_.size() != records.size()) throw MeshError("tree table has orphan records");
  mesh.rebuild_connectivity();
  return mesh;
}

std::vector<TreeRecord> Mesh::tree_records() const {
  std::vector<TreeRecord> out;
  out.reserve(cells_.size());
  for (const OctCell& c : cells_) out.push_back({c.level, c.parent, c.first_child, c.index});
  return out;
}

int Mesh::extent(int level, int axis) const {
  if (axis == 2 && two_d()) return 1;
  return base_.dims[axis] << level;
}

CellId Mesh::find(int level, const std::array<int, 3>& index) const {
  const auto it = lookup_.find(key(level, index));
  return it == lookup_.end() ? kNoCell : it->second;
}

Located Mesh::locate(int level, std::array<int, 3> index) const {
  Located out;
  for (int a = 0; a < 3; ++a) {
    const int n = extent(level, a);
    if (index[a] >= 0 && index[a] < n) continue;
    if (base_.boundary[a] == Boundary::periodic) {
      index[a] = ((index[a] % n) + n) % n;
    } else {
      index[a] = index[a] < 0 ? -1 - index[a] : 2 * n - 1 - index[a];
      index[a] = std::clamp(index[a], 0, n - 1);
      out.ghost = base_.boundary[a] == Boundary::wall ? Ghost::wall : Ghost::freestream;
    }
  }
  for (int l = level; l >= 0; --l) {
    const CellId id = find(l, index);
    if (id != kNoCell) {
      out.node = id;
      return out;
    }
    index[0] >>= 1;
    index[1] >>= 1;
    if (!two_d()) index[2] >>= 1;
  }
  throw MeshError("locate: position outside the tree");
}

void Mesh::rebuild_connectivity() {
  leaves_.clear();
  for (std::size_t id = 0; id < cells_.size(); ++id) {
    OctCell& c = cells_[id];
    if (c.is_leaf()) leaves_.push_back(static_cast<CellId>(id));
    for (int dir = 0; dir < 6; ++dir) {
      const int axis = dir / 2;
      std::array<int, 3> idx = c.index;
      idx[axis] += (dir % 2) ? 1 : -1;
      const Located loc = locate(c.level, idx);
      c.neighbors[dir] = loc.ghost == Ghost::none ? loc.node : kNoCell;
    }
  }
}

std::vector<CellId> Mesh::balance_closure(std::span<const CellId> targets) const {
  std::set<CellId> marked(targets.begin(), targets.end());
  std::vector<CellId> work(targets.begin(), targets.end());
  std::vector<CellId> extra;
  while (!work.empty()) {
    const CellId id = work.back();
    work.pop_back();
    const OctCell& c = (*this)[id];
    for (int dir = 0; dir < 6; ++dir) {
      if (dir / 2 == 2 && two_d()) continue;
      std::array<int, 3> idx = c.index;
      idx[dir / 2] += (dir % 2) ? 1 : -1;
      const Located loc = locate(c.level, idx);
      if (loc.ghost != Ghost::none) continue;
      const OctCell& n = (*this)[loc.node];
      if (n.level < c.level && n.is_leaf() && marked.insert(loc.node).second) {
        extra.push_back(loc.node);
        work.push_back(loc.node);
      }
    }
  }
  std::sort(extra.begin(), extra.end());
  return extra;
}

MeshDelta Mesh::refine(std::span<const CellId> targets) {
  MeshDelta delta;
  delta.requested.assign(targets.begin(), targets.end());
  delta.leaves_before = leaves_.size();
  for (CellId id : targets) {
    if (id < 0 || static_cast<std::size_t>(id) >= cells_.size()) {
      throw TreeError("refine: cell id " + std::to_string(id) + " out of range");
    }
    if (!cells_[static_cast<std::size_t>(id)].is_leaf()) {
      throw TreeError("refine: cell " + std::to_string(id) + " is not a leaf");
    }
  }
  delta.closure = balance_closure(targets);

  std::vector<CellId> order(targets.begin(), targets.end());
  order.insert(order.end(), delta.closure.begin(), delta.closure.end());
  std::sort(order.begin(), order.end(), [this](CellId a, CellId b) {
    const int la = (*this)[a].level, lb = (*this)[b].level;
    return la != lb ? la < lb : a < b;
  });
  order.erase(std::unique(order.begin(), order.end()), order.end());

  delta.first_new = static_cast<CellId>(cells_.size());
  const bool two_d_mode = two_d();
  const int nchild = child_count();
  for (CellId id : order) {
    const auto first = static_cast<CellId>(cells_.size());
    cells_[static_cast<std::size_t>(id)].first_child = first;
    const OctCell parent = cells_[static_cast<std::size_t>(id)];
    for (int c = 0; c < nchild; ++c) add_cell(make_child(parent, id, c, two_d_mode));
  }
  rebuild_connectivity();
  delta.leaves_after = leaves_.size();
  return delta;
}

std::array<NeighborInfo, 6> Mesh::leaf_neighbors(CellId leaf) const {
  const OctCell& c = (*this)[leaf];
  std::array<NeighborInfo, 6> out;
  for (int dir = 0; dir < 6; ++dir) {
    const int axis = dir / 2;
    const int side = dir % 2;
    std::array<int, 3> idx = c.index;
    idx[axis] += side ? 1 : -1;
    const Located loc = locate(c.level, idx);
    NeighborInfo& info = out[dir];
    if (loc.ghost != Ghost::none) {
      info.kind = NeighborKind::boundary;
      continue;
    }
    const OctCell& n = (*this)[loc.node];
    if (n.level < c.level) {
      info.kind = NeighborKind::coarser;
      info.ids.push_back(loc.node);
    } else if (n.is_leaf()) {
      info.kind = NeighborKind::same;
      info.ids.push_back(loc.node);
    } else {
      info.kind = NeighborKind::finer;
      const int near_bit = side ? 0 : 1;
      for (int ch = 0; ch < child_count(); ++ch) {
        if (offset_bit(ch, axis, two_d()) == near_bit || (axis == 2 && two_d())) {
          info.ids.push_back(n.first_child + ch);
        }
      }
    }
  }
  return out;
}

CellScale Mesh::cell_length_scale(CellId id, double c_filter) const {
  const double h = std::cbrt((*this)[id].volume);
  return {h, c_filter * h};
}

namespace {

std::array<Vec3, 4> face_corners(const OctCell& c, int dir) {
  const int axis = dir / 2, side = dir % 2;
  const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
  auto corner = [&](int u, int v) {
    int bits = side << axis;
    bits |= u << t1;
    bits |= v << t2;
    return c.vertices[bits];
  };
  return {corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)};
}

}  // namespace

Vec3 Mesh::face_area(CellId id, int dir) const {
  const auto p = face_corners((*this)[id], dir);
  // p = {p00, p10, p11, p01}; the diagonal cross product is exact for bilinear faces.
  const Vec3 s = cross(p[2] - p[0], p[3] - p[1]) * 0.5;
  return (dir % 2) ? s : -s;
}

Vec3 Mesh::face_center(CellId id, int dir) const {
  const auto p = face_corners((*this)[id], dir);
  return (p[0] + p[1] + p[2] + p[3]) * 0.25;
}

int Mesh::column_of(CellId id) const {
  const OctCell& c = (*this)[id];
  return (c.index[0] >> c.level) + base_.dims[0] * (c.index[1] >> c.level);
}

double Mesh::leaf_volume() const {
  double v = 0.0;
  for (CellId id : leaves_) v += (*this)[id].volume;
  return v;
}

}  // namespace minles
