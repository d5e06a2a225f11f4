#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "minles/vec.hpp"

namespace minles {

using CellId = std::int32_t;
inline constexpr CellId kNoCell = -1;

enum class Mapping : std::uint8_t { cartesian = 0, bump_channel = 1 };

// Boundary treatment per axis; both sides of an axis share a kind.
enum class Boundary : std::uint8_t { periodic = 0, wall = 1, freestream = 2 };

// Smooth lower-wall bump used by the bump_channel mapping:
// b(x) = height * (1 + cos(pi (x - center) / half_width)) / 2 inside the support.
struct BumpShape {
  double height = 0.0;
  double center = 0.0;
  double half_width = 1.0;
};

struct GridConfig {
  std::array<int, 3> dims{4, 4, 1};
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{1.0, 1.0, 1.0};
  Mapping mapping = Mapping::cartesian;
  BumpShape bump;
  // tanh clustering of the y coordinate toward both y boundaries; 0 keeps it uniform.
  double wall_stretch = 0.0;
  std::array<Boundary, 3> boundary{Boundary::periodic, Boundary::periodic, Boundary::periodic};
};

struct BaseGrid {
  std::array<int, 3> dims{};
  std::vector<Vec3> vertices;  // (nx+1)(ny+1)(nz+1), x fastest
  Mapping mapping = Mapping::cartesian;
  Vec3 lo;
  Vec3 hi;
  std::array<Boundary, 3> boundary{};
  BumpShape bump;
  double wall_stretch = 0.0;

  std::size_t vertex_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0] + 1) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1] + 1) * static_cast<std::size_t>(k));
  }
  const Vec3& vertex(int i, int j, int k) const { return vertices[vertex_index(i, j, k)]; }
  int cell_count() const { return dims[0] * dims[1] * dims[2]; }
  bool two_d() const { return dims[2] == 1; }
  // Translation that maps the minus boundary of a periodic axis onto the plus one.
  Vec3 period(int axis) const { return unit(axis) * (hi[axis] - lo[axis]); }
  double bump_height_at(double x) const;
};

struct OctCell {
  int level = 0;
  CellId parent = kNoCell;
  CellId first_child = kNoCell;
  // Same-level node across each face (direction 2*axis + side), else the coarser leaf
  // covering that position, kNoCell at non-periodic boundaries.
  std::array<CellId, 6> neighbors{kNoCell, kNoCell, kNoCell, kNoCell, kNoCell, kNoCell};
  std::array<int, 3> index{};      // integer position in the level's index space
  std::array<Vec3, 8> vertices{};  // corner with offset bits (a,b,c) stored at a + 2b + 4c
  double volume = 0.0;
  Vec3 centroid;

  bool is_leaf() const { return first_child == kNoCell; }
};

struct CellScale {
  double h = 0.0;             // V^(1/3)
  double filter_width = 0.0;  // c_filter * h
};

enum class NeighborKind : std::uint8_t { same, finer, coarser, boundary };

struct NeighborInfo {
  NeighborKind kind = NeighborKind::boundary;
  std::vector<CellId> ids;
};

struct MeshDelta {
  std::vector<CellId> requested;
  std::vector<CellId> closure;  // extra cells refined to restore 2:1 balance
  CellId first_new = kNoCell;
  std::size_t leaves_before = 0;
  std::size_t leaves_after = 0;
};

enum class Ghost : std::uint8_t { none = 0, wall = 1, freestream = 2 };

struct Located {
  CellId node = kNoCell;
  Ghost ghost = Ghost::none;
};

// Serialized form of one tree node; geometry is regenerated from the base grid.
struct TreeRecord {
  int level = 0;
  CellId parent = kNoCell;
  CellId first_child = kNoCell;
  std::array<int, 3> index{};
};

class Mesh {
 public:
  Mesh() = default;

  static Mesh from_base(BaseGrid base);
  static Mesh from_tree(BaseGrid base, const std::vector<TreeRecord>& records);

  const BaseGrid& base() const { return base_; }
  std::size_t size() const { return cells_.size(); }
  const OctCell& operator[](CellId id) const { return cells_[static_cast<std::size_t>(id)]; }
  const std::vector<OctCell>& cells() const { return cells_; }
  const std::vector<CellId>& leaves() const { return leaves_; }
  std::size_t leaf_count() const { return leaves_.size(); }
  bool is_leaf(CellId id) const { return cells_[static_cast<std::size_t>(id)].is_leaf(); }
  int max_level() const { return max_level_; }
  bool two_d() const { return base_.two_d(); }
  int child_count() const { return two_d() ? 4 : 8; }
  int extent(int level, int axis) const;
  std::vector<TreeRecord> tree_records() const;

  CellId find(int level, const std::array<int, 3>& index) const;
  // Node covering the level-`level` position `index`: the exact node when it exists,
  // otherwise the coarser leaf containing it. Out-of-domain positions wrap on periodic
  // axes and mirror back into the domain (flagged as ghosts) on the others.
  Located locate(int level, std::array<int, 3> index) const;

  // Transitive set of extra leaves that must be refined with `targets` to keep 2:1 face balance.
  std::vector<CellId> balance_closure(std::span<const CellId> targets) const;
  MeshDelta refine(std::span<const CellId> targets);

  std::array<NeighborInfo, 6> leaf_neighbors(CellId leaf) const;
  CellScale cell_length_scale(CellId id, double c_filter = 1.0) const;

  // Outward area vector and centre of face `dir` (= 2*axis + side) of a cell.
  Vec3 face_area(CellId id, int dir) const;
  Vec3 face_center(CellId id, int dir) const;

  int column_of(CellId id) const;
  int column_count() const { return base_.dims[0] * base_.dims[1]; }
  double leaf_volume() const;

 private:
  static std::uint64_t key(int level, const std::array<int, 3>& index);
  void add_cell(OctCell cell);
  void rebuild_connectivity();

  BaseGrid base_;
  std::vector<OctCell> cells_;
  std::vector<CellId> leaves_;
  std::unordered_map<std::uint64_t, CellId> lookup_;
  int max_level_ = 0;
};

BaseGrid build_base_grid(const GridConfig& config);
Mesh build_grid(const GridConfig& config);

// Exact volume and centroid of a trilinear hexahedron.
void hex_volume_centroid(const std::array<Vec3, 8>& v, double& volume, Vec3& centroid);
Vec3 trilinear(const std::array<Vec3, 8>& v, double xi, double eta, double zeta);

}  // namespace minles
