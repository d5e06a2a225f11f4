#include <charconv>
#include <cmath>
#include <fstream>

#include "binio.hpp"
#include "minles/io.hpp"
#include "minles/stats.hpp"

namespace minles {

void write_grid(const std::string& path, const Mesh& mesh) {
  const BaseGrid& b = mesh.base();
  detail::BinWriter w(path, "MLGRID", kGridVersion);
  for (int a = 0; a < 3; ++a) w.put<std::int32_t>(b.dims[a]);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(b.mapping));
  w.put(b.lo);
  w.put(b.hi);
  for (int a = 0; a < 3; ++a) w.put<std::uint8_t>(static_cast<std::uint8_t>(b.boundary[a]));
  w.put(b.bump.height);
  w.put(b.bump.center);
  w.put(b.bump.half_width);
  w.put(b.wall_stretch);
  w.put_vector(b.vertices);
  w.put_vector(mesh.tree_records());
  w.close();
}

Mesh read_grid(const std::string& path) {
  detail::BinReader r(path, "MLGRID", kGridVersion);
  BaseGrid b;
  for (int a = 0; a < 3; ++a) b.dims[a] = r.get<std::int32_t>();
  for (int a = 0; a < 3; ++a) {
    if (b.dims[a] < 1 || b.dims[a] > 4096) throw IoError("'" + path + "' has invalid grid dimensions");
  }
  const auto mapping = r.get<std::uint8_t>();
  if (mapping > 1) throw IoError("'" + path + "' has unknown mapping id " + std::to_string(mapping));
  b.mapping = static_cast<Mapping>(mapping);
  b.lo = r.get<Vec3>();
  b.hi = r.get<Vec3>();
  for (int a = 0; a < 3; ++a) {
    const auto bc = r.get<std::uint8_t>();
    if (bc > 2) throw IoError("'" + path + "' has unknown boundary id");
    b.boundary[a] = static_cast<Boundary>(bc);
  }
  b.bump.height = r.get<double>();
  b.bump.center = r.get<double>();
  b.bump.half_width = r.get<double>();
  b.wall_stretch = r.get<double>();
  b.vertices = r.get_vector<Vec3>();
  const std::size_t expected = static_cast<std::size_t>(b.dims[0] + 1) * (b.dims[1] + 1) * (b.dims[2] + 1);
  if (b.vertices.size() != expected) throw IoError("'" + path + "' vertex array has the wrong size");
  const auto records = r.get_vector<TreeRecord>();
  return Mesh::from_tree(std::move(b), records);
}

namespace {

void put_number(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void export_vtk(const std::string& path, const Mesh& mesh, const std::vector<NamedField>& fields) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const auto& leaves = mesh.leaves();
  const std::size_t n = leaves.size();
  out << "# vtk DataFile Version 3.0\nminles leaves\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 8 * n << " double\n";
  static constexpr int kOrder[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  for (CellId leaf : leaves) {
    for (int k : kOrder) {
      const Vec3& p = mesh[leaf].vertices[k];
      put_number(out, p.x);
      out << ' ';
      put_number(out, p.y);
      out << ' ';
      put_number(out, p.z);
      out << '\n';
    }
  }
  out << "CELLS " << n << ' ' << 9 * n << '\n';
  for (std::size_t c = 0; c < n; ++c) {
    out << 8;
    for (int k = 0; k < 8; ++k) out << ' ' << 8 * c + k;
    out << '\n';
  }
  out << "CELL_TYPES " << n << '\n';
  for (std::size_t c = 0; c < n; ++c) out << "12\n";
  if (!fields.empty()) out << "CELL_DATA " << n << '\n';
  for (const NamedField& f : fields) {
    std::vector<double> values;
    if (f.values.size() == n) values = f.values;
    else if (f.values.size() == static_cast<std::size_t>(mesh.column_count())) values = broadcast_columns(mesh, f.values);
    else throw IoError("field '" + f.name + "' matches neither the leaves nor the columns");
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) {
      put_number(out, std::isfinite(v) ? v : 0.0);
      out << '\n';
    }
  }
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace minles
