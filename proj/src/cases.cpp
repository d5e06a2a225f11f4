#include "minles/cases.hpp"

#include <cmath>
#include <random>

#include "minles/io.hpp"

namespace minles {

Vec3 tgv2d_velocity(const Vec3& x, double u0) {
  return {u0 * std::sin(x.x) * std::cos(x.y), -u0 * std::cos(x.x) * std::sin(x.y), 0.0};
}

double tgv2d_pressure(const Vec3& x, double rho, double u0) {
  return 0.25 * rho * u0 * u0 * (std::cos(2.0 * x.x) + std::cos(2.0 * x.y));
}

Vec3 tgv3d_velocity(const Vec3& x, double u0) {
  return {u0 * std::sin(x.x) * std::cos(x.y) * std::cos(x.z), -u0 * std::cos(x.x) * std::sin(x.y) * std::cos(x.z),
          0.0};
}

double tgv3d_pressure(const Vec3& x, double rho, double u0) {
  return rho * u0 * u0 / 16.0 * (std::cos(2.0 * x.x) + std::cos(2.0 * x.y)) * (std::cos(2.0 * x.z) + 2.0);
}

Mesh build_case_mesh(const RunConfig& config) {
  if (config.kind == CaseKind::custom_grid_file) return read_grid(config.grid_file);
  return build_grid(config.grid);
}

namespace {

double unit_noise(std::mt19937_64& rng) {
  // Portable mapping of 53 random bits onto [-1, 1).
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

FlowState initial_state(const RunConfig& config, const Mesh& mesh) {
  FlowState s;
  s.resize(mesh.size());
  std::mt19937_64 rng(config.seed);
  const double u0 = config.u_ref;
  const double rho = config.fluid.rho;
  for (CellId leaf : mesh.leaves()) {
    const auto i = static_cast<std::size_t>(leaf);
    const Vec3& x = mesh[leaf].centroid;
    Vec3 u;
    double p = 0.0;
    switch (config.kind) {
      case CaseKind::tgv2d:
        u = tgv2d_velocity(x, u0);
        p = tgv2d_pressure(x, rho, u0);
        break;
      case CaseKind::tgv3d:
        u = tgv3d_velocity(x, u0);
        p = tgv3d_pressure(x, rho, u0);
        break;
      case CaseKind::bump_channel:
      case CaseKind::custom_grid_file:
        u = Vec3{config.scheme.forcing.enabled ? config.scheme.forcing.target_bulk : u0, 0.0, 0.0};
        break;
    }
    if (config.perturbation > 0.0) {
      const double a = config.perturbation * u0;
      const Vec3 n{unit_noise(rng), unit_noise(rng), mesh.two_d() ? 0.0 : unit_noise(rng)};
      u += n * a;
    }
    s.u[i] = u;
    s.p[i] = p;
    s.e[i] = total_energy(u);
  }
  restrict_state(mesh, s);
  return s;
}

}  // namespace minles
