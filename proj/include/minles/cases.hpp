#pragma once

#include "minles/config.hpp"
#include "minles/discretization.hpp"

namespace minles {

// Unit-wavenumber Taylor-Green vortex in the x-y plane and its steady Euler pressure.
Vec3 tgv2d_velocity(const Vec3& x, double u0 = 1.0);
double tgv2d_pressure(const Vec3& x, double rho = 1.0, double u0 = 1.0);
Vec3 tgv3d_velocity(const Vec3& x, double u0 = 1.0);
double tgv3d_pressure(const Vec3& x, double rho = 1.0, double u0 = 1.0);

Mesh build_case_mesh(const RunConfig& config);
// Leaf values at cell centroids, internal nodes restricted; nu_t left at zero.
FlowState initial_state(const RunConfig& config, const Mesh& mesh);

// Total energy per unit mass for velocity u; internal energy is held at 1.
inline double total_energy(const Vec3& u) { return 0.5 * dot(u, u) + 1.0; }

}  // namespace minles
