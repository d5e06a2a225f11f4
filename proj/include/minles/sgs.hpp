#pragma once

#include <span>
#include <vector>

#include "minles/discretization.hpp"

namespace minles {

enum class SgsModel { none, wale };

inline constexpr double kWaleConstant = 0.325;

// WALE eddy viscosity for velocity gradient g (g[i][j] = du_i/dx_j) and cell
// length scale h = V^(1/3); the model length is c_w * h.
double wale_nu_t(const Mat3& g, double h, double c_w = kWaleConstant);

// Strain-rate tensor (g + g^T)/2.
Mat3 strain_rate(const Mat3& g);

// Fills state.nu_t on `cells` from their gradients.
void update_eddy_viscosity(const Mesh& mesh, SgsModel model, double c_w, std::span<const CellId> cells,
                           const std::vector<Mat3>& grad_u, FlowState& state);

}  // namespace minles
