#include "minles/sgs.hpp"

#include <algorithm>
#include <cmath>

namespace minles {

Mat3 strain_rate(const Mat3& g) { return (g + g.transposed()) * 0.5; }

double wale_nu_t(const Mat3& g, double h, double c_w) {
  const Mat3 s = strain_rate(g);
  const Mat3 g2 = matmul(g, g);
  const double trace = (g2[0][0] + g2[1][1] + g2[2][2]) / 3.0;
  Mat3 sd = strain_rate(g2);
  for (int i = 0; i < 3; ++i) sd[i][i] -= trace;
  const double ss = ddot(s, s);
  const double sdsd = ddot(sd, sd);
  const double den = std::pow(ss, 2.5) + std::pow(sdsd, 1.25);
  if (!(den > 0.0)) return 0.0;
  const double ls = c_w * h;
  return std::max(0.0, ls * ls * std::pow(sdsd, 1.5) / den);
}

void update_eddy_viscosity(const Mesh& mesh, SgsModel model, double c_w, std::span<const CellId> cells,
                           const std::vector<Mat3>& grad_u, FlowState& state) {
  for (CellId c : cells) {
    const auto i = static_cast<std::size_t>(c);
    state.nu_t[i] = model == SgsModel::wale ? wale_nu_t(grad_u[i], mesh.cell_length_scale(c).h, c_w) : 0.0;
  }
}

}  // namespace minles
