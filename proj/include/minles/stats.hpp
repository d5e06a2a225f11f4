#pragma once

#include <span>
#include <vector>

#include "minles/mesh.hpp"

namespace minles {

// One sample of the per-leaf quantities that enter the time averages; arrays are
// in mesh leaf order.
struct StatsSample {
  double time = 0.0;
  std::vector<Vec3> u;
  std::vector<double> p;
  std::vector<double> nu_t;
  std::vector<double> tau_grad;  // tau_ij du_i/dx_j with tau = grad u + grad u^T
};

// Welford accumulators over a time window; co-moments are kept as sums of
// products of deviations so that windows merge exactly (Chan et al.).
class RunningStats {
 public:
  RunningStats() = default;
  explicit RunningStats(std::size_t cells);

  void accumulate(const StatsSample& sample);
  // Combine with a window that starts after this one ends.
  void merge(const RunningStats& later);

  std::size_t cells() const { return mean_u.size(); }
  // Population covariance of u at cell i.
  Sym3 covariance(std::size_t i) const;
  // Time mean of u_i u_j at cell i.
  Sym3 mean_uu(std::size_t i) const;
  // Half the trace of the covariance; needs two samples.
  std::vector<double> resolved_tke() const;

  std::size_t n_samples = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<Vec3> mean_u;
  std::vector<Sym3> comoment;
  std::vector<double> mean_p;
  std::vector<double> mean_nu_t;
  std::vector<double> mean_tau_grad;
};

// Volume-weighted mean over each base-grid (i,j) column of a leaf-ordered field.
std::vector<double> spanwise_average(const Mesh& mesh, std::span<const double> leaf_field);
// Broadcast of a column field back onto leaves.
std::vector<double> broadcast_columns(const Mesh& mesh, std::span<const double> column_field);

}  // namespace minles
