#include "minles/stats.hpp"

#include <algorithm>

#include "minles/error.hpp"

namespace minles {

RunningStats::RunningStats(std::size_t cells)
    : mean_u(cells), comoment(cells), mean_p(cells, 0.0), mean_nu_t(cells, 0.0), mean_tau_grad(cells, 0.0) {}

void RunningStats::accumulate(const StatsSample& s) {
  const std::size_t n = cells();
  if (s.u.size() != n || s.p.size() != n || s.nu_t.size() != n || s.tau_grad.size() != n) {
    throw StatsError("sample size does not match the accumulator");
  }
  if (n_samples > 0 && !(s.time > t_end)) {
    throw StatsError("snapshot at t=" + std::to_string(s.time) + " is not after t=" + std::to_string(t_end));
  }
  if (n_samples == 0) t_start = s.time;
  t_end = s.time;
  ++n_samples;
  const double w = 1.0 / static_cast<double>(n_samples);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 delta = s.u[i] - mean_u[i];
    mean_u[i] += delta * w;
    const Vec3 delta2 = s.u[i] - mean_u[i];
    const Sym3 add = Sym3::outer(delta, delta2);
    for (int k = 0; k < 6; ++k) comoment[i].v[k] += add.v[k];
    mean_p[i] += (s.p[i] - mean_p[i]) * w;
    mean_nu_t[i] += (s.nu_t[i] - mean_nu_t[i]) * w;
    mean_tau_grad[i] += (s.tau_grad[i] - mean_tau_grad[i]) * w;
  }
}

void RunningStats::merge(const RunningStats& b) {
  if (b.n_samples == 0) return;
  if (n_samples == 0) {
    *this = b;
    return;
  }
  if (b.cells() != cells()) throw StatsError("merging accumulators of different size");
  if (!(b.t_start > t_end)) throw StatsError("merged window must start after the current one ends");
  const double na = static_cast<double>(n_samples), nb = static_cast<double>(b.n_samples);
  const double n = na + nb;
  for (std::size_t i = 0; i < cells(); ++i) {
    const Vec3 delta = b.mean_u[i] - mean_u[i];
    const Sym3 cross = Sym3::outer(delta, delta);
    for (int k = 0; k < 6; ++k) comoment[i].v[k] += b.comoment[i].v[k] + cross.v[k] * (na * nb / n);
    mean_u[i] += delta * (nb / n);
    mean_p[i] += (b.mean_p[i] - mean_p[i]) * (nb / n);
    mean_nu_t[i] += (b.mean_nu_t[i] - mean_nu_t[i]) * (nb / n);
    mean_tau_grad[i] += (b.mean_tau_grad[i] - mean_tau_grad[i]) * (nb / n);
  }
  n_samples += b.n_samples;
  t_end = b.t_end;
}

Sym3 RunningStats::covariance(std::size_t i) const {
  Sym3 c = comoment[i];
  if (n_samples == 0) return c;
  for (double& v : c.v) v /= static_cast<double>(n_samples);
  return c;
}

Sym3 RunningStats::mean_uu(std::size_t i) const {
  Sym3 c = covariance(i);
  const Sym3 m = Sym3::outer(mean_u[i], mean_u[i]);
  for (int k = 0; k < 6; ++k) c.v[k] += m.v[k];
  return c;
}

std::vector<double> RunningStats::resolved_tke() const {
  if (n_samples < 2) throw StatsError("resolved TKE needs at least two samples");
  std::vector<double> k(cells());
  for (std::size_t i = 0; i < cells(); ++i) k[i] = std::max(0.0, 0.5 * covariance(i).trace());
  return k;
}

std::vector<double> spanwise_average(const Mesh& mesh, std::span<const double> leaf_field) {
  const auto& leaves = mesh.leaves();
  if (leaf_field.size() != leaves.size()) throw StatsError("field is not sized to the leaves");
  std::vector<double> sum(static_cast<std::size_t>(mesh.column_count()), 0.0);
  std::vector<double> vol(sum.size(), 0.0);
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const auto col = static_cast<std::size_t>(mesh.column_of(leaves[k]));
    const double v = mesh[leaves[k]].volume;
    sum[col] += v * leaf_field[k];
    vol[col] += v;
  }
  for (std::size_t c = 0; c < sum.size(); ++c) sum[c] /= vol[c];
  return sum;
}

std::vector<double> broadcast_columns(const Mesh& mesh, std::span<const double> column_field) {
  if (column_field.size() != static_cast<std::size_t>(mesh.column_count())) {
    throw StatsError("field is not sized to the columns");
  }
  std::vector<double> out;
  out.reserve(mesh.leaf_count());
  for (CellId leaf : mesh.leaves()) out.push_back(column_field[static_cast<std::size_t>(mesh.column_of(leaf))]);
  return out;
}

}  // namespace minles
