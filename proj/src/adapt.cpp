#include "minles/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "minles/error.hpp"

namespace minles {

AdaptPlan flag_worst(const Mesh& mesh, std::span<const double> iq, double fraction, EstimatorId estimator) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("refinement fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  const auto& leaves = mesh.leaves();
  if (iq.size() != leaves.size()) throw ConfigError("quality field is not sized to the leaves");
  std::vector<std::size_t> order(leaves.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(leaves.size())));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (iq[a] != iq[b]) return iq[a] < iq[b];
                      return leaves[a] < leaves[b];
                    });
  AdaptPlan plan;
  plan.fraction = fraction;
  plan.estimator = estimator;
  plan.leaf_count = leaves.size();
  plan.flagged.reserve(count);
  for (std::size_t k = 0; k < count; ++k) plan.flagged.push_back(leaves[order[k]]);
  std::sort(plan.flagged.begin(), plan.flagged.end());
  return plan;
}

AdaptedGrid apply_plan(const AdaptPlan& plan, const Mesh& mesh, const FlowState& state) {
  AdaptedGrid out{mesh, {}, {}};
  out.delta = out.mesh.refine(plan.flagged);
  const std::size_t n = out.mesh.size();
  FlowState& s = out.state;
  s = state;
  s.u.resize(n);
  s.e.resize(n);
  s.p.resize(n);
  s.nu_t.resize(n);
  for (std::size_t id = mesh.size(); id < n; ++id) {
    const auto parent = static_cast<std::size_t>(out.mesh[static_cast<CellId>(id)].parent);
    s.u[id] = s.u[parent];
    s.e[id] = s.e[parent];
    s.p[id] = s.p[parent];
    s.nu_t[id] = s.nu_t[parent];
  }
  return out;
}

}  // namespace minles
