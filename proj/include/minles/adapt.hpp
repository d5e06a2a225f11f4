#pragma once

#include <span>
#include <vector>

#include "minles/discretization.hpp"
#include "minles/estimators.hpp"

namespace minles {

struct AdaptPlan {
  std::vector<CellId> flagged;  // ascending ids
  double fraction = 0.05;
  EstimatorId estimator;
  std::size_t leaf_count = 0;
};

// Lowest-quality round(fraction * N) leaves; ties go to the lower id. iq is in leaf order.
AdaptPlan flag_worst(const Mesh& mesh, std::span<const double> iq, double fraction, EstimatorId estimator = {});

struct AdaptedGrid {
  Mesh mesh;
  FlowState state;
  MeshDelta delta;
};

// Refines the flagged leaves (plus 2:1 closure) and copies each parent's state
// into its children.
AdaptedGrid apply_plan(const AdaptPlan& plan, const Mesh& mesh, const FlowState& state);

}  // namespace minles
