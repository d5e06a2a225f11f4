#pragma once

#include <string>
#include <utility>
#include <vector>

#include "minles/adapt.hpp"
#include "minles/budget.hpp"
#include "minles/discretization.hpp"
#include "minles/stats.hpp"

namespace minles {

inline constexpr std::uint32_t kGridVersion = 1;
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::uint32_t kStatsVersion = 1;
inline constexpr std::uint32_t kBudgetVersion = 1;
inline constexpr int kPlanVersion = 1;

void write_grid(const std::string& path, const Mesh& mesh);
Mesh read_grid(const std::string& path);

struct SnapshotMeta {
  std::uint64_t step = 0;
  double body_force = 0.0;
};
// Leaf values only; internal nodes are restored by restriction on load.
void write_snapshot(const std::string& path, const Mesh& mesh, const FlowState& state, const SnapshotMeta& meta = {});
FlowState read_snapshot(const std::string& path, const Mesh& mesh, SnapshotMeta* meta = nullptr);

void write_stats(const std::string& path, const RunningStats& stats);
RunningStats read_stats(const std::string& path);

void write_budget(const std::string& path, const BudgetMeans& means);
BudgetMeans read_budget(const std::string& path);

void write_plan(const std::string& path, const AdaptPlan& plan, const MeshDelta* delta = nullptr);
AdaptPlan read_plan(const std::string& path);

struct NamedField {
  std::string name;
  std::vector<double> values;  // leaf order, or one value per (i,j) column
};

// Legacy ASCII unstructured grid of the leaves as hexahedra with cell data.
void export_vtk(const std::string& path, const Mesh& mesh, const std::vector<NamedField>& fields);

// Writes a header row and rows of numbers; NaN entries are written as NA.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& text);

}  // namespace minles
