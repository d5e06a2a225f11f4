#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "minles/solver.hpp"
#include "minles/stats.hpp"

namespace minles {

// Kinetic-energy budget per unit volume, leaf order. With every term on the
// left-hand side the equation reads sum(terms) + eps_n = 0.
struct KeBudget {
  static constexpr std::size_t kTerms = 7;
  static constexpr std::array<std::string_view, kTerms> kNames{"e_kin_t", "F_ekin", "F_ac", "F_nu",
                                                                 "eps_nu", "forcing", "eps_n"};
  std::vector<double> e_kin_t, F_ekin, F_ac, F_nu, eps_nu, forcing, eps_n;

  std::array<std::vector<double>*, kTerms> terms() {
    return {&e_kin_t, &F_ekin, &F_ac, &F_nu, &eps_nu, &forcing, &eps_n};
  }
  // Residual closure of cell i from the stored terms.
  double closure(std::size_t i) const {
    return -(e_kin_t[i] + F_ekin[i] + F_ac[i] + F_nu[i] + eps_nu[i] + forcing[i]);
  }
};

// Resolved turbulent kinetic energy budget per unit mass, leaf order.
struct TkeBudget {
  static constexpr std::size_t kTerms = 8;
  static constexpr std::array<std::string_view, kTerms> kNames{"k_t", "F_k", "F_ac", "F_nu",
                                                                 "P", "eps_nu", "eps_inter", "eps_n"};
  std::vector<double> k_t, F_k, F_ac, F_nu, P, eps_nu, eps_inter, eps_n;

  std::array<std::vector<double>*, kTerms> terms() { return {&k_t, &F_k, &F_ac, &F_nu, &P, &eps_nu, &eps_inter, &eps_n}; }
  double closure(std::size_t i) const {
    return -(k_t[i] + F_k[i] + F_ac[i] + F_nu[i] + P[i] + eps_nu[i] + eps_inter[i]);
  }
};

// tau_ij g_ij with tau = g + g^T.
double tau_grad(const Mat3& g);

// Time derivative by central difference over the triplet; spatial terms use the
// middle state and the solver's face kernels. body_force is the streamwise forcing
// active around the middle state.
KeBudget ke_budget(const Solver& solver, const FlowState& prev, const FlowState& mid, const FlowState& next,
                   double body_force = 0.0);

// Fluctuations are taken about the frozen means in `stats` (leaf order).
TkeBudget tke_budget(const Solver& solver, const FlowState& prev, const FlowState& mid, const FlowState& next,
                     const RunningStats& stats);

struct MeanDissipation {
  std::vector<double> eps_bar;      // per column
  std::vector<double> eps_bar_pos;  // max(eps_bar, 0)
};

// Time mean of each leaf's samples followed by the spanwise volume-weighted mean.
MeanDissipation mean_dissipation(const Mesh& mesh, const std::vector<std::vector<double>>& samples);
MeanDissipation mean_dissipation_from_mean(const Mesh& mesh, std::span<const double> leaf_mean);

struct StrainDenominator {
  std::vector<double> value;     // per column
  std::vector<bool> flagged;     // value below the floor
};
StrainDenominator strain_dissipation_denominator(const RunningStats& stats, const Mesh& mesh, double floor = 1e-12);

// Running means of budget terms over the replayed triplets.
struct BudgetMeans {
  std::size_t ke_samples = 0;
  std::size_t tke_samples = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::array<std::vector<double>, KeBudget::kTerms> ke;
  std::array<std::vector<double>, TkeBudget::kTerms> tke;

  void add(KeBudget& b);
  void add(TkeBudget& b);
};

}  // namespace minles
