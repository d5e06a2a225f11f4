#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace minles {

enum class Family { nu = 0, eta = 1, k = 2 };
enum class Method { emp = 0, ke = 1, tke = 2 };

struct EstimatorId {
  Family family = Family::k;
  Method method = Method::tke;

  std::string name() const;  // e.g. "iq_k_tke"
  static std::optional<EstimatorId> parse(const std::string& name);
  friend bool operator==(const EstimatorId&, const EstimatorId&) = default;
};

const char* to_string(Family f);
const char* to_string(Method m);

struct EstimatorConstants {
  double alpha_nu = 0.05;
  double n_nu = 0.53;
  double alpha_eta = 0.05;
  double m_eta = 0.5;
  double c_nu = 0.094;
  double c_n = 1.0;
  double c_filter = 1.0;
  double k_floor = 1e-12;
  double den_floor = 1e-12;
  bool laminar_correction = false;
};

double k_sgs_from_nu(double nu_sgs, double delta, double c_nu);
double k_num_empirical(double k_sgs, double h, double delta, double c_n);
// Numerical viscosity from the mean KE dissipation (per unit mass) and mean tau:grad u.
double nu_num_from_ke(double eps_bar, double denominator);
double k_num_ke(double nu_num, double delta, double c_nu);
double k_num_tke(double eps_bar_pos, double volume, double k_res, double k_floor = 1e-12);
// sgn(k) c_nu delta sqrt|k|
double nu_num_from_k(double k_num, double delta, double c_nu);

double iq_nu(double nu_eff, double nu, double alpha, double n);
double iq_eta(double h, double nu, double eps_total, double alpha, double m);
double iq_k(double k_res, double k_sgs, double k_num);
// Disabled: identity. Enabled: iq' = 1 - (1 - iq) nu_eff / (nu_eff + nu), with
// non-positive nu_eff treated as a laminar cell (iq' = 1).
double laminar_correction(double iq, double nu_eff, double nu, bool enabled);

// Column-averaged inputs of the estimators.
struct ColumnInputs {
  double h = 0.0;             // V^(1/3)
  double volume = 0.0;        // mean leaf volume
  double nu_sgs = 0.0;        // time-mean eddy viscosity
  double k_res = 0.0;
  double strain2 = 0.0;       // 2 S:S of the mean velocity
  double eps_ke = 0.0;        // mean KE numerical dissipation per unit mass
  double eps_tke_pos = 0.0;   // clipped mean TKE numerical dissipation
  double denominator = 0.0;   // mean tau:grad u
  bool denominator_flagged = true;
};

struct IqColumn {
  double k_sgs = 0.0;
  std::array<double, 3> k_num{};   // by Method
  std::array<double, 3> nu_num{};
  std::array<double, 3> nu_eff{};
  std::array<std::array<double, 3>, 3> iq{};  // [family][method]
  bool ke_invalid = false;  // flagged denominator, k_num(ke) forced to 0
};

IqColumn estimate_column(const ColumnInputs& in, double nu, const EstimatorConstants& c);
std::vector<IqColumn> estimate_columns(const std::vector<ColumnInputs>& in, double nu, const EstimatorConstants& c);

}  // namespace minles
