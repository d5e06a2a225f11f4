#include "minles/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace minles {

const char* to_string(Family f) {
  switch (f) {
    case Family::nu: return "nu";
    case Family::eta: return "eta";
    case Family::k: return "k";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::emp: return "emp";
    case Method::ke: return "ke";
    case Method::tke: return "tke";
  }
  return "?";
}

std::string EstimatorId::name() const { return std::string("iq_") + to_string(family) + "_" + to_string(method); }

std::optional<EstimatorId> EstimatorId::parse(const std::string& name) {
  for (Family f : {Family::nu, Family::eta, Family::k}) {
    for (Method m : {Method::emp, Method::ke, Method::tke}) {
      const EstimatorId id{f, m};
      if (id.name() == name) return id;
    }
  }
  return std::nullopt;
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double k_sgs_from_nu(double nu_sgs, double delta, double c_nu) {
  const double r = nu_sgs / (c_nu * delta);
  return r * r;
}

double k_num_empirical(double k_sgs, double h, double delta, double c_n) {
  const double r = h / delta;
  return c_n * r * r * k_sgs;
}

double nu_num_from_ke(double eps_bar, double denominator) { return eps_bar / denominator; }

double k_num_ke(double nu_num, double delta, double c_nu) {
  const double r = nu_num / (c_nu * delta);
  return sign(nu_num) * r * r;
}

double k_num_tke(double eps_bar_pos, double volume, double k_res, double k_floor) {
  if (k_res < k_floor || eps_bar_pos <= 0.0) return 0.0;
  return eps_bar_pos * std::cbrt(volume) / std::sqrt(2.0 / 3.0 * k_res);
}

double nu_num_from_k(double k_num, double delta, double c_nu) {
  return sign(k_num) * c_nu * delta * std::sqrt(std::abs(k_num));
}

double iq_nu(double nu_eff, double nu, double alpha, double n) {
  const double x = nu_eff / nu;
  const double den = 1.0 + alpha * sign(x) * std::pow(std::abs(x), n);
  return den < 1.0 ? 1.0 : 1.0 / den;
}

double iq_eta(double h, double nu, double eps_total, double alpha, double m) {
  if (!(eps_total > 0.0)) return 1.0;
  const double eta = std::pow(nu * nu * nu / eps_total, 0.25);
  return 1.0 / (1.0 + alpha * std::pow(h / eta, m));
}

double iq_k(double k_res, double k_sgs, double k_num) {
  const double k_eff = std::max(k_sgs + k_num, 0.0);
  const double total = k_res + k_eff;
  if (!(total > 0.0)) return 1.0;
  return k_res / total;
}

double laminar_correction(double iq, double nu_eff, double nu, bool enabled) {
  if (!enabled) return iq;
  if (!(nu_eff > 0.0)) return 1.0;
  return 1.0 - (1.0 - iq) * nu_eff / (nu_eff + nu);
}

IqColumn estimate_column(const ColumnInputs& in, double nu, const EstimatorConstants& c) {
  IqColumn out;
  const double delta = c.c_filter * in.h;
  out.k_sgs = k_sgs_from_nu(in.nu_sgs, delta, c.c_nu);

  out.k_num[static_cast<int>(Method::emp)] = k_num_empirical(out.k_sgs, in.h, delta, c.c_n);
  if (in.denominator_flagged) {
    out.ke_invalid = true;
    out.k_num[static_cast<int>(Method::ke)] = 0.0;
  } else {
    out.k_num[static_cast<int>(Method::ke)] = k_num_ke(nu_num_from_ke(in.eps_ke, in.denominator), delta, c.c_nu);
  }
  out.k_num[static_cast<int>(Method::tke)] = k_num_tke(in.eps_tke_pos, in.volume, in.k_res, c.k_floor);

  for (int m = 0; m < 3; ++m) {
    out.nu_num[m] = nu_num_from_k(out.k_num[m], delta, c.c_nu);
    out.nu_eff[m] = out.nu_num[m] + in.nu_sgs;
    const double nu_eff = out.nu_eff[m];
    double q[3];
    q[0] = iq_nu(nu_eff, nu, c.alpha_nu, c.n_nu);
    q[1] = iq_eta(in.h, nu, in.strain2 * nu_eff, c.alpha_eta, c.m_eta);
    q[2] = iq_k(in.k_res, out.k_sgs, out.k_num[m]);
    for (int f = 0; f < 3; ++f) out.iq[f][m] = laminar_correction(q[f], nu_eff, nu, c.laminar_correction);
  }
  return out;
}

std::vector<IqColumn> estimate_columns(const std::vector<ColumnInputs>& in, double nu, const EstimatorConstants& c) {
  std::vector<IqColumn> out;
  out.reserve(in.size());
  for (const ColumnInputs& col : in) out.push_back(estimate_column(col, nu, c));
  return out;
}

}  // namespace minles
