#pragma once

// Index-arithmetic evaluation of every KE and TKE budget term on a uniform,
// fully periodic Cartesian grid. Shares no code with the library kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

using V3 = std::array<double, 3>;
using M3 = std::array<V3, 3>;

struct Grid {
  int n = 4;
  double h = 0.25;
  int idx(int i, int j, int k) const {
    const auto w = [&](int a) { return ((a % n) + n) % n; };
    return w(i) + n * (w(j) + n * w(k));
  }
  int shift(int cell, int axis, int by) const {
    int i = cell % n, j = (cell / n) % n, k = cell / (n * n);
    (axis == 0 ? i : axis == 1 ? j : k) += by;
    return idx(i, j, k);
  }
  int size() const { return n * n * n; }
};

struct Fields {
  std::vector<V3> u;
  std::vector<double> p;
  std::vector<double> nu_t;
};

struct Params {
  double rho = 1.0;
  double nu = 0.0;
  double c = 5.0;
  double kappa2 = 0.0;
  double kappa4 = 1.0 / 64.0;
  double body_force = 0.0;  // along x
};

struct KeTerms {
  std::vector<double> e_kin_t, F_ekin, F_ac, F_nu, eps_nu, forcing, eps_n;
};

struct TkeTerms {
  std::vector<double> k_t, F_k, F_ac, F_nu, P, eps_nu, eps_inter, eps_n;
};

inline double dotv(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Central-difference cell gradient g[i][j] = du_i/dx_j.
inline M3 cell_grad(const Grid& g, const std::vector<V3>& u, int c) {
  M3 out{};
  for (int a = 0; a < 3; ++a) {
    const V3& up = u[g.shift(c, a, 1)];
    const V3& um = u[g.shift(c, a, -1)];
    for (int i = 0; i < 3; ++i) out[i][a] = (up[i] - um[i]) / (2.0 * g.h);
  }
  return out;
}

// Gradient on the face between c and c + e_a: averaged cell gradients with the
// normal column replaced by the compact difference.
inline M3 face_grad(const Grid& g, const std::vector<V3>& u, int c, int a) {
  const int cp = g.shift(c, a, 1);
  const M3 gm = cell_grad(g, u, c), gp = cell_grad(g, u, cp);
  M3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = 0.5 * (gm[i][j] + gp[i][j]);
  for (int i = 0; i < 3; ++i) out[i][a] = (u[cp][i] - u[c][i]) / g.h;
  return out;
}

inline double sensor(double pm, double p0, double pp) {
  const double den = std::abs(pp) + 2.0 * std::abs(p0) + std::abs(pm);
  return den > 0.0 ? std::abs(pp - 2.0 * p0 + pm) / den : 0.0;
}

// Blended dissipation of w across the face between c and c + e_a.
inline double jst(const Grid& g, const Params& prm, const Fields& f, const std::vector<double>& w, int c, int a) {
  const int m2 = g.shift(c, a, -1), m1 = c, p1 = g.shift(c, a, 1), p2 = g.shift(c, a, 2);
  const double area = g.h * g.h;
  const double un = 0.5 * (f.u[m1][a] + f.u[p1][a]);
  const double lam = std::abs(un) * area + prm.c * area;
  const double e2 = prm.kappa2 * std::max(sensor(f.p[m2], f.p[m1], f.p[p1]), sensor(f.p[m1], f.p[p1], f.p[p2]));
  const double e4 = std::max(0.0, prm.kappa4 - e2);
  return lam * (e2 * (w[p1] - w[m1]) - e4 * (w[p2] - 3.0 * w[p1] + 3.0 * w[m1] - w[m2]));
}

// Divergence of per-face values F(c, a) on the faces between c and c + e_a.
template <class F>
std::vector<double> divergence(const Grid& g, F&& face) {
  std::vector<double> out(static_cast<std::size_t>(g.size()), 0.0);
  const double vol = g.h * g.h * g.h;
  for (int c = 0; c < g.size(); ++c)
    for (int a = 0; a < 3; ++a) out[c] += (face(c, a) - face(g.shift(c, a, -1), a)) / vol;
  return out;
}

inline KeTerms ke_terms(const Grid& g, const Params& prm, const Fields& prev, const Fields& mid, const Fields& next,
                        double span) {
  const std::size_t n = static_cast<std::size_t>(g.size());
  const double area = g.h * g.h;
  std::vector<double> ek(n);
  for (std::size_t c = 0; c < n; ++c) ek[c] = 0.5 * prm.rho * dotv(mid.u[c], mid.u[c]);
  const auto uf = [&](int c, int a) {
    const V3& x = mid.u[c];
    const V3& y = mid.u[g.shift(c, a, 1)];
    return V3{0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1]), 0.5 * (x[2] + y[2])};
  };
  KeTerms t;
  t.F_ekin = divergence(g, [&](int c, int a) {
    const double ekf = 0.5 * (ek[c] + ek[g.shift(c, a, 1)]);
    return ekf * uf(c, a)[a] * area - jst(g, prm, mid, ek, c, a);
  });
  t.F_ac = divergence(g, [&](int c, int a) {
    return 0.5 * (mid.p[c] + mid.p[g.shift(c, a, 1)]) * uf(c, a)[a] * area;
  });
  t.F_nu = divergence(g, [&](int c, int a) {
    const double nu_f = prm.nu + 0.5 * (mid.nu_t[c] + mid.nu_t[g.shift(c, a, 1)]);
    const M3 fg = face_grad(g, mid.u, c, a);
    const V3 u = uf(c, a);
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += (fg[a][j] + fg[j][a]) * u[j];
    return -prm.rho * nu_f * s * area;
  });
  t.e_kin_t.resize(n);
  t.eps_nu.resize(n);
  t.forcing.resize(n);
  t.eps_n.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    t.e_kin_t[c] = 0.5 * prm.rho * (dotv(next.u[c], next.u[c]) - dotv(prev.u[c], prev.u[c])) / span;
    const M3 gr = cell_grad(g, mid.u, static_cast<int>(c));
    double td = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) td += (gr[i][j] + gr[j][i]) * gr[i][j];
    t.eps_nu[c] = prm.rho * (prm.nu + mid.nu_t[c]) * td;
    t.forcing[c] = -prm.rho * prm.body_force * mid.u[c][0];
    t.eps_n[c] = -(t.e_kin_t[c] + t.F_ekin[c] + t.F_ac[c] + t.F_nu[c] + t.eps_nu[c] + t.forcing[c]);
  }
  return t;
}

inline TkeTerms tke_terms(const Grid& g, const Params& prm, const Fields& prev, const Fields& mid, const Fields& next,
                          const Fields& mean, double span) {
  const std::size_t n = static_cast<std::size_t>(g.size());
  const double area = g.h * g.h, vol = area * g.h;
  std::vector<V3> up(n);
  std::vector<double> k(n), pp(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (int i = 0; i < 3; ++i) up[c][i] = mid.u[c][i] - mean.u[c][i];
    k[c] = 0.5 * dotv(up[c], up[c]);
    pp[c] = mid.p[c] - mean.p[c];
  }
  TkeTerms t;
  t.F_k = divergence(g, [&](int c, int a) {
    const int cp = g.shift(c, a, 1);
    const double un = 0.5 * (mid.u[c][a] + mid.u[cp][a]);
    return 0.5 * (k[c] + k[cp]) * un * area - jst(g, prm, mid, k, c, a);
  });
  t.F_ac = divergence(g, [&](int c, int a) {
    const int cp = g.shift(c, a, 1);
    return 0.5 * (pp[c] + pp[cp]) * 0.5 * (up[c][a] + up[cp][a]) * area / prm.rho;
  });
  t.F_nu = divergence(g, [&](int c, int a) {
    const int cp = g.shift(c, a, 1);
    const double nu_f = prm.nu + 0.5 * (mid.nu_t[c] + mid.nu_t[cp]);
    return -nu_f * (k[cp] - k[c]) / g.h * area;
  });
  t.k_t.resize(n);
  t.P.resize(n);
  t.eps_nu.resize(n);
  t.eps_inter.resize(n);
  t.eps_n.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const int ci = static_cast<int>(c);
    V3 un{}, uo{};
    for (int i = 0; i < 3; ++i) {
      un[i] = next.u[c][i] - mean.u[c][i];
      uo[i] = prev.u[c][i] - mean.u[c][i];
    }
    t.k_t[c] = 0.5 * (dotv(un, un) - dotv(uo, uo)) / span;
    const M3 gm = cell_grad(g, mean.u, ci);
    const M3 gf = cell_grad(g, up, ci);
    double prod = 0.0, diss = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        prod += up[c][i] * gm[i][j] * up[c][j];
        diss += gf[i][j] * gf[i][j];
      }
    t.P[c] = prod;
    t.eps_nu[c] = (prm.nu + mid.nu_t[c]) * diss;
    V3 lap{};
    for (int a = 0; a < 3; ++a) {
      const V3& cp = mean.u[g.shift(ci, a, 1)];
      const V3& cm = mean.u[g.shift(ci, a, -1)];
      for (int i = 0; i < 3; ++i) lap[i] += (cp[i] - 2.0 * mean.u[c][i] + cm[i]) / g.h * area / vol;
    }
    t.eps_inter[c] = -(mid.nu_t[c] - mean.nu_t[c]) * dotv(up[c], lap);
    t.eps_n[c] = -(t.k_t[c] + t.F_k[c] + t.F_ac[c] + t.F_nu[c] + t.P[c] + t.eps_nu[c] + t.eps_inter[c]);
  }
  return t;
}

}  // namespace oracle
