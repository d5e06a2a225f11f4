#include <cmath>

#include "doctest.h"
#include "minles/sgs.hpp"

using namespace minles;

namespace {

Mat3 from_rows(std::array<std::array<double, 3>, 3> r) {
  Mat3 g;
  g.m = r;
  return g;
}

}  // namespace

TEST_CASE("WALE matches frozen reference values") {
  struct Ref {
    std::array<std::array<double, 3>, 3> g;
    double h, nu_t;
  };
  // Evaluated independently in double precision with c_w = 0.325.
  const Ref refs[] = {
      {{{{-0.989, 0.954, -1.407}, {0.138, -0.386, 1.831}, {1.753, -0.855, 1.15}}}, 0.1, 0.00074852449121844123},
      {{{{-0.411, -0.033, -1.426}, {-0.499, -0.596, 0.086}, {0.291, 1.717, -0.259}}}, 0.05, 5.5604554177856401e-05},
      {{{{-1.236, -0.859, -1.04}, {-0.173, 0.252, -1.922}, {0.183, 1.985, 0.443}}}, 1, 0.1787002502217486},
      {{{{0.712, -0.47, 1.95}, {-0.362, -1.667, -0.483}, {-0.834, -1.76, -0.735}}}, 0.2, 0.0030954982847225579},
  };
  for (const Ref& r : refs) CHECK(wale_nu_t(from_rows(r.g), r.h) == doctest::Approx(r.nu_t).epsilon(1e-12));
}

TEST_CASE("WALE limits") {
  CHECK(wale_nu_t(Mat3{}, 1.0) == 0.0);
  // Pure shear du/dy: the traceless symmetric square of g vanishes.
  CHECK(wale_nu_t(from_rows({{{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}}), 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  // Solid-body rotation: S = 0, so nu_t = (c_w h)^2 (S^d:S^d)^{3/2} / (S^d:S^d)^{5/4} = (c_w h)^2 (2/3)^{1/4}.
  const double expected = 0.325 * 0.325 * std::pow(2.0 / 3.0, 0.25);
  CHECK(wale_nu_t(from_rows({{{0, -1, 0}, {1, 0, 0}, {0, 0, 0}}}), 1.0) == doctest::Approx(expected).epsilon(1e-12));
  // Quadratic in the length scale.
  const Mat3 g = from_rows({{{0.3, 0.1, -0.2}, {0.5, -0.1, 0.4}, {0.2, 0.7, -0.2}}});
  CHECK(wale_nu_t(g, 0.2) == doctest::Approx(4.0 * wale_nu_t(g, 0.1)).epsilon(1e-13));
  CHECK(wale_nu_t(g, 0.1) >= 0.0);
}

TEST_CASE("strain rate is the symmetric part") {
  const Mat3 g = from_rows({{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}});
  const Mat3 s = strain_rate(g);
  CHECK(s[0][1] == 3.0);
  CHECK(s[2][0] == 5.0);
  CHECK(s[1][1] == 5.0);
}
