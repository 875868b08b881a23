#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dcmicro/quadrature.hpp"
#include "dcmicro/taylor.hpp"

using namespace dcmicro;

TEST_CASE("exp of a variable has coefficients 1/k!") {
  const Taylor x = Taylor::variable(1, 8, 0, 0.0);
  const Taylor e = exp(x);
  double f = 1.0;
  for (int k = 0; k <= 8; ++k) {
    if (k) f *= k;
    const int a[1] = {k};
    CHECK(std::abs(e.coeff(a) - 1.0 / f) < 1e-15);
  }
}

TEST_CASE("1/(1+x^2) at 0 is the geometric series") {
  const Taylor x = Taylor::variable(1, 6, 0, 0.0);
  const Taylor r = 1.0 / (1.0 + x * x);
  const double expect[] = {1, 0, -1, 0, 1, 0, -1};
  for (int k = 0; k <= 6; ++k) {
    const int a[1] = {k};
    CHECK(std::abs(r.coeff(a) - expect[k]) < 1e-14);
  }
}

TEST_CASE("two-variable product and derivative") {
  const Taylor x = Taylor::variable(2, 4, 0, 1.0), y = Taylor::variable(2, 4, 1, 2.0);
  const Taylor p = x * x * y;  // around (1, 2)
  CHECK(std::abs(p.value() - 2.0) < 1e-15);
  const int dx[2] = {1, 0}, dy[2] = {0, 1}, dxx[2] = {2, 0};
  CHECK(std::abs(p.derivative_value(dx) - 4.0) < 1e-14);
  CHECK(std::abs(p.derivative_value(dy) - 1.0) < 1e-14);
  CHECK(std::abs(p.derivative_value(dxx) - 4.0) < 1e-14);
  const Taylor d = p.derivative(0);
  CHECK(std::abs(d.value() - 4.0) < 1e-14);
}

TEST_CASE("sqrt, log and pow agree with their definitions") {
  const Taylor x = Taylor::variable(1, 5, 0, 2.0);
  const Taylor s = sqrt(x);
  const Taylor back = s * s - x;
  for (int d : back.layout().valid()) CHECK(std::abs(back.dense(d)) < 1e-14);
  const Taylor l = exp(log(x)) - x;
  for (int d : l.layout().valid()) CHECK(std::abs(l.dense(d)) < 1e-13);
  const Taylor p = pow(x, -2) * x * x - 1.0;
  for (int d : p.layout().valid()) CHECK(std::abs(p.dense(d)) < 1e-14);
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  const auto& g = gauss_legendre(5);
  double s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 8);
  CHECK(std::abs(s - 2.0 / 9.0) < 1e-15);
}

TEST_CASE("composite rule honours forced breakpoints") {
  const double forced[] = {0.3};
  const auto br = panel_breaks(0.0, 1.0, forced, 0.25);
  CHECK(std::find(br.begin(), br.end(), 0.3) != br.end());
  for (size_t i = 1; i < br.size(); ++i) CHECK(br[i] - br[i - 1] <= 0.25 + 1e-15);
  const auto r = composite_gauss(br, 8);
  double s = 0.0;
  for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::abs(r.x[i] - 0.3);
  CHECK(std::abs(s - (0.09 + 0.49) / 2.0) < 1e-14);
}

TEST_CASE("Richardson recovers the limit of a quadratic in h") {
  const double h[] = {0.4, 0.2, 0.1};
  cplx y[3];
  for (int i = 0; i < 3; ++i) y[i] = 1.0 + 3.0 * h[i] - 2.0 * h[i] * h[i];
  CHECK(std::abs(extrapolate_to_zero(h, y, 2) - 1.0) < 1e-13);
}

TEST_CASE("compensated sum keeps small terms") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 10; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 10.0);
}
