#include <doctest.h>

#include <cmath>

#include "dcmicro/mollifier.hpp"

using namespace dcmicro;

namespace {
double total_mass(const BallRule& r) {
  double s = 0.0;
  for (size_t i = 0; i < r.w.size(); ++i) s += r.weight[i] * r.psi[i];
  return s;
}
}  // namespace

TEST_CASE("cutoff is normalised, supported in the ball and radial") {
  for (int m : {1, 2}) {
    const RadialCutoff psi(m, 0.5);
    CAPTURE(m);
    CHECK(psi.quad_error() < 1e-9);
    const auto rule = ball_rule_for_degree(psi, 8);
    CHECK(total_mass(rule) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rule.renorm - 1.0) < 1e-6);
    VecC w = VecC::Zero(m);
    w(0) = 0.5;
    CHECK(psi(w) == 0.0);
    w(0) = 0.6;
    CHECK(psi(w) == 0.0);
    w(0) = cplx(0.3, 0.0);
    VecC w2 = VecC::Zero(m);
    w2(m - 1) = cplx(0.0, 0.3);
    CHECK(psi(w) == doctest::Approx(psi(w2)).epsilon(1e-15));
    CHECK(psi(w) > 0.0);
  }
}

TEST_CASE("profile derivatives match finite differences") {
  const RadialCutoff psi(1, 0.5);
  const double t = 0.1, h = 1e-6;
  const double fd = (psi.profile(t + h) - psi.profile(t - h)) / (2 * h);
  CHECK(psi.profile_derivative(t, 1) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("mollification reproduces polynomials") {
  const RadialCutoff psi(1, 0.5);
  VecC v(1);
  v << 0.3;
  CHECK(std::abs(reproduce_polynomial(psi, [](const VecC&) { return cplx(1.0); }, v) - 1.0) < 1e-12);
  CHECK(std::abs(reproduce_polynomial(psi, [](const VecC& z) { return z(0); }, v) - 0.3) < 1e-12);
  CHECK(std::abs(reproduce_polynomial(psi, [](const VecC& z) { return z(0) * z(0); }, v) - 0.09) < 1e-12);

  const RadialCutoff psi2(2, 0.5);
  VecC v2(2);
  v2 << 0.2, -0.1;
  CHECK(std::abs(reproduce_polynomial(psi2, [](const VecC& z) { return z(0) * z(1) * z(1); }, v2) - 0.002) < 1e-12);
}

TEST_CASE("mollified series") {
  const RadialCutoff psi(1, 0.5);
  const auto rule = ball_rule_for_degree(psi, 40);
  VecC v(1);

  Taylor z2(1, 4);
  const int a2[1] = {2};
  z2.coeff_ref(a2) = 1.0;
  v << 0.05;
  CHECK(std::abs(mollified_series(rule, z2, v, [](double) { return 4; }) - 0.0025) < 1e-14);

  Taylor zero(1, 4);
  CHECK(mollified_series(rule, zero, v, [](double) { return 4; }) == cplx(0.0));

  // 1/(1+z^2) = sum (-1)^k z^{2k}
  Taylor geo(1, 40);
  for (int k = 0; 2 * k <= 40; ++k) {
    const int a[1] = {2 * k};
    geo.coeff_ref(a) = (k % 2) ? -1.0 : 1.0;
  }
  v << 0.1;
  CHECK(std::abs(mollified_series(rule, geo, v, [](double) { return 40; }) - 1.0 / 1.01) < 1e-6);
}

TEST_CASE("shell quadrature is centred on v with radius eps |v|") {
  const RadialCutoff psi(1, 0.5);
  const auto rule = ball_rule_for_degree(psi, 8);
  VecC v(1);
  v << 0.2;
  const auto sq = shell_quadrature(rule, v);
  for (const auto& z : sq.nodes) CHECK(std::abs(z(0) - 0.2) <= 0.5 * 0.2 + 1e-15);
}

TEST_CASE("degree sums") {
  Taylor c(2, 2);
  for (int d : c.layout().valid()) c.dense(d) = 1.0;
  VecC z(2);
  z << 2.0, 3.0;
  const auto s = degree_sums(c, z, 2);
  CHECK(std::abs(s[0] - 1.0) < 1e-15);
  CHECK(std::abs(s[1] - 5.0) < 1e-15);
  CHECK(std::abs(s[2] - 19.0) < 1e-15);
}
