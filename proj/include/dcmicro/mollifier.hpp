#pragma once

// Radial cutoff psi on C^m = R^{2m} and quadrature on the balls it lives on.

#include <functional>
#include <span>
#include <vector>

#include "dcmicro/manifold.hpp"
#include "dcmicro/taylor.hpp"

namespace dcmicro {

// psi(w) = norm_const * exp(-1 / (1 - |w|^2 / eps^2)) on |w| < eps.
class RadialCutoff {
 public:
  RadialCutoff(int m, double eps);

  int m() const { return m_; }
  double eps() const { return eps_; }
  double norm_const() const { return norm_; }
  double quad_error() const { return quad_error_; }

  // psi as a function of t = |w|^2.
  double profile(double t) const;
  // d^k/dt^k of profile, k <= 4.
  double profile_derivative(double t, int k) const;
  // profile of a series t (used for derivatives in v).
  Taylor profile_series(const Taylor& t) const;

  double operator()(const VecC& w) const;

 private:
  int m_;
  double eps_;
  double norm_ = 1.0;
  double quad_error_ = 0.0;
};

// Nodes w of the ball |w| < eps in C^m with Lebesgue weights and psi values.
// Radial Gauss-Legendre times uniform angles per complex coordinate; for m = 2
// the radii are (rho sqrt(1 - s), rho sqrt(s)) with Gauss-Legendre in s.
struct BallRule {
  int m = 1;
  double eps = 0.5;
  std::vector<VecC> w;
  std::vector<double> weight;  // d lambda(w)
  std::vector<double> psi;     // psi(w), rescaled so sum weight * psi = 1
  std::vector<double> dpsi;    // profile'(|w|^2), same rescaling
  double renorm = 1.0;         // the rescaling factor
  int angular = 0;
  int radial = 0;
};

BallRule ball_rule(const RadialCutoff& psi, int angular, int radial = 0, int s_points = 0);
// Default rule: `angular` above max_degree.
BallRule ball_rule_for_degree(const RadialCutoff& psi, int max_degree);

// Nodes of the ball |z - v| <= eps |v| in C^m.
struct ShellQuadrature {
  VecC center;
  double scale = 0.0;  // |v|
  std::vector<VecC> nodes;
  std::vector<double> weights;  // d lambda(z)
  std::vector<double> psi;
};
ShellQuadrature shell_quadrature(const BallRule& rule, const VecC& v);

using PolynomialFn = std::function<cplx(const VecC&)>;

// |v|^{-2m} int psi((z - v)/|v|) P(z) d lambda(z).
cplx reproduce_polynomial(const RadialCutoff& psi, const PolynomialFn& P, const VecC& v, int degree = 8);
cplx reproduce_polynomial(const BallRule& rule, const PolynomialFn& P, const VecC& v);

// Degree sums s_d(z) = sum_{|alpha| = d} c_alpha z^alpha, d = 0 .. N, for the
// coefficient table coeffs (coeff(alpha) = c_alpha).
std::vector<cplx> degree_sums(const Taylor& coeffs, const VecC& z, int N);

// |v|^{-2m} int psi((z - v)/|v|) sum_{|alpha| <= trunc(|z|)} c_alpha z^alpha d lambda(z),
// with the truncation evaluated per node.
cplx mollified_series(const BallRule& rule, const Taylor& coeffs, const VecC& v, const std::function<int(double)>& trunc);

}  // namespace dcmicro
