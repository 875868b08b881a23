#include "dcmicro/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dcmicro/errors.hpp"
#include "dcmicro/parallel.hpp"
#include "dcmicro/quadrature.hpp"

namespace dcmicro {

namespace {

// int_0^1 u^{m-1} exp(-1/(1-u)) du with an n-point Gauss rule.
double radial_mass(int m, int n) {
  const auto& g = gauss_legendre(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (g.nodes[i] + 1.0);
    s += 0.5 * g.weights[i] * std::pow(u, m - 1) * std::exp(-1.0 / (1.0 - u));
  }
  return s;
}

}  // namespace

RadialCutoff::RadialCutoff(int m, double eps) : m_(m), eps_(eps) {
  if (m != 1 && m != 2) throw PreconditionError("RadialCutoff: m must be 1 or 2");
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("RadialCutoff: eps must lie in (0, 1)");
  // int psi = pi^m eps^{2m} int_0^1 u^{m-1} e^{-1/(1-u)} du  (m <= 2)
  const double fine = radial_mass(m, 400), coarse = radial_mass(m, 200);
  const double pref = std::pow(std::numbers::pi, m) * std::pow(eps, 2 * m);
  norm_ = 1.0 / (pref * fine);
  quad_error_ = std::abs(fine - coarse) / fine;
}

double RadialCutoff::profile(double t) const {
  const double u = t / (eps_ * eps_);
  if (u >= 1.0) return 0.0;
  return norm_ * std::exp(-1.0 / (1.0 - u));
}

Taylor RadialCutoff::profile_series(const Taylor& t) const {
  const double u = t.value().real() / (eps_ * eps_);
  if (u >= 1.0) return Taylor(t.nvars(), t.order());
  return norm_ * exp(-1.0 / (1.0 - t / (eps_ * eps_)));
}

double RadialCutoff::profile_derivative(double t, int k) const {
  if (k < 0 || k > 4) throw RangeError("profile_derivative: order <= 4");
  const Taylor s = profile_series(Taylor::variable(1, k, 0, t));
  const int a[1] = {k};
  return s.derivative_value(a).real();
}

double RadialCutoff::operator()(const VecC& w) const { return profile(w.squaredNorm()); }

BallRule ball_rule(const RadialCutoff& psi, int angular, int radial, int s_points) {
  BallRule r;
  r.m = psi.m();
  r.eps = psi.eps();
  r.angular = std::max(angular, 4);
  r.radial = radial > 0 ? radial : 48;
  const auto& gr = gauss_legendre(r.radial);
  const double eps = psi.eps();
  const int na = r.angular;
  const double dth = 2.0 * std::numbers::pi / na;
  if (r.m == 1) {
    for (int i = 0; i < r.radial; ++i) {
      const double rho = 0.5 * eps * (gr.nodes[i] + 1.0);
      const double wr = 0.5 * eps * gr.weights[i] * rho * dth;
      for (int a = 0; a < na; ++a) {
        VecC w(1);
        w[0] = std::polar(rho, a * dth);
        r.w.push_back(w);
        r.weight.push_back(wr);
      }
    }
  } else {
    const int ns = s_points > 0 ? s_points : 12;
    const auto& gs = gauss_legendre(ns);
    for (int i = 0; i < r.radial; ++i) {
      const double rho = 0.5 * eps * (gr.nodes[i] + 1.0);
      const double wr = 0.5 * eps * gr.weights[i] * rho * rho * rho * 0.5 * dth * dth;
      for (int q = 0; q < ns; ++q) {
        const double s = 0.5 * (gs.nodes[q] + 1.0);
        const double ws = 0.5 * gs.weights[q];
        const double r1 = rho * std::sqrt(1.0 - s), r2 = rho * std::sqrt(s);
        for (int a = 0; a < na; ++a)
          for (int b = 0; b < na; ++b) {
            VecC w(2);
            w[0] = std::polar(r1, a * dth);
            w[1] = std::polar(r2, b * dth);
            r.w.push_back(w);
            r.weight.push_back(wr * ws);
          }
      }
    }
  }
  CompensatedSum mass;
  for (size_t i = 0; i < r.w.size(); ++i) {
    const double t = r.w[i].squaredNorm();
    r.psi.push_back(psi.profile(t));
    r.dpsi.push_back(t < eps * eps ? psi.profile_derivative(t, 1) : 0.0);
    mass.add(r.weight[i] * r.psi.back());
  }
  const double fix = 1.0 / mass.value();
  r.renorm = fix;
  for (auto& p : r.psi) p *= fix;
  for (auto& p : r.dpsi) p *= fix;
  return r;
}

BallRule ball_rule_for_degree(const RadialCutoff& psi, int max_degree) {
  return ball_rule(psi, max_degree + 2, psi.m() == 1 ? 64 : 24, psi.m() == 1 ? 0 : 10);
}

ShellQuadrature shell_quadrature(const BallRule& rule, const VecC& v) {
  ShellQuadrature q;
  q.center = v;
  q.scale = v.norm();
  if (q.scale == 0.0) throw DomainError("shell_quadrature: v = 0");
  const double jac = std::pow(q.scale, 2 * rule.m);
  for (size_t i = 0; i < rule.w.size(); ++i) {
    q.nodes.push_back(v + q.scale * rule.w[i]);
    q.weights.push_back(rule.weight[i] * jac);
    q.psi.push_back(rule.psi[i]);
  }
  return q;
}

cplx reproduce_polynomial(const BallRule& rule, const PolynomialFn& P, const VecC& v) {
  const double r = v.norm();
  if (r == 0.0) throw DomainError("reproduce_polynomial: v = 0");
  if (v.size() != rule.m) throw PreconditionError("reproduce_polynomial: dimension mismatch");
  const int n = static_cast<int>(rule.w.size());
  std::vector<cplx> vals(n);
#pragma omp parallel for if (parallel_enabled())
  for (int i = 0; i < n; ++i) vals[i] = rule.weight[i] * rule.psi[i] * P(v + r * rule.w[i]);
  CompensatedSumC acc;
  for (const auto& x : vals) acc.add(x);
  return acc.value();
}

cplx reproduce_polynomial(const RadialCutoff& psi, const PolynomialFn& P, const VecC& v, int degree) {
  return reproduce_polynomial(ball_rule_for_degree(psi, degree), P, v);
}

std::vector<cplx> degree_sums(const Taylor& coeffs, const VecC& z, int N) {
  const auto& L = coeffs.layout();
  N = std::min(N, coeffs.order());
  std::vector<cplx> s(N + 1, 0.0);
  const int m = L.nvars();
  if (m == 1) {
    cplx p = 1.0;
    for (int d = 0; d <= N; ++d) {
      s[d] = coeffs.dense(d) * p;
      p *= z[0];
    }
    return s;
  }
  // powers per variable, then monomials by dense index
  std::vector<std::vector<cplx>> pw(m, std::vector<cplx>(N + 1));
  for (int i = 0; i < m; ++i) {
    pw[i][0] = 1.0;
    for (int d = 1; d <= N; ++d) pw[i][d] = pw[i][d - 1] * z[i];
  }
  const auto valid = L.valid();
  const int end = L.degree_start(N + 1);
  for (int k = 0; k < end; ++k) {
    const int idx = valid[k];
    const int d = L.degree(idx);
    cplx mono = 1.0;
    int rest = idx;
    for (int i = 0; i < m; ++i) {
      const int a = rest % L.stride(1);
      rest /= L.stride(1);
      mono *= pw[i][a];
    }
    s[d] += coeffs.dense(idx) * mono;
  }
  return s;
}

cplx mollified_series(const BallRule& rule, const Taylor& coeffs, const VecC& v, const std::function<int(double)>& trunc) {
  const double r = v.norm();
  if (r == 0.0) throw DomainError("mollified_series: v = 0");
  const int n = static_cast<int>(rule.w.size());
  std::vector<cplx> vals(n);
  std::vector<std::string> err(n);
#pragma omp parallel for if (parallel_enabled())
  for (int i = 0; i < n; ++i) {
    if (rule.psi[i] == 0.0) continue;
    try {
      const VecC z = v + r * rule.w[i];
      const int N = std::min(trunc(z.norm()), coeffs.order());
      const auto s = degree_sums(coeffs, z, N);
      cplx t = 0.0;
      for (int d = N; d >= 0; --d) t += s[d];
      vals[i] = rule.weight[i] * rule.psi[i] * t;
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  for (const auto& e : err)
    if (!e.empty()) throw DomainError("mollified_series: " + e);
  CompensatedSumC acc;
  for (const auto& x : vals) acc.add(x);
  return acc.value();
}

}  // namespace dcmicro
