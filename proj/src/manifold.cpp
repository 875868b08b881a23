#include "dcmicro/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dcmicro/errors.hpp"

namespace dcmicro {

MaximallyRealChart::MaximallyRealChart(std::string name, int m, Box U, PhiSeries phi, bool flat)
    : name_(std::move(name)), m_(m), U_(std::move(U)), phi_(std::move(phi)), flat_(flat) {
  if (m_ < 1 || m_ > 2) throw PreconditionError("chart: only m = 1, 2 are supported");
  if (U_.dim() != m_) throw PreconditionError("chart: box dimension mismatch");
}

std::shared_ptr<MaximallyRealChart> MaximallyRealChart::with_box(Box U) const {
  return std::make_shared<MaximallyRealChart>(name_, m_, std::move(U), phi_, flat_);
}

std::vector<double> MaximallyRealChart::phi(std::span<const double> x) const {
  auto s = phi_(x, 0);
  std::vector<double> out(m_);
  for (int j = 0; j < m_; ++j) out[j] = s[j].value().real();
  return out;
}

VecC MaximallyRealChart::Z(std::span<const double> x) const {
  auto p = phi(x);
  VecC z(m_);
  for (int j = 0; j < m_; ++j) z[j] = cplx(x[j], p[j]);
  return z;
}

MatC MaximallyRealChart::Zx(std::span<const double> x) const {
  auto s = phi_(x, 1);
  MatC M(m_, m_);
  for (int j = 0; j < m_; ++j)
    for (int l = 0; l < m_; ++l) {
      std::vector<int> e(m_, 0);
      e[l] = 1;
      M(j, l) = (j == l ? 1.0 : 0.0) + cplx(0.0, 1.0) * s[j].coeff(e).real();
    }
  return M;
}

MatC MaximallyRealChart::a(std::span<const double> x) const {
  MatC zx = Zx(x);
  Eigen::FullPivLU<MatC> lu(zx);
  if (!lu.isInvertible()) throw DomainError(name_ + ": singular Zx");
  return lu.inverse().transpose();
}

double MaximallyRealChart::condition_number(std::span<const double> x) const {
  Eigen::JacobiSVD<MatC> svd(Zx(x));
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

std::vector<Taylor> MaximallyRealChart::coefficient_series(std::span<const double> x, int order) const {
  auto p = phi_(x, order + 1);
  std::vector<Taylor> Zs;
  for (int j = 0; j < m_; ++j)
    for (int l = 0; l < m_; ++l) {
      Taylor t = p[j].derivative(l) * cplx(0.0, 1.0);
      if (j == l) t += 1.0;
      Zs.push_back(t);
    }
  if (m_ == 1) return {reciprocal(Zs[0])};
  const Taylor det = Zs[0] * Zs[3] - Zs[1] * Zs[2];
  if (std::abs(det.value()) < 1e-14) throw DomainError(name_ + ": singular Zx");
  const Taylor inv = reciprocal(det);
  // a_kl = (Zx^{-1})_lk
  return {Zs[3] * inv, -(Zs[2] * inv), -(Zs[1] * inv), Zs[0] * inv};
}

VectorFrame chart_frame(const ChartPtr& chart) {
  if (chart->flat()) return VectorFrame::coordinate(chart->dim());
  return VectorFrame::chart(chart);
}

cplx bracket_unchecked(const VecC& z) {
  cplx s = 0.0;
  for (int i = 0; i < z.size(); ++i) s += z[i] * z[i];
  return std::sqrt(s);
}

cplx bracket(const VecC& zeta) {
  if (zeta.imag().norm() >= zeta.real().norm()) throw ConeViolation("bracket: |Im zeta| >= |Re zeta|");
  return bracket_unchecked(zeta);
}

StructureDirection structure_direction(const MaximallyRealChart& chart, std::span<const double> x, std::span<const double> xi) {
  double n = 0.0;
  for (double v : xi) n += v * v;
  if (n == 0.0) throw PreconditionError("structure_direction: xi = 0");
  StructureDirection d;
  d.x.assign(x.begin(), x.end());
  d.xi.assign(xi.begin(), xi.end());
  VecC xv(xi.size());
  for (size_t i = 0; i < xi.size(); ++i) xv[i] = xi[i];
  d.zeta = chart.Zx(x).transpose().fullPivLu().solve(xv);
  d.cone_ratio = d.zeta.imag().norm() / d.zeta.real().norm();
  return d;
}

nlohmann::json WellPositionedCertificate::to_json() const {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["kappa"] = kappa;
  j["kappa_prime"] = kappa_prime;
  j["pass"] = pass;
  j["samples"] = samples;
  if (!failure.empty()) j["failure"] = failure;
  j["worst"] = {{"x", worst_x}, {"x_prime", worst_xp}, {"xi", worst_xi}};
  return j;
}

WellPositionedCertificate check_well_positioned(const MaximallyRealChart& chart, double lambda, int sample_budget,
                                                unsigned long long seed) {
  if (!(lambda > 0.0)) throw PreconditionError("check_well_positioned: lambda must be positive");
  const int m = chart.dim();
  const Box& U = chart.box();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  WellPositionedCertificate cert;
  cert.lambda = lambda;
  cert.kappa_prime = std::numeric_limits<double>::infinity();
  auto draw = [&]() {
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = U.lo[i] + (U.hi[i] - U.lo[i]) * unit(rng);
    return x;
  };
  for (int s = 0; s < sample_budget; ++s) {
    auto x = draw(), xp = draw();
    std::vector<double> xi(m);
    double n = 0.0;
    for (int i = 0; i < m; ++i) {
      xi[i] = m == 1 ? (unit(rng) < 0.5 ? -1.0 : 1.0) : gauss(rng);
      n += xi[i] * xi[i];
    }
    for (double& v : xi) v /= std::sqrt(n);
    const VecC dz = chart.Z(x) - chart.Z(xp);
    const double dz2 = dz.squaredNorm();
    if (dz2 < 1e-24) continue;
    for (const auto& base : {x, xp}) {
      const auto sd = structure_direction(chart, base, xi);
      cert.kappa = std::max(cert.kappa, sd.cone_ratio);
      ++cert.samples;
      if (sd.cone_ratio >= 1.0) {
        cert.failure = "cone violation: |Im zeta| >= |Re zeta|";
        cert.worst_x = x;
        cert.worst_xp = xp;
        cert.worst_xi = xi;
        cert.kappa_prime = -std::numeric_limits<double>::infinity();
        cert.pass = false;
        return cert;
      }
      const cplx br = bracket(sd.zeta);
      const cplx phase = cplx(0.0, 1.0) * (sd.zeta.array() * dz.array()).sum() - lambda * br * bracket_unchecked(dz) * bracket_unchecked(dz);
      const double kp = -phase.real() / (sd.zeta.norm() * dz2);
      if (kp < cert.kappa_prime) {
        cert.kappa_prime = kp;
        cert.worst_x = x;
        cert.worst_xp = xp;
        cert.worst_xi = xi;
      }
    }
  }
  cert.pass = cert.kappa < 1.0 && cert.kappa_prime > 0.0;
  if (!cert.pass && cert.failure.empty()) cert.failure = "coercivity fails: kappa' <= 0";
  return cert;
}

double lipschitz_estimate(const MaximallyRealChart& chart, int samples_per_axis) {
  if (samples_per_axis < 2) throw PreconditionError("lipschitz_estimate: need at least 2 samples");
  const auto pts = box_grid(chart.box(), samples_per_axis);
  const int m = chart.dim();
  std::vector<std::vector<double>> ph;
  for (const auto& p : pts) ph.push_back(chart.phi(p));
  double L = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double num = 0.0, den = 0.0;
      for (int k = 0; k < m; ++k) {
        num += (ph[i][k] - ph[j][k]) * (ph[i][k] - ph[j][k]);
        den += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      }
      L = std::max(L, std::sqrt(num / den));
    }
  // Pairwise quotients approach the supremum from below; the operator norm of
  // dphi at the samples closes the gap at the box edge.
  for (const auto& p : pts) {
    Eigen::MatrixXd D = chart.Zx(p).imag();
    L = std::max(L, D.operatorNorm());
  }
  return L;
}

Projection project_to_chart(const MaximallyRealChart& chart, const VecC& z, double tol) {
  const int m = chart.dim();
  Projection pr;
  pr.x.resize(m);
  for (int i = 0; i < m; ++i) pr.x[i] = z[i].real();
  auto residual = [&](const std::vector<double>& x) {
    const VecC d = chart.Z(x) - z;
    Eigen::VectorXd r(2 * m);
    for (int i = 0; i < m; ++i) {
      r[i] = d[i].real();
      r[m + i] = d[i].imag();
    }
    return r;
  };
  Eigen::VectorXd r = residual(pr.x);
  for (pr.iterations = 0; pr.iterations < 100; ++pr.iterations) {
    Eigen::MatrixXd J(2 * m, m);
    J.topRows(m).setIdentity();
    J.bottomRows(m) = chart.Zx(pr.x).imag();
    const Eigen::VectorXd g = J.transpose() * r;
    if (g.norm() < tol * tol) break;
    const Eigen::VectorXd step = -(J.transpose() * J).ldlt().solve(g);
    double t = 1.0;
    std::vector<double> trial(m);
    Eigen::VectorXd rt;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      for (int i = 0; i < m; ++i) trial[i] = pr.x[i] + t * step[i];
      rt = residual(trial);
      if (rt.squaredNorm() <= r.squaredNorm()) break;
    }
    const double moved = t * step.norm();
    pr.x = trial;
    r = rt;
    if (moved < tol) break;
  }
  pr.dist = r.norm();
  return pr;
}

}  // namespace dcmicro
