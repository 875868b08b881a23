#include "dcmicro/fbi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dcmicro/errors.hpp"
#include "dcmicro/parallel.hpp"
#include "dcmicro/quadrature.hpp"

namespace dcmicro {

namespace {

constexpr cplx I(0.0, 1.0);

double smooth_step_E(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

cplx bilinear(const VecC& a, const VecC& b) { return (a.array() * b.array()).sum(); }

// Breakpoints graded geometrically towards p, from `smallest` up to `largest`.
void graded_breaks(double p, double smallest, double largest, std::vector<double>& out) {
  out.push_back(p);
  for (double s = smallest; s < largest; s *= 2.0) {
    out.push_back(p - s);
    out.push_back(p + s);
  }
}

struct Integrand1D {
  std::vector<double> x;
  std::vector<double> w;
};

Integrand1D line_rule(double lo, double hi, std::vector<double> forced, double max_len, int ppp) {
  Integrand1D r;
  if (!(hi > lo)) return r;
  auto breaks = panel_breaks(lo, hi, forced, max_len);
  auto rule = composite_gauss(breaks, ppp);
  r.x = std::move(rule.x);
  r.w = std::move(rule.w);
  return r;
}

}  // namespace

double Cutoff::operator()(std::span<const double> y) const {
  double r2 = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double c = i < center.size() ? center[i] : 0.0;
    r2 += (y[i] - c) * (y[i] - c);
  }
  const double r = std::sqrt(r2);
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double p = smooth_step_E(b - r), q = smooth_step_E(r - a);
  return p / (p + q);
}

cplx jacobian_delta(const VecC& z, const VecC& zeta) {
  return 1.0 + I * bilinear(z, zeta) / bracket(zeta);
}

cplx jacobian_delta_numeric(const VecC& z, const VecC& zeta) {
  const int m = static_cast<int>(zeta.size());
  auto g = [&](const VecC& w) -> VecC { return w + I * z * bracket_unchecked(w); };
  MatC J(m, m);
  const double h = 1e-6 * std::max(1.0, zeta.norm());
  for (int b = 0; b < m; ++b) {
    VecC p = zeta, q = zeta;
    p[b] += h;
    q[b] -= h;
    J.col(b) = (g(p) - g(q)) / (2.0 * h);
  }
  return J.determinant();
}

bool delta_degenerate(const VecC& z, const VecC& zeta, double tol) {
  return std::abs(jacobian_delta(z, zeta)) < tol;
}

std::optional<Cutoff> default_cutoff(const CorpusMember& u) {
  if (u.kind == MemberKind::dirac) return std::nullopt;
  if (u.kind == MemberKind::function && !u.f->support.empty()) return std::nullopt;
  Cutoff c;
  c.center.assign(u.m, 0.0);
  double half = 8.0;
  if (u.kind == MemberKind::function) {
    half = std::numeric_limits<double>::infinity();
    for (int i = 0; i < u.m; ++i)
      half = std::min({half, -u.f->domain().lo[i], u.f->domain().hi[i]});
  }
  c.a = 0.6 * half;
  c.b = 0.85 * half;
  return c;
}

namespace {

struct KernelContext {
  const FBIKernel* kernel;
  VecC z;
  VecC zeta;
  cplx br;
  double lambda;
  bool with_delta;
  bool euclidean;
  double abs_xi = 0.0;
};

// Kernel value times the surface element at x'.
cplx kernel_at(const KernelContext& k, std::span<const double> xp) {
  const int m = static_cast<int>(xp.size());
  if (k.euclidean) {
    double dot = 0.0, d2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = k.z[i].real() - xp[i];
      dot += d * k.zeta[i].real();
      d2 += d * d;
    }
    return std::exp(cplx(-k.abs_xi * d2, dot));
  }
  const auto& chart = *k.kernel->chart;
  VecC zp = chart.Z(xp);
  VecC dz = k.z - zp;
  const cplx dd = bilinear(dz, dz);
  cplx val = std::exp(I * bilinear(k.zeta, dz) - k.lambda * k.br * dd);
  if (k.with_delta) val *= 1.0 + I * k.lambda * bilinear(dz, k.zeta) / k.br;
  if (!chart.flat()) val *= chart.Zx(xp).determinant();
  return val;
}

// Integral over the window of g(x') * kernel(x'), with g given per point.
cplx integrate_member(const CorpusMember& u, const KernelContext& k, const FBIOptions& opt,
                      const std::function<cplx(std::span<const double>)>& g, const std::vector<double>& extra_breaks,
                      double graded_scale) {
  const int m = u.m;
  const double s = std::max(std::abs(k.br.real()), 1e-12);
  const double width = 1.0 / std::sqrt(k.lambda * s);
  const double W = opt.window * width;
  const double zeta_abs = std::max(k.zeta.norm(), 1e-12);
  const double max_len = std::min(width, 18.0 / zeta_abs);

  std::optional<Cutoff> chi;
  if (!opt.no_cutoff) chi = opt.cutoff ? opt.cutoff : default_cutoff(u);

  std::vector<double> lo(m), hi(m);
  for (int i = 0; i < m; ++i) {
    lo[i] = k.z[i].real() - W;
    hi[i] = k.z[i].real() + W;
    if (u.kind == MemberKind::function) {
      for (const auto& b : u.f->support) {
        lo[i] = std::max(lo[i], b.lo[i]);
        hi[i] = std::min(hi[i], b.hi[i]);
      }
      lo[i] = std::max(lo[i], u.f->domain().lo[i]);
      hi[i] = std::min(hi[i], u.f->domain().hi[i]);
    }
    if (chi) {
      const double c = i < static_cast<int>(chi->center.size()) ? chi->center[i] : 0.0;
      lo[i] = std::max(lo[i], c - chi->b);
      hi[i] = std::min(hi[i], c + chi->b);
    }
    if (!k.kernel->chart->flat()) {
      lo[i] = std::max(lo[i], k.kernel->chart->box().lo[i]);
      hi[i] = std::min(hi[i], k.kernel->chart->box().hi[i]);
    }
  }
  auto weight = [&](std::span<const double> y) -> cplx {
    double c = 1.0;
    if (chi) {
      c = (*chi)(y);
      if (c == 0.0) return 0.0;
    }
    return c * g(y);
  };

  CompensatedSumC acc;
  if (m == 1) {
    if (!(hi[0] > lo[0])) return 0.0;
    std::vector<double> breaks = extra_breaks;
    for (double p : u.singular_points)
      if (graded_scale > 0.0)
        graded_breaks(p, graded_scale, max_len, breaks);
      else
        breaks.push_back(p);
    auto rule = line_rule(lo[0], hi[0], breaks, max_len, opt.points_per_panel);
    for (size_t i = 0; i < rule.x.size(); ++i) {
      const double y[1] = {rule.x[i]};
      const cplx gv = weight(y);
      if (gv == 0.0) continue;
      acc.add(rule.w[i] * gv * kernel_at(k, y));
    }
    return acc.value();
  }

  // m = 2: integrate in coordinates aligned with a kink line when there is one.
  Eigen::Vector2d n(1.0, 0.0), t(0.0, 1.0);
  double s_break = std::numeric_limits<double>::quiet_NaN();
  const Eigen::Vector2d c0(k.z[0].real(), k.z[1].real());
  if (u.kind == MemberKind::function && !u.f->kinks.empty() && u.f->kinks.front().size() == 3) {
    const auto& kk = u.f->kinks.front();
    const double na = std::hypot(kk[0], kk[1]);
    n = Eigen::Vector2d(kk[0], kk[1]) / na;
    t = Eigen::Vector2d(-n[1], n[0]);
    s_break = kk[2] / na - n.dot(c0);
  }
  std::vector<double> forced;
  if (std::isfinite(s_break)) forced.push_back(s_break);
  auto rs = line_rule(-W, W, forced, max_len, opt.points_per_panel);
  auto rt = line_rule(-W, W, {}, max_len, opt.points_per_panel);
  for (size_t a = 0; a < rs.x.size(); ++a) {
    CompensatedSumC row;
    for (size_t b = 0; b < rt.x.size(); ++b) {
      const Eigen::Vector2d y = c0 + rs.x[a] * n + rt.x[b] * t;
      if (y[0] < lo[0] || y[0] > hi[0] || y[1] < lo[1] || y[1] > hi[1]) continue;
      const double yy[2] = {y[0], y[1]};
      const cplx gv = weight(yy);
      if (gv == 0.0) continue;
      row.add(rt.w[b] * gv * kernel_at(k, yy));
    }
    acc.add(rs.w[a] * row.value());
  }
  return acc.value();
}

cplx transform_impl(const CorpusMember& u, const FBIKernel& kernel, const VecC& z, const VecC& zeta,
                    const FBIOptions& opt, bool euclidean) {
  KernelContext k;
  k.kernel = &kernel;
  k.z = z;
  k.zeta = zeta;
  k.lambda = euclidean ? 1.0 : kernel.lambda;
  k.euclidean = euclidean;
  k.with_delta = !euclidean;
  k.abs_xi = zeta.real().norm();
  k.br = euclidean ? cplx(k.abs_xi) : bracket(zeta);
  if (u.m != static_cast<int>(z.size())) throw PreconditionError("fbi: dimension mismatch");

  switch (u.kind) {
    case MemberKind::dirac: {
      std::vector<double> p = u.point;
      return kernel_at(k, p);
    }
    case MemberKind::function: {
      const JetFunction& f = *u.f;
      return integrate_member(u, k, opt, [&](std::span<const double> y) { return f.eval(y); }, {}, 0.0);
    }
    case MemberKind::boundary_value: {
      const auto& ladder = opt.eps_ladder.empty() ? u.eps_ladder : opt.eps_ladder;
      if (ladder.size() < 2) throw PreconditionError("fbi: boundary value needs an eps ladder of length >= 2");
      std::vector<cplx> vals;
      for (double eps : ladder)
        vals.push_back(integrate_member(
            u, k, opt, [&](std::span<const double> y) { return u.regularized(y[0], eps); }, {}, eps / 4.0));
      return extrapolate_to_zero(ladder, vals, 1);
    }
  }
  throw PreconditionError("fbi: unsupported distribution kind");
}

}  // namespace

cplx fbi_transform(const CorpusMember& u, const FBIKernel& kernel, const VecC& z, const VecC& zeta,
                   const FBIOptions& opt) {
  if (!kernel.chart) throw PreconditionError("fbi_transform: kernel has no chart");
  return transform_impl(u, kernel, z, zeta, opt, false);
}

cplx fbi_euclidean(const CorpusMember& u, std::span<const double> x, std::span<const double> xi,
                   const FBIOptions& opt) {
  static const FBIKernel flat1{1.0, corpus_chart("chart_flat")};
  static const FBIKernel flat2{1.0, corpus_chart("chart_flat2")};
  VecC z(x.size()), zeta(xi.size());
  for (size_t i = 0; i < x.size(); ++i) {
    z[i] = x[i];
    zeta[i] = xi[i];
  }
  return transform_impl(u, x.size() == 1 ? flat1 : flat2, z, zeta, opt, true);
}

std::vector<double> Ladder::values() const {
  std::vector<double> v;
  for (int j = 0; j < rungs; ++j) v.push_back(zeta_min * std::ldexp(1.0, j));
  return v;
}

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::m_regular: return "M-regular";
    case DecayClass::exponential: return "exponential";
    default: return "none";
  }
}

nlohmann::json DecayClassification::to_json() const {
  return {{"class", to_string(cls)}, {"A", A},         {"A_drop", A_drop},           {"rate", rate},
          {"rel_residual", rel_residual}, {"power", power}, {"valid_rungs", valid_rungs},
          {"normalization", normalization}};
}

DecayClassification decay_fit(std::span<const double> ladder, std::span<const cplx> values, const RegularSequence& seq,
                              const DecayFitOptions& opt) {
  if (ladder.size() < 6 || values.size() != ladder.size())
    throw PreconditionError("decay_fit: ladder needs at least 6 rungs");
  for (size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] > ladder[i - 1])) throw PreconditionError("decay_fit: ladder must increase");
  DecayClassification out;
  out.normalization = opt.small_m ? "m" : "M";
  const int K = std::min(opt.K_test, seq.k_max());
  double vmax = 0.0;
  for (const auto& v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) {
    out.cls = DecayClass::exponential;
    out.rate = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<double> zs, ly;
  for (size_t i = 0; i < ladder.size(); ++i) {
    const double a = std::abs(values[i]);
    if (a < opt.noise_floor * vmax) break;  // everything beyond is at the floor too
    zs.push_back(ladder[i]);
    ly.push_back(std::log(a));
  }
  out.valid_rungs = static_cast<int>(zs.size());

  // Envelope constant per rung: the smallest A with |F| <= A^{k+1} M_k / |zeta|^k for all k <= K.
  std::vector<double> Ar;
  for (size_t r = 0; r < zs.size(); ++r) {
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= K; ++k) {
      const double lw = opt.small_m ? seq.log_m(k) : seq.log_M(k);
      best = std::max(best, (ly[r] + k * std::log(zs[r]) - lw) / (k + 1));
    }
    Ar.push_back(std::exp(best));
  }
  const bool truncated = zs.size() < ladder.size();
  if (zs.size() >= 2) {
    out.A = *std::max_element(Ar.begin(), Ar.end());
    out.A_drop = *std::max_element(Ar.begin(), Ar.end() - 1);
  } else if (zs.size() == 1) {
    out.A = out.A_drop = Ar[0];
  }
  const bool m_regular = truncated || (out.A_drop > 0.0 && out.A <= (1.0 + opt.stability) * out.A_drop);

  // log|F| ~ a - c|zeta| - p log|zeta|; exponential when the e^{-c|zeta|} factor
  // alone accounts for a significant drop across the ladder.
  bool exponential = false;
  if (zs.size() >= 4) {
    const int n = static_cast<int>(zs.size());
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd Y(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = -zs[i];
      X(i, 2) = -std::log(zs[i]);
      Y[i] = ly[i];
    }
    const Eigen::VectorXd c = X.colPivHouseholderQr().solve(Y);
    const double maxres = (X * c - Y).cwiseAbs().maxCoeff();
    const double span = Y.maxCoeff() - Y.minCoeff();
    out.rate = c[1];
    out.power = c[2];
    out.rel_residual = span > 0.0 ? maxres / span : std::numeric_limits<double>::infinity();
    exponential = out.rate * (zs.back() - zs.front()) >= opt.exp_significance && out.rel_residual < opt.exp_residual;
  }
  if (truncated && !exponential && zs.size() < 4) exponential = true;
  out.cls = exponential ? DecayClass::exponential : (m_regular ? DecayClass::m_regular : DecayClass::none);
  return out;
}

std::vector<const ScanCell*> ScanResult::flagged() const {
  std::vector<const ScanCell*> out;
  for (const auto& c : cells)
    if (!c.fit.regular()) out.push_back(&c);
  return out;
}

std::vector<std::vector<double>> unit_directions(int m, int count) {
  if (m == 1) return {{-1.0}, {1.0}};
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    const double th = 2.0 * std::numbers::pi * i / count;
    double c = std::cos(th), s = std::sin(th);
    if (std::abs(c) < 1e-15) c = 0.0;
    if (std::abs(s) < 1e-15) s = 0.0;
    out.push_back({c, s});
  }
  return out;
}

ScanResult wavefront_scan(const CorpusMember& u, const FBIKernel& kernel, const std::vector<std::vector<double>>& points,
                          const std::vector<std::vector<double>>& directions, const RegularSequence& seq,
                          const Ladder& ladder, const FBIOptions& fopt, const DecayFitOptions& dopt) {
  const auto rungs = ladder.values();
  ScanResult res;
  for (const auto& p : points)
    for (const auto& d : directions) {
      ScanCell c;
      c.point = p;
      c.direction = d;
      c.ladder = rungs;
      c.values.assign(rungs.size(), 0.0);
      res.cells.push_back(std::move(c));
    }
  const int R = static_cast<int>(rungs.size());
  const int total = static_cast<int>(res.cells.size()) * R;
  std::vector<std::string> errors(total);
#pragma omp parallel for schedule(dynamic) if (parallel_enabled())
  for (int job = 0; job < total; ++job) {
    ScanCell& c = res.cells[job / R];
    const int r = job % R;
    try {
      const auto sd = structure_direction(*kernel.chart, c.point, c.direction);
      const VecC zeta = sd.zeta / sd.zeta.norm() * rungs[r];
      c.values[r] = fbi_transform(u, kernel, kernel.chart->Z(c.point), zeta, fopt);
    } catch (const std::exception& e) {
      errors[job] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw DomainError("wavefront_scan: " + e);
  for (auto& c : res.cells) c.fit = decay_fit(c.ladder, c.values, seq, dopt);
  return res;
}

nlohmann::json InversionResult::to_json() const {
  nlohmann::json j;
  j["max_error"] = max_error;
  j["sup_u"] = sup_u;
  j["relative_error"] = sup_u > 0.0 ? max_error / sup_u : max_error;
  for (size_t i = 0; i < x.size(); ++i)
    j["samples"].push_back({{"x", x[i]},
                            {"re", reconstructed[i].real()},
                            {"im", reconstructed[i].imag()},
                            {"target", target[i]}});
  return j;
}

InversionResult inversion(const CorpusMember& u, const ChartPtr& chart, const std::vector<double>& xs, const Cutoff& chi,
                          const InversionOptions& opt) {
  if (u.m != 1 || !chart || chart->dim() != 1 || !chart->flat())
    throw PreconditionError("inversion: implemented for the flat chart in one dimension");
  const auto cert = check_well_positioned(*chart, 1.0, 200);
  if (!cert.pass) throw PreconditionError("inversion: chart is not well positioned");
  std::vector<double> eps_ladder = opt.eps_ladder;
  if (eps_ladder.empty())
    for (double e : {0.1, 0.03, 0.01}) eps_ladder.push_back(e * chi.a * chi.a);
  if (static_cast<int>(eps_ladder.size()) < opt.richardson_order + 1)
    throw PreconditionError("inversion: eps ladder shorter than Richardson order + 1");
  for (double x : xs)
    if (std::abs(x - (chi.center.empty() ? 0.0 : chi.center[0])) > chi.a)
      throw PreconditionError("inversion: x outside the plateau of the cutoff");

  InversionResult res;
  res.x = xs;
  // chi u restricted to its support.
  const double c0 = chi.center.empty() ? 0.0 : chi.center[0];
  double slo = c0 - chi.b, shi = c0 + chi.b;
  if (u.kind == MemberKind::function)
    for (const auto& b : u.f->support) {
      slo = std::max(slo, b.lo[0]);
      shi = std::min(shi, b.hi[0]);
    }
  auto chiu = [&](double y) -> cplx {
    if (y <= slo || y >= shi) return 0.0;
    const double yy[1] = {y};
    if (u.kind == MemberKind::function) return chi(yy) * u.f->eval(yy);
    throw PreconditionError("inversion: function members only");
  };
  for (double x : xs) {
    res.target.push_back(chiu(x).real());
    res.sup_u = std::max(res.sup_u, std::abs(chiu(x)));
  }
  for (int i = 0; i <= 200; ++i) res.sup_u = std::max(res.sup_u, std::abs(chiu(slo + (shi - slo) * i / 200.0)));
  const double eps_min = *std::min_element(eps_ladder.begin(), eps_ladder.end());
  const double R = opt.R_factor / std::sqrt(eps_min);
  const double xmin = *std::min_element(xs.begin(), xs.end()), xmax = *std::max_element(xs.begin(), xs.end());

  std::vector<double> zero{0.0};
  auto xi_rule = composite_gauss(panel_breaks(-R, R, zero, 2.0), opt.points_per_panel);
  const int NX = static_cast<int>(xi_rule.x.size());
  const int P = static_cast<int>(xs.size());
  // S[q][i] = w_xi |xi|^{1/2} sum_{x'} w' e^{i xi (x - x') - |xi| (x - x')^2} F(x', xi)
  std::vector<cplx> S(static_cast<size_t>(NX) * P, 0.0);
#pragma omp parallel for schedule(dynamic) if (parallel_enabled())
  for (int q = 0; q < NX; ++q) {
    const double xi = xi_rule.x[q];
    const double a = std::abs(xi);
    const double width = 1.0 / std::sqrt(a);
    const double reach = 6.5 * width;
    const double len = std::min({0.5, width, 6.0 / a});
    // y rule over the support, x' rule over the reach of both Gaussians.
    auto yr = line_rule(slo, shi, {}, len, opt.points_per_panel);
    std::vector<cplx> fy(yr.x.size());
    for (size_t i = 0; i < yr.x.size(); ++i) fy[i] = yr.w[i] * chiu(yr.x[i]);
    const double plo = std::max(slo - reach, xmin - reach), phi = std::min(shi + reach, xmax + reach);
    auto pr = line_rule(plo, phi, {}, len, opt.points_per_panel);
    const double sg = xi > 0 ? 1.0 : -1.0;
    for (size_t j = 0; j < pr.x.size(); ++j) {
      const double xp = pr.x[j];
      CompensatedSumC F;
      for (size_t i = 0; i < yr.x.size(); ++i) {
        if (fy[i] == 0.0) continue;
        const double d = xp - yr.x[i];
        const double g = a * d * d;
        if (g > 50.0) continue;
        // Delta(x' - y, xi) = 1 + i (x' - y) sgn(xi) on the flat chart.
        F.add(fy[i] * std::exp(cplx(-g, xi * d)) * cplx(1.0, d * sg));
      }
      const cplx Fv = F.value();
      if (Fv == 0.0) continue;
      for (int i = 0; i < P; ++i) {
        const double d = xs[i] - xp;
        const double g = a * d * d;
        if (g > 50.0) continue;
        S[static_cast<size_t>(q) * P + i] += pr.w[j] * std::exp(cplx(-g, xi * d)) * Fv;
      }
    }
    for (int i = 0; i < P; ++i) S[static_cast<size_t>(q) * P + i] *= xi_rule.w[q] * std::sqrt(a);
  }
  const double norm = 1.0 / std::sqrt(2.0 * std::pow(std::numbers::pi, 3));
  res.per_eps.assign(eps_ladder.size(), std::vector<cplx>(P, 0.0));
  for (size_t e = 0; e < eps_ladder.size(); ++e) {
    const double eps = eps_ladder[e];
    for (int i = 0; i < P; ++i) {
      CompensatedSumC acc;
      for (int q = 0; q < NX; ++q) {
        const double xi = xi_rule.x[q];
        acc.add(std::exp(-eps * xi * xi) * S[static_cast<size_t>(q) * P + i]);
      }
      res.per_eps[e][i] = norm * acc.value();
    }
  }
  // Richardson in eps: polynomial through the ladder, evaluated at eps = 0.
  std::vector<double> ladder = eps_ladder;
  for (int i = 0; i < P; ++i) {
    std::vector<cplx> y;
    for (size_t e = 0; e < ladder.size(); ++e) y.push_back(res.per_eps[e][i]);
    res.reconstructed.push_back(extrapolate_to_zero(ladder, y, opt.richardson_order));
    res.max_error = std::max(res.max_error, std::abs(res.reconstructed.back() - res.target[i]));
  }
  return res;
}

cplx boundary_value(const WedgeFunction& f, const ChartPtr& chart, const std::function<double(std::span<const double>)>& test,
                    const BoundaryValueOptions& opt) {
  const int m = f.m;
  if (!chart || chart->dim() != m) throw PreconditionError("boundary_value: chart dimension mismatch");
  if (static_cast<int>(opt.t_ladder.size()) < f.growth_N + 2)
    throw PreconditionError("boundary_value: t ladder shorter than slow-growth order + 2");
  std::vector<cplx> vals;
  for (double t : opt.t_ladder) {
    if (!(t > 0.0 && t < f.height)) throw PreconditionError("boundary_value: t outside (0, height)");
    CompensatedSumC acc;
    auto eval_at = [&](std::span<const double> x) -> cplx {
      VecC z = chart->Z(x);
      for (int i = 0; i < m; ++i) z[i] += I * t * f.gamma[i];
      const cplx v = f.eval(z);
      const double bound = f.growth_C / std::pow(t, f.growth_N);
      if (!(std::abs(v) <= bound * (1.0 + 1e-9)))
        throw DivergenceError("boundary_value: |f| exceeds the slow-growth certificate C/t^N");
      cplx jac = chart->flat() ? cplx(1.0) : chart->Zx(x).determinant();
      return v * test(x) * jac;
    };
    if (m == 1) {
      std::vector<double> breaks;
      for (double p : f.singular_points) graded_breaks(p, t / 4.0, 1.0, breaks);
      auto rule = line_rule(f.V.lo[0], f.V.hi[0], breaks, 0.1, opt.points_per_panel);
      for (size_t i = 0; i < rule.x.size(); ++i) {
        const double x[1] = {rule.x[i]};
        acc.add(rule.w[i] * eval_at(x));
      }
    } else {
      auto r0 = line_rule(f.V.lo[0], f.V.hi[0], {}, 0.1, opt.points_per_panel);
      auto r1 = line_rule(f.V.lo[1], f.V.hi[1], {}, 0.1, opt.points_per_panel);
      for (size_t i = 0; i < r0.x.size(); ++i)
        for (size_t j = 0; j < r1.x.size(); ++j) {
          const double x[2] = {r0.x[i], r1.x[j]};
          acc.add(r0.w[i] * r1.w[j] * eval_at(x));
        }
    }
    vals.push_back(acc.value());
  }
  return extrapolate_to_zero(opt.t_ladder, vals, f.growth_N + 1);
}

}  // namespace dcmicro
