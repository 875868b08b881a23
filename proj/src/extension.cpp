#include "dcmicro/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dcmicro/errors.hpp"
#include "dcmicro/log.hpp"
#include "dcmicro/parallel.hpp"
#include "dcmicro/quadrature.hpp"

namespace dcmicro {

namespace {

constexpr cplx I(0.0, 1.0);

Box shrink(const Box& b, double f) {
  Box out = b;
  for (size_t i = 0; i < b.lo.size(); ++i) {
    const double c = 0.5 * (b.lo[i] + b.hi[i]), h = 0.5 * (b.hi[i] - b.lo[i]) * f;
    out.lo[i] = c - h;
    out.hi[i] = c + h;
  }
  return out;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

VecC to_vec(std::span<const double> v) {
  VecC z(v.size());
  for (size_t i = 0; i < v.size(); ++i) z[i] = v[i];
  return z;
}

int total(std::span<const int> a) {
  int s = 0;
  for (int x : a) s += x;
  return s;
}

// Truncation orders per quadrature node and their minimum n.
struct NodeOrders {
  std::vector<int> N;
  int n = 0;
  int Nmax = 0;
};

NodeOrders node_orders(const ExtensionOperator& op, const VecC& v, double r) {
  const auto& rule = op.rule();
  NodeOrders o;
  o.N.assign(rule.w.size(), -1);
  o.n = std::numeric_limits<int>::max();
  for (size_t i = 0; i < rule.w.size(); ++i) {
    if (rule.psi[i] == 0.0 && rule.dpsi[i] == 0.0) continue;
    o.N[i] = op.trunc((v + r * rule.w[i]).norm());
    o.n = std::min(o.n, o.N[i]);
    o.Nmax = std::max(o.Nmax, o.N[i]);
  }
  return o;
}

cplx tail_sum(const std::vector<cplx>& s, int n, int N) {
  cplx t = 0.0;
  for (int d = N; d > n; --d) t += s[d];
  return t;
}

void check_u(const ExtensionOperator& op, std::span<const double> u) {
  if (static_cast<int>(u.size()) != op.m()) throw PreconditionError("extension: u has the wrong dimension");
  if (!op.V().contains(u, 1e-12)) throw DomainError("extension: u outside the inner box V");
}

void check_v(const ExtensionOperator& op, std::span<const double> v) {
  if (static_cast<int>(v.size()) != op.m()) throw PreconditionError("extension: v has the wrong dimension");
  if (norm(v) >= op.delta())
    throw OutOfWorkingRadius("extension: |v| = " + std::to_string(norm(v)) + " is not below delta = " +
                             std::to_string(op.delta()));
}

std::vector<int> unit(int m, int j) {
  std::vector<int> e(m, 0);
  e[j] = 1;
  return e;
}

}  // namespace

ExtensionOperator::ExtensionOperator(const RegularSequence& seq, JetPtr f, ExtensionConfig cfg)
    : ExtensionOperator(seq, VectorFrame::coordinate(f->dim()), f, 1.0, std::move(cfg)) {}

ExtensionOperator::ExtensionOperator(const RegularSequence& seq, VectorFrame frame, JetPtr f, cplx s,
                                     ExtensionConfig cfg)
    : seq_(std::make_shared<RegularSequence>(seq)),
      f_(std::move(f)),
      frame_(std::move(frame)),
      s_(s),
      cfg_(std::move(cfg)),
      m_(f_->dim()),
      psi_(f_->dim(), cfg_.eps) {
  init();
}

ExtensionOperator ExtensionOperator::on_chart(const RegularSequence& seq, const ChartPtr& chart, JetPtr f,
                                              ExtensionConfig cfg) {
  if (!cfg.V) cfg.V = chart->box();
  return ExtensionOperator(seq, chart_frame(chart), std::move(f), I, std::move(cfg));
}

void ExtensionOperator::init() {
  if (frame_.dim() != m_) throw PreconditionError("extension: frame and function dimensions differ");
  if (m_ != 1 && m_ != 2) throw PreconditionError("extension: m must be 1 or 2");
  if (cfg_.mode == ExtensionMode::fixed_kappa && cfg_.kappa < 0) throw PreconditionError("extension: kappa < 0");
  V_ = cfg_.V ? *cfg_.V : shrink(f_->domain(), 0.9);
  for (int i = 0; i < m_; ++i)
    if (!(V_.lo[i] >= f_->domain().lo[i] && V_.hi[i] <= f_->domain().hi[i]))
      throw PreconditionError("extension: V must lie inside the domain of f");
  cap_ = cfg_.trunc_cap > 0 ? cfg_.trunc_cap : (m_ == 1 ? 40 : 12);
  cap_ = std::min({cap_, seq_->k_max(), f_->max_order() - 3});

  const int K = std::min(cfg_.class_K, f_->max_order());
  fit_ = class_constant_fit(*f_, frame_, *seq_, K, box_grid(V_, cfg_.class_grid));
  if (cfg_.C) {
    C_ = *cfg_.C;
  } else {
    if (!fit_.finite) throw DomainError("extension: no class constant for " + f_->name() + ": " + fit_.failure);
    if (!fit_.stable) log_warning("extension: class constant of " + f_->name() + " still grows at K = " + std::to_string(K));
    C_ = fit_.C;
  }
  if (!(C_ > 0.0)) C_ = 1e-12;
  c_eff_ = cfg_.mode == ExtensionMode::moderate_growth ? seq_->c_moderate() : std::pow(seq_->c(), cfg_.kappa);
  const double e = std::numbers::e;
  factor_ = (1.0 + cfg_.eps) * c_eff_ * e * m_ * C_;
  delta_ = 1.0 / (2.0 * (1.0 + cfg_.eps) * (1.0 + cfg_.eps) * c_eff_ * e * m_ * C_);
  rule_ = ball_rule_for_degree(psi_, cap_);
  assoc_ = std::make_shared<AssociatedEvaluator>(*seq_);
}

int ExtensionOperator::trunc(double r) const {
  const int N = assoc_->bigN(factor_ * r);
  if (N > cap_) {
    log_warning("extension: truncation order clamped to " + std::to_string(cap_));
    return cap_;
  }
  return N;
}

Taylor ExtensionOperator::coefficients(std::span<const double> u, std::span<const int> gamma, int order) const {
  const int g = total(gamma);
  const Taylor J = frame_jets(frame_, *f_, u, order + g);
  Taylor out(m_, order);
  std::vector<int> ag(m_);
  for (int d : out.layout().valid()) {
    const auto a = out.layout().multi_index(d);
    for (int i = 0; i < m_; ++i) ag[i] = a[i] + (gamma.empty() ? 0 : gamma[i]);
    const int k = out.layout().degree(d);
    out.dense(d) = std::pow(s_, k) * J.coeff(ag) / multi_factorial(a);
  }
  return out;
}

nlohmann::json ExtensionOperator::describe() const {
  return {{"function", f_->name()},
          {"m", m_},
          {"eps", cfg_.eps},
          {"mode", cfg_.mode == ExtensionMode::moderate_growth ? "moderate_growth" : "fixed_kappa"},
          {"kappa", cfg_.kappa},
          {"C", C_},
          {"c_eff", c_eff_},
          {"factor", factor_},
          {"delta", delta_},
          {"trunc_cap", cap_},
          {"s", {s_.real(), s_.imag()}},
          {"V", {{"lo", V_.lo}, {"hi", V_.hi}}},
          {"class_fit", fit_.to_json()}};
}

namespace {

// X^gamma F is only controlled for |gamma| <= kappa in fixed-kappa mode.
void check_gamma(const ExtensionOperator& op, std::span<const int> gamma) {
  const int g = total(gamma);
  if (op.config().mode == ExtensionMode::fixed_kappa && g > op.config().kappa)
    throw PreconditionError("extension: |gamma| = " + std::to_string(g) + " exceeds kappa = " +
                            std::to_string(op.config().kappa));
}

cplx evaluate_impl(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v,
                   std::span<const int> gamma) {
  check_u(op, u);
  check_v(op, v);
  const double r = norm(v);
  if (r == 0.0) return op.coefficients(u, gamma, 0).value();
  const VecC vv = to_vec(v);
  const auto orders = node_orders(op, vv, r);
  const Taylor g = op.coefficients(u, gamma, orders.Nmax);
  const auto& rule = op.rule();
  const int nodes = static_cast<int>(rule.w.size());
  std::vector<cplx> vals(nodes, 0.0);
#pragma omp parallel for if (parallel_enabled())
  for (int i = 0; i < nodes; ++i) {
    if (orders.N[i] <= orders.n || rule.psi[i] == 0.0) continue;
    const VecC z = vv + r * rule.w[i];
    vals[i] = rule.weight[i] * rule.psi[i] * tail_sum(degree_sums(g, z, orders.N[i]), orders.n, orders.N[i]);
  }
  CompensatedSumC acc;
  const auto pv = degree_sums(g, vv, orders.n);
  for (int d = 0; d <= orders.n; ++d) acc.add(pv[d]);
  for (const auto& x : vals) acc.add(x);
  return acc.value();
}

}  // namespace

cplx evaluate_extension(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v,
                        std::span<const int> gamma) {
  check_gamma(op, gamma);
  return evaluate_impl(op, u, v, gamma);
}

cplx evaluate_extension(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v) {
  const std::vector<int> zero(op.m(), 0);
  return evaluate_extension(op, u, v, zero);
}

cplx lj_residual(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v, int j) {
  check_u(op, u);
  check_v(op, v);
  const int m = op.m();
  if (j < 0 || j >= m) throw PreconditionError("lj_residual: field index out of range");
  const double r = norm(v);
  if (r == 0.0) throw DomainError("lj_residual: v = 0");
  const VecC vv = to_vec(v);
  const auto orders = node_orders(op, vv, r);
  const std::vector<int> zero(m, 0);
  const auto ej = unit(m, j);
  const Taylor g = op.coefficients(u, zero, orders.Nmax);
  const Taylor gj = op.coefficients(u, ej, orders.Nmax);
  const cplx s = op.s();
  const auto& rule = op.rule();
  const int nodes = static_cast<int>(rule.w.size());
  std::vector<cplx> vals(nodes, 0.0);
#pragma omp parallel for if (parallel_enabled())
  for (int i = 0; i < nodes; ++i) {
    if (orders.N[i] <= orders.n) continue;
    const VecC& w = rule.w[i];
    const VecC z = vv + r * w;
    const cplx T = tail_sum(degree_sums(g, z, orders.N[i]), orders.n, orders.N[i]);
    const cplx XT = tail_sum(degree_sums(gj, z, orders.N[i]), orders.n, orders.N[i]);
    // |v|^{2m} d/dv_j of |v|^{-2m} psi((z - v)/|v|)
    const double w2 = w.squaredNorm();
    const double dK = -2.0 * m * v[j] / (r * r) * rule.psi[i] +
                      rule.dpsi[i] * (-2.0 * w[j].real() / r - 2.0 * w2 * v[j] / (r * r));
    vals[i] = rule.weight[i] * (dK * T - s * rule.psi[i] * XT);
  }
  CompensatedSumC acc;
  // d/dv_j - s X_j of P_n leaves the top degree of the shifted coefficients.
  acc.add(-s * degree_sums(gj, vv, orders.n)[orders.n]);
  for (const auto& x : vals) acc.add(x);
  return acc.value();
}

cplx lj_residual_fd(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v, int j, double h) {
  std::vector<double> p(v.begin(), v.end()), q(v.begin(), v.end());
  p[j] += h;
  q[j] -= h;
  const cplx dv = (evaluate_extension(op, u, p) - evaluate_extension(op, u, q)) / (2.0 * h);
  return dv - op.s() * evaluate_impl(op, u, v, unit(op.m(), j));
}

Taylor extension_v_jet(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v,
                       std::span<const int> gamma) {
  check_gamma(op, gamma);
  check_u(op, u);
  check_v(op, v);
  const int m = op.m();
  const double r = norm(v);
  if (r == 0.0) throw DomainError("extension_v_jet: v = 0");
  const VecC vv = to_vec(v);
  const auto orders = node_orders(op, vv, r);
  const Taylor g = op.coefficients(u, gamma, orders.Nmax);
  std::vector<Taylor> V;
  for (int l = 0; l < m; ++l) V.push_back(Taylor::variable(m, 2, l, v[l]));
  Taylor v2(m, 2);
  for (const auto& x : V) v2 += x * x;
  const Taylor vpow = pow(v2, -m);  // |v|^{-2m}
  const auto& rule = op.rule();
  const double jac = std::pow(r, 2 * m);
  const int nodes = static_cast<int>(rule.w.size());
  std::vector<Taylor> vals(nodes, Taylor(m, 2));
  const double eps2 = op.cutoff().eps() * op.cutoff().eps();
#pragma omp parallel for if (parallel_enabled())
  for (int i = 0; i < nodes; ++i) {
    if (orders.N[i] <= orders.n) continue;
    const VecC z = vv + r * rule.w[i];
    const cplx T = tail_sum(degree_sums(g, z, orders.N[i]), orders.n, orders.N[i]);
    Taylor d2(m, 2);
    for (int l = 0; l < m; ++l) {
      const Taylor dr = z[l].real() - V[l];
      d2 += dr * dr;
      d2 += z[l].imag() * z[l].imag();
    }
    const Taylor t = d2 / v2;
    if (t.value().real() >= eps2) continue;
    const Taylor K = vpow * op.cutoff().profile_series(t) * rule.renorm;
    vals[i] = K * (rule.weight[i] * jac * T);
  }
  // P_n(V) as a series.
  Taylor out(m, 2);
  for (int d : g.layout().valid()) {
    if (g.layout().degree(d) > orders.n) break;
    const auto a = g.layout().multi_index(d);
    Taylor mono(m, 2, g.dense(d));
    for (int l = 0; l < m; ++l)
      for (int k = 0; k < a[l]; ++k) mono *= V[l];
    out += mono;
  }
  for (const auto& x : vals) out += x;
  return out;
}

std::vector<double> default_shells(double delta, int J) {
  std::vector<double> s;
  for (int j = 1; j <= J; ++j) s.push_back(delta * std::ldexp(1.0, -j));
  return s;
}

std::vector<std::vector<double>> shell_directions(int m) {
  if (m == 1) return {{1.0}, {-1.0}};
  std::vector<std::vector<double>> d;
  for (int k = 0; k < 4; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 4 + 0.3;
    d.push_back({std::cos(th), std::sin(th)});
  }
  return d;
}

std::map<double, double> ExtensionField::per_shell_sup() const {
  std::map<double, double> out;
  for (double s : shells) out[s] = 0.0;
  for (const auto& smp : samples) {
    const double r = norm(smp.v);
    auto it = out.lower_bound(r * (1 - 1e-12));
    if (it != out.end()) it->second = std::max(it->second, smp.residual);
  }
  return out;
}

ExtensionField build_field(const ExtensionOperator& op, const std::vector<std::vector<double>>& u_grid,
                           const std::vector<double>& shells) {
  ExtensionField field;
  field.shells = shells;
  const auto dirs = shell_directions(op.m());
  for (const auto& u : u_grid)
    for (double rho : shells)
      for (const auto& d : dirs) {
        ExtensionField::Sample s;
        s.u = u;
        for (double x : d) s.v.push_back(rho * x);
        field.samples.push_back(std::move(s));
      }
  // The node loops inside are the parallel level.
  for (auto& s : field.samples) {
    s.F = evaluate_extension(op, s.u, s.v);
    s.residual = 0.0;
    for (int j = 0; j < op.m(); ++j) s.residual = std::max(s.residual, std::abs(lj_residual(op, s.u, s.v, j)));
  }
  return field;
}

nlohmann::json DecayReport::to_json() const {
  nlohmann::json j;
  j["Q"] = Q;
  j["finite"] = finite;
  j["stable"] = stable;
  j["Q_without_smallest"] = Q_without_smallest;
  j["K_test"] = K_test;
  j["conforms"] = conforms();
  for (const auto& [rho, sup] : per_shell_sup) {
    nlohmann::json row = {{"rho", rho}, {"sup_residual", sup}};
    auto it = per_k_margin.find(rho);
    if (it != per_k_margin.end()) row["margin"] = it->second;
    j["shells"].push_back(row);
  }
  return j;
}

namespace {

double fit_Q(const std::map<double, double>& sup, const RegularSequence& seq, int K, double skip_below) {
  double lq = -std::numeric_limits<double>::infinity();
  for (const auto& [rho, s] : sup) {
    if (rho <= skip_below || s <= 0.0) continue;
    for (int k = 0; k <= K; ++k) lq = std::max(lq, (std::log(s) - seq.log_m(k) - k * std::log(rho)) / (k + 1));
  }
  return std::exp(lq);
}

}  // namespace

DecayReport fit_decay(const std::map<double, double>& per_shell_sup, const RegularSequence& seq, int K_test,
                      double stability) {
  if (per_shell_sup.empty()) throw PreconditionError("fit_decay: empty field");
  if (K_test > seq.k_max()) throw RangeError("fit_decay: K_test beyond K_max");
  DecayReport rep;
  rep.K_test = K_test;
  rep.per_shell_sup = per_shell_sup;
  rep.Q = fit_Q(per_shell_sup, seq, K_test, 0.0);
  const double smallest = per_shell_sup.begin()->first;
  rep.Q_without_smallest = per_shell_sup.size() > 1 ? fit_Q(per_shell_sup, seq, K_test, smallest) : rep.Q;
  rep.finite = std::isfinite(rep.Q);
  rep.stable = rep.Q <= (1.0 + stability) * rep.Q_without_smallest || rep.Q == 0.0;
  for (const auto& [rho, s] : per_shell_sup) {
    std::vector<double> mg;
    for (int k = 0; k <= K_test; ++k) {
      const double bound = (k + 1) * std::log(rep.Q) + seq.log_m(k) + k * std::log(rho);
      mg.push_back(s > 0.0 ? bound - std::log(s) : std::numeric_limits<double>::infinity());
    }
    rep.per_k_margin[rho] = mg;
  }
  return rep;
}

DecayReport fit_decay(const ExtensionField& field, const RegularSequence& seq, int K_test, double stability) {
  if (field.samples.empty()) throw PreconditionError("fit_decay: empty field");
  if (field.shells.size() < 4) throw PreconditionError("fit_decay: at least 4 shells required");
  return fit_decay(field.per_shell_sup(), seq, K_test, stability);
}

nlohmann::json SlopeReport::to_json() const {
  return {{"rho", rho}, {"D", D}, {"slope", slope}, {"exact", exact}, {"pass", pass}};
}

SlopeReport jet_consistency(const ExtensionOperator& op, std::span<const double> u, std::span<const int> beta,
                            std::span<const int> gamma, const std::vector<double>& shells, double min_slope) {
  const int m = op.m();
  if (static_cast<int>(beta.size()) != m || static_cast<int>(gamma.size()) != m)
    throw PreconditionError("jet_consistency: multi-index length must be m");
  const int b = total(beta);
  if (b > 2) throw RangeError("jet_consistency: |beta| <= 2");
  if (shells.size() < 2) throw PreconditionError("jet_consistency: at least 2 shells");
  std::vector<int> bg(m);
  for (int i = 0; i < m; ++i) bg[i] = beta[i] + gamma[i];
  const std::vector<int> zero(m, 0);
  const cplx target = std::pow(op.s(), b) * op.coefficients(u, bg, 0).value();
  SlopeReport rep;
  double scale = std::abs(target);
  for (double rho : shells) {
    double D = 0.0;
    for (const auto& d : shell_directions(m)) {
      std::vector<double> v;
      for (double x : d) v.push_back(rho * x);
      const Taylor jet = extension_v_jet(op, u, v, gamma);
      D = std::max(D, std::abs(jet.derivative_value(beta) - target));
    }
    rep.rho.push_back(rho);
    rep.D.push_back(D);
  }
  scale = std::max(scale, 1.0);
  rep.exact = std::all_of(rep.D.begin(), rep.D.end(), [&](double D) { return D <= 1e-9 * scale; });
  // least-squares slope of log D against log rho
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < rep.rho.size(); ++i) {
    if (rep.D[i] <= 0.0) continue;
    const double x = std::log(rep.rho[i]), y = std::log(rep.D[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  rep.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  rep.pass = rep.exact || rep.slope >= min_slope;
  return rep;
}

std::pair<std::vector<double>, std::vector<double>> chart_coordinates(const MaximallyRealChart& chart, const VecC& z) {
  std::vector<double> u(z.size()), v(z.size());
  for (int i = 0; i < z.size(); ++i) u[i] = z[i].real();
  const auto phi = chart.phi(u);
  for (int i = 0; i < z.size(); ++i) v[i] = z[i].imag() - phi[i];
  return {u, v};
}

DbarResult dbar_residual_on_manifold(const MaximallyRealChart& chart, const ExtensionOperator& op, const VecC& z) {
  const int m = op.m();
  if (chart.dim() != m) throw PreconditionError("dbar_residual: chart dimension mismatch");
  DbarResult res;
  std::tie(res.u, res.v) = chart_coordinates(chart, z);
  if (!op.V().contains(res.u, 1e-12) || norm(res.v) >= op.delta())
    throw OutOfWorkingRadius("dbar_residual: z outside the tube of radius delta over V");
  res.dist = project_to_chart(chart, z).dist;
  res.dbar.assign(m, 0.0);
  if (norm(res.v) == 0.0) return res;
  std::vector<cplx> L(m);
  for (int k = 0; k < m; ++k) L[k] = lj_residual(op, res.u, res.v, k);
  const MatC Zx = chart.Zx(res.u);
  // d/dz-bar_j = (1/2)(d/du_j + i sum_l Zx_lj d/dv_l) = (i/2) sum_k Zx_kj L_k
  for (int j = 0; j < m; ++j) {
    cplx s = 0.0;
    for (int k = 0; k < m; ++k) s += Zx(k, j) * L[k];
    res.dbar[j] = 0.5 * I * s;
  }
  return res;
}

DbarResult dbar_residual_fd(const MaximallyRealChart& chart, const ExtensionOperator& op, const VecC& z, double h) {
  const int m = op.m();
  DbarResult res;
  std::tie(res.u, res.v) = chart_coordinates(chart, z);
  res.dist = project_to_chart(chart, z).dist;
  auto G = [&](const VecC& w) {
    auto [u, v] = chart_coordinates(chart, w);
    return evaluate_extension(op, u, v);
  };
  res.dbar.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    VecC xp = z, xm = z, yp = z, ym = z;
    xp[j] += h;
    xm[j] -= h;
    yp[j] += I * h;
    ym[j] -= I * h;
    const cplx dx = (G(xp) - G(xm)) / (2.0 * h), dy = (G(yp) - G(ym)) / (2.0 * h);
    res.dbar[j] = 0.5 * (dx + I * dy);
  }
  return res;
}

}  // namespace dcmicro
