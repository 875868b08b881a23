#include "dcmicro/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "dcmicro/corpus.hpp"
#include "dcmicro/errors.hpp"
#include "dcmicro/fbi.hpp"
#include "dcmicro/parallel.hpp"

namespace dcmicro {

namespace {

constexpr cplx I(0.0, 1.0);

// Argument layout helpers for (x, t, zeta_0, zeta, tau).
struct Layout {
  int d, n;
  int x(int k) const { return k; }
  int t(int l) const { return d + l; }
  int z0() const { return d + n; }
  int z(int k) const { return d + n + 1 + k; }
  int tau(int l) const { return 2 * d + n + 1 + l; }
};

// Lifted layout (x, t, r, zeta_0, zeta, tau).
struct Lifted {
  int d, n;
  int x(int k) const { return k; }
  int t(int l) const { return d + l; }
  int r(int j) const { return d + n + j; }
  int z0() const { return d + 2 * n; }
  int z(int k) const { return d + 2 * n + 1 + k; }
  int tau(int l) const { return 2 * d + 2 * n + 1 + l; }
  int size() const { return 2 * d + 3 * n + 1; }
};

// Theta-system arguments taken out of a lifted vector (drops r).
template <class T>
std::vector<T> theta_args(const Lifted& L, const std::vector<T>& y) {
  std::vector<T> a;
  for (int k = 0; k < L.d; ++k) a.push_back(y[L.x(k)]);
  for (int l = 0; l < L.n; ++l) a.push_back(y[L.t(l)]);
  a.push_back(y[L.z0()]);
  for (int k = 0; k < L.d; ++k) a.push_back(y[L.z(k)]);
  for (int l = 0; l < L.n; ++l) a.push_back(y[L.tau(l)]);
  return a;
}

// Coefficients of H_j^theta in the lifted coordinates, as series.  Input
// variables have order o; the result has order o - 1.
std::vector<Taylor> field_series(const ThetaSystem& ts, int j, const std::vector<Taylor>& y) {
  const NonlinearSystem& sys = *ts.base;
  const Lifted L{sys.d, sys.n};
  const Layout A{sys.d, sys.n};
  const Taylor f = ts.eval_series(theta_args(L, y))[j];
  const int o = f.order() - 1;
  auto dlift = [&](int arg) {
    // Lifted variable carrying theta argument `arg`.
    int v;
    if (arg < sys.d + sys.n) v = arg;
    else v = arg + sys.n;
    return f.derivative(v);
  };
  std::vector<Taylor> yt;
  for (const auto& v : y) yt.push_back(v.truncated(o));
  const Taylor fz0 = dlift(A.z0());
  std::vector<Taylor> h(L.size(), Taylor(f.nvars(), o));
  h[L.r(j)] = Taylor(f.nvars(), o, 1.0);
  Taylor h0 = f.truncated(o);
  for (int k = 0; k < sys.d; ++k) {
    const Taylor fzk = dlift(A.z(k));
    h[L.x(k)] = -fzk;
    h[L.z(k)] = dlift(A.x(k)) + yt[L.z(k)] * fz0;
    h0 -= yt[L.z(k)] * fzk;
  }
  for (int l = 0; l < sys.n; ++l) {
    const Taylor ftl = dlift(A.tau(l));
    h[L.t(l)] = -ftl;
    h[L.tau(l)] = dlift(A.t(l)) + yt[L.tau(l)] * fz0;
    h0 -= yt[L.tau(l)] * ftl;
  }
  h[L.z0()] = h0;
  return h;
}

Taylor apply_field(const std::vector<Taylor>& h, const Taylor& phi) {
  const int o = phi.order() - 1;
  Taylor out(phi.nvars(), o);
  for (size_t i = 0; i < h.size(); ++i) out += h[i].truncated(o) * phi.derivative(static_cast<int>(i));
  return out;
}

// Polynomial probes in all lifted variables.
template <class T>
std::vector<T> probes(const std::vector<T>& y) {
  const int D = static_cast<int>(y.size());
  std::vector<T> out;
  for (int i = 0; i < D; ++i) out.push_back(y[i]);
  T q = y[0] * 0.0;
  for (int i = 0; i < D; ++i) q = q + (0.3 + 0.1 * i) * y[i] * y[(i + 1) % D];
  out.push_back(q);
  T c = y[D - 1] * y[D - 1] * y[0] + 0.5 * y[D / 2] * y[D / 2] * y[D / 2];
  out.push_back(c);
  return out;
}

// Series in `nvars` variables from one in fewer variables (extra variables absent).
Taylor embed(const Taylor& s, int nvars) {
  Taylor out(nvars, s.order());
  for (int idx : s.layout().valid()) {
    auto a = s.layout().multi_index(idx);
    a.resize(nvars, 0);
    out.coeff_ref(a) = s.dense(idx);
  }
  return out;
}

RegularSequence sequence_by_name(const std::string& name) {
  if (name.rfind("gevrey", 0) == 0) return RegularSequence::gevrey(std::stod(name.substr(6)));
  throw ConfigError("unknown sequence '" + name + "'");
}

void check_args(const NonlinearSystem& sys, std::span<const double> point) {
  if (static_cast<int>(point.size()) != sys.d + sys.n)
    throw PreconditionError("nonlinear: point must have d + n coordinates");
}

}  // namespace

const std::vector<std::string>& system_names() {
  static const std::vector<std::string> names = {"sys_burgers", "sys_burgers_hierarchy", "sys_cr", "sys_cr_quadratic",
                                                 "sys_transport"};
  return names;
}

NonlinearSystem corpus_system(const std::string& name) {
  // Arguments are (x, t, zeta_0, zeta) for d = n = 1 unless noted.
  if (name == "sys_cr")
    return make_system(
        name, 1, 1, [](const auto& v) { return std::vector{I * v[3]}; }, {"holo_square"}, "u_t = i u_x");
  if (name == "sys_transport")
    return make_system(
        name, 1, 1, [](const auto& v) { return std::vector{-v[3]}; }, {"transport_abs_cubed"}, "u_t = -u_x");
  if (name == "sys_burgers")
    return make_system(
        name, 1, 1, [](const auto& v) { return std::vector{v[2] * v[3]}; }, {"burgers_line"}, "u_t = u u_x");
  if (name == "sys_cr_quadratic")
    return make_system(
        name, 1, 1, [](const auto& v) { return std::vector{I * v[3] + v[2] * v[2]}; }, {"quadratic_blowup"},
        "u_t = i u_x + u^2");
  if (name == "sys_burgers_hierarchy")
    // (x, t1, t2, zeta_0, zeta)
    return make_system(
        name, 1, 2, [](const auto& v) { return std::vector{v[3] * v[4], v[3] * v[3] * v[4]}; },
        {"burgers_hierarchy"}, "u_t1 = u u_x, u_t2 = u^2 u_x");
  throw ConfigError("unknown system '" + name + "'");
}

double holomorphy_residual(const NonlinearSystem& sys, int samples, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  const double h = 1e-5;
  double worst = 0.0;
  const Layout A{sys.d, sys.n};
  for (int s = 0; s < samples; ++s) {
    std::vector<cplx> v(sys.nargs());
    for (int i = 0; i < sys.d + sys.n; ++i) v[i] = U(rng);
    for (int i = A.z0(); i < sys.nargs(); ++i) v[i] = cplx(U(rng), U(rng));
    for (int i = A.z0(); i < sys.nargs(); ++i) {
      auto shift = [&](cplx dz) {
        auto w = v;
        w[i] += dz;
        return sys.f(w);
      };
      const auto pr = shift(h), mr = shift(-h), pi = shift(I * h), mi = shift(-I * h);
      for (int j = 0; j < sys.n; ++j) {
        const cplx dre = (pr[j] - mr[j]) / (2 * h), dim = (pi[j] - mi[j]) / (2 * h);
        worst = std::max(worst, std::abs(0.5 * (dre + I * dim)));
      }
    }
  }
  return worst;
}

namespace {

// Residual of the system for u at one point, plus the derivative scale.
std::pair<double, double> point_residual(const NonlinearSystem& sys, const JetFunction& u, std::span<const double> p) {
  const Taylor e = u.expand(p, 1);
  std::vector<cplx> args(p.begin(), p.end());
  args.push_back(e.value());
  std::vector<int> a(sys.d + sys.n, 0);
  for (int k = 0; k < sys.d; ++k) {
    a.assign(sys.d + sys.n, 0);
    a[k] = 1;
    args.push_back(e.coeff(a));
  }
  const auto f = sys.f(args);
  double res = 0.0, scale = 1.0;
  for (int j = 0; j < sys.n; ++j) {
    a.assign(sys.d + sys.n, 0);
    a[sys.d + j] = 1;
    const cplx ut = e.coeff(a);
    res = std::max(res, std::abs(ut - f[j]));
    scale = std::max(scale, std::abs(ut));
  }
  return {res, scale};
}

}  // namespace

SolutionReport check_solution(const NonlinearSystem& sys, const JetFunction& u,
                              const std::vector<std::vector<double>>& grid, double tol) {
  if (u.dim() != sys.d + sys.n) throw PreconditionError("check_solution: dimension mismatch");
  SolutionReport r;
  for (const auto& p : grid) {
    const auto [res, scale] = point_residual(sys, u, p);
    r.residual = std::max(r.residual, res);
    r.scale = std::max(r.scale, scale);
  }
  r.admitted = r.residual <= tol * r.scale;
  return r;
}

std::vector<std::vector<cplx>> linearize(const NonlinearSystem& sys, const JetFunction& u, std::span<const double> point) {
  check_args(sys, point);
  const auto [res, scale] = point_residual(sys, u, point);
  if (res > 1e-6 * scale) throw InadmissibleSolution("linearize: " + u.name() + " does not solve " + sys.name);
  const Taylor e = u.expand(point, 1);
  // Series in the d gradient slots only.
  std::vector<Taylor> args;
  for (double c : point) args.push_back(Taylor(sys.d, 1, c));
  args.push_back(Taylor(sys.d, 1, e.value()));
  std::vector<int> a(sys.d + sys.n, 0);
  for (int k = 0; k < sys.d; ++k) {
    a.assign(sys.d + sys.n, 0);
    a[k] = 1;
    args.push_back(Taylor::variable(sys.d, 1, k, e.coeff(a)));
  }
  const auto f = sys.f_series(args);
  std::vector<std::vector<cplx>> out(sys.n, std::vector<cplx>(sys.d));
  for (int j = 0; j < sys.n; ++j)
    for (int k = 0; k < sys.d; ++k) {
      std::vector<int> b(sys.d, 0);
      b[k] = 1;
      out[j][k] = f[j].coeff(b);
    }
  return out;
}

std::vector<std::vector<cplx>> linearize_fd(const NonlinearSystem& sys, const JetFunction& u, std::span<const double> point) {
  check_args(sys, point);
  const Taylor e = u.expand(point, 1);
  std::vector<cplx> args(point.begin(), point.end());
  args.push_back(e.value());
  std::vector<int> a(sys.d + sys.n, 0);
  for (int k = 0; k < sys.d; ++k) {
    a.assign(sys.d + sys.n, 0);
    a[k] = 1;
    args.push_back(e.coeff(a));
  }
  const double h = 1e-5;
  std::vector<std::vector<cplx>> out(sys.n, std::vector<cplx>(sys.d));
  for (int k = 0; k < sys.d; ++k) {
    auto p = args, m = args;
    p[sys.d + sys.n + 1 + k] += h;
    m[sys.d + sys.n + 1 + k] -= h;
    const auto fp = sys.f(p), fm = sys.f(m);
    for (int j = 0; j < sys.n; ++j) out[j][k] = (fp[j] - fm[j]) / (2 * h);
  }
  return out;
}

CharacteristicResult characteristic_test(const std::vector<std::vector<cplx>>& a, std::span<const double> xi,
                                         std::span<const double> tau, int theta_points) {
  double nx = 0.0, nt = 0.0, na = 0.0;
  for (double v : xi) nx += v * v;
  for (double v : tau) nt += v * v;
  if (nx + nt == 0.0) throw PreconditionError("characteristic_test: zero covector");
  if (a.size() != tau.size()) throw PreconditionError("characteristic_test: tau must have n entries");
  for (const auto& row : a)
    for (const auto& c : row) na += std::norm(c);
  CharacteristicResult r;
  r.tolerance = 1e-8 * (1.0 + std::sqrt(na)) * (std::sqrt(nx) + std::sqrt(nt));
  for (size_t j = 0; j < a.size(); ++j) {
    if (a[j].size() != xi.size()) throw PreconditionError("characteristic_test: xi must have d entries");
    cplx ax = 0.0;
    for (size_t k = 0; k < xi.size(); ++k) ax += a[j][k] * xi[k];
    const double im = ax.imag(), re = tau[j] - ax.real();
    r.reduction = std::max({r.reduction, std::abs(im), std::abs(re)});
    for (int q = 0; q < theta_points; ++q) {
      const double th = 2.0 * std::numbers::pi * q / theta_points;
      r.margin = std::max(r.margin, std::abs(std::cos(th) * im + std::sin(th) * re));
    }
  }
  r.characteristic = r.margin <= r.tolerance;
  return r;
}

std::vector<cplx> ThetaSystem::eval(const std::vector<cplx>& args) const {
  const int nb = base->nargs();
  std::vector<cplx> b(args.begin(), args.begin() + nb);
  auto f = base->f(b);
  const cplx rot = std::exp(-I * theta);
  for (int j = 0; j < base->n; ++j) f[j] = rot * (args[nb + j] - f[j]);
  return f;
}

std::vector<Taylor> ThetaSystem::eval_series(const std::vector<Taylor>& args) const {
  const int nb = base->nargs();
  std::vector<Taylor> b(args.begin(), args.begin() + nb);
  auto f = base->f_series(b);
  const cplx rot = std::exp(-I * theta);
  for (int j = 0; j < base->n; ++j) f[j] = rot * (args[nb + j] - f[j]);
  return f;
}

std::vector<std::vector<cplx>> ThetaSystem::partials(const std::vector<cplx>& args) const {
  const int N = nargs();
  std::vector<Taylor> v;
  for (int i = 0; i < N; ++i) v.push_back(Taylor::variable(N, 1, i, args[i]));
  const auto f = eval_series(v);
  std::vector<std::vector<cplx>> out(base->n, std::vector<cplx>(N));
  for (int j = 0; j < base->n; ++j)
    for (int i = 0; i < N; ++i) {
      std::vector<int> a(N, 0);
      a[i] = 1;
      out[j][i] = f[j].coeff(a);
    }
  return out;
}

ThetaSystem theta_system(const NonlinearSystem& sys, double theta) { return ThetaSystem{&sys, theta}; }

std::vector<cplx> hamiltonian_coeffs(const NonlinearSystem& sys, double theta, int j, const std::vector<cplx>& args) {
  const ThetaSystem ts = theta_system(sys, theta);
  if (static_cast<int>(args.size()) != ts.nargs()) throw PreconditionError("hamiltonian_coeffs: wrong argument count");
  const Layout A{sys.d, sys.n};
  const auto P = ts.partials(args)[j];
  const cplx f = ts.eval(args)[j];
  std::vector<cplx> h;
  cplx h0 = f;
  for (int k = 0; k < sys.d; ++k) h0 -= args[A.z(k)] * P[A.z(k)];
  for (int l = 0; l < sys.n; ++l) h0 -= args[A.tau(l)] * P[A.tau(l)];
  h.push_back(h0);
  for (int k = 0; k < sys.d; ++k) h.push_back(P[A.x(k)] + args[A.z(k)] * P[A.z0()]);
  for (int l = 0; l < sys.n; ++l) h.push_back(P[A.t(l)] + args[A.tau(l)] * P[A.z0()]);
  return h;
}

int lifted_nvars(const NonlinearSystem& sys) { return 2 * sys.d + 3 * sys.n + 1; }

double hamiltonian_commutator(const NonlinearSystem& sys, double theta, const std::vector<cplx>& lifted_point) {
  const int D = lifted_nvars(sys);
  if (static_cast<int>(lifted_point.size()) != D) throw PreconditionError("hamiltonian_commutator: wrong point size");
  const ThetaSystem ts = theta_system(sys, theta);
  std::vector<Taylor> y;
  for (int i = 0; i < D; ++i) y.push_back(Taylor::variable(D, 3, i, lifted_point[i]));
  std::vector<std::vector<Taylor>> H;
  for (int j = 0; j < sys.n; ++j) H.push_back(field_series(ts, j, y));
  double worst = 0.0;
  for (const auto& phi : probes(y))
    for (int j = 0; j < sys.n; ++j)
      for (int k = j + 1; k < sys.n; ++k) {
        const Taylor a = apply_field(H[j], apply_field(H[k], phi));
        const Taylor b = apply_field(H[k], apply_field(H[j], phi));
        worst = std::max(worst, std::abs(a.value() - b.value()));
      }
  return worst;
}

double substitution_identity_residual(const NonlinearSystem& sys, const JetFunction& u, double theta,
                                      std::span<const double> xtr) {
  const Lifted L{sys.d, sys.n};
  const int B = sys.d + sys.n;       // (x, t)
  const int S = sys.d + 2 * sys.n;   // (x, t, r)
  if (static_cast<int>(xtr.size()) != S) throw PreconditionError("substitution_identity: point is (x, t, r)");
  const ThetaSystem ts = theta_system(sys, theta);
  const std::span<const double> xt = xtr.subspan(0, B);
  const Taylor u2 = embed(u.expand(xt, 2), S);

  // Phi^u as a series in (x, t, r) of order 1.
  std::vector<Taylor> ys;
  for (int i = 0; i < B; ++i) ys.push_back(Taylor::variable(S, 1, i, xtr[i]));
  for (int j = 0; j < sys.n; ++j) ys.push_back(Taylor::variable(S, 1, B + j, xtr[B + j]));
  ys.push_back(u2.truncated(1));
  for (int k = 0; k < sys.d; ++k) ys.push_back(u2.derivative(k));
  for (int l = 0; l < sys.n; ++l) ys.push_back(u2.derivative(sys.d + l));

  // Lifted point carrying the jet of u.
  std::vector<cplx> lp;
  for (const auto& v : ys) lp.push_back(v.value());
  std::vector<Taylor> y;
  for (int i = 0; i < L.size(); ++i) y.push_back(Taylor::variable(L.size(), 2, i, lp[i]));

  double worst = 0.0;
  const auto pu = probes(ys);
  const auto pl = probes(y);
  for (int j = 0; j < sys.n; ++j) {
    const auto H = field_series(ts, j, y);
    for (size_t q = 0; q < pu.size(); ++q) {
      // L_j^u acts through the (x, t, r) components of H_j at the jet.
      cplx lhs = 0.0;
      for (int i = 0; i < S; ++i) lhs += H[i].value() * pu[q].derivative(i).value();
      const cplx rhs = apply_field(H, pl[q]).value();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

nlohmann::json WfInclusionReport::to_json() const {
  nlohmann::json j;
  j["system"] = system;
  j["solution"] = solution;
  j["residual"] = residual;
  j["scanned"] = scanned;
  j["pass"] = pass;
  j["flagged"] = nlohmann::json::array();
  for (const auto& f : flagged)
    j["flagged"].push_back({{"point", f.point},
                            {"direction", f.direction},
                            {"characteristic", f.characteristic},
                            {"distance_to_char", f.distance_to_char}});
  return j;
}

namespace {

// Distance of a unit (xi, tau) to {Im A xi = 0, tau = Re A xi}.
double distance_to_characteristic(const std::vector<std::vector<cplx>>& a, std::span<const double> dir, int d, int n) {
  Eigen::MatrixXd ImA(n, d), ReA(n, d);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < d; ++k) {
      ImA(j, k) = a[j][k].imag();
      ReA(j, k) = a[j][k].real();
    }
  Eigen::VectorXd v(d + n);
  for (int i = 0; i < d + n; ++i) v[i] = dir[i];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ImA);
  lu.setThreshold(1e-8);
  const Eigen::MatrixXd N = lu.kernel();
  if (N.cols() == 0 || (N.cols() == 1 && N.norm() == 0.0)) return v.norm();
  Eigen::MatrixXd Bm(d + n, N.cols());
  Bm.topRows(d) = N;
  Bm.bottomRows(n) = ReA * N;
  const Eigen::VectorXd c = Bm.colPivHouseholderQr().solve(v);
  return (v - Bm * c).norm();
}

}  // namespace

WfInclusionReport wf_inclusion_experiment(const NonlinearSystem& sys, const std::string& solution,
                                          const WfInclusionConfig& cfg) {
  WfInclusionReport rep;
  rep.system = sys.name;
  rep.solution = solution;
  const int m = sys.d + sys.n;
  if (m != 2) throw PreconditionError("wf_inclusion_experiment: scans are implemented for d + n = 2");
  const CorpusMember u = corpus_member(solution);
  if (u.m != m) throw PreconditionError("wf_inclusion_experiment: solution dimension mismatch");
  std::vector<std::vector<double>> points = cfg.points;
  if (points.empty()) points = {{0.0, 0.0}, {0.25, 0.25}, {0.25, -0.25}};
  const auto check = check_solution(sys, *u.f, box_grid(u.f->domain(), 5));
  rep.residual = check.residual;
  if (!check.admitted)
    throw InadmissibleSolution("wf_inclusion_experiment: " + solution + " does not solve " + sys.name);

  const FBIKernel kernel{1.0, corpus_chart("chart_flat2")};
  const auto dirs = unit_directions(2, cfg.directions);
  const auto scan = wavefront_scan(u, kernel, points, dirs, sequence_by_name(cfg.sequence), cfg.ladder);
  rep.scanned = static_cast<int>(scan.cells.size());
  rep.pass = true;
  for (const ScanCell* c : scan.flagged()) {
    FlaggedDirection f;
    f.point = c->point;
    f.direction = c->direction;
    const auto a = linearize(sys, *u.f, c->point);
    const std::span<const double> dir(c->direction);
    f.characteristic = characteristic_test(a, dir.subspan(0, sys.d), dir.subspan(sys.d, sys.n)).characteristic;
    f.distance_to_char = distance_to_characteristic(a, dir, sys.d, sys.n);
    if (!(f.characteristic || f.distance_to_char <= cfg.margin)) rep.pass = false;
    rep.flagged.push_back(std::move(f));
  }
  return rep;
}

}  // namespace dcmicro
