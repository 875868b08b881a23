#include "dcmicro/jets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dcmicro/errors.hpp"

namespace dcmicro {

std::string to_string(JetKind k) {
  switch (k) {
    case JetKind::exact: return "exact";
    case JetKind::finite_difference: return "finite-difference";
    case JetKind::tabulated: return "tabulated";
    default: return "pairing-only";
  }
}

bool Box::contains(std::span<const double> x, double slack) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
  return true;
}

Box Box::cube(int m, double half_width) {
  return Box{std::vector<double>(m, -half_width), std::vector<double>(m, half_width)};
}

int factorial_int(int n) {
  int r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

double multi_factorial(std::span<const int> alpha) {
  double r = 1.0;
  for (int a : alpha)
    for (int k = 2; k <= a; ++k) r *= k;
  return r;
}

std::vector<std::vector<int>> multi_indices(int m, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(m, 0);
  std::function<void(int, int)> rec = [&](int i, int rest) {
    if (i == m - 1) {
      a[i] = rest;
      out.push_back(a);
      return;
    }
    for (int k = rest; k >= 0; --k) {
      a[i] = k;
      rec(i + 1, rest - k);
    }
  };
  rec(0, d);
  return out;
}

JetFunction::JetFunction(std::string name, int m, Box domain, int max_order, JetKind kind, Expander expand)
    : name_(std::move(name)), m_(m), domain_(std::move(domain)), max_order_(max_order), kind_(kind),
      expand_(std::move(expand)) {
  if (domain_.dim() != m_) throw PreconditionError("JetFunction: domain dimension mismatch");
}

void JetFunction::check_point(std::span<const double> x) const {
  if (!domain_.contains(x, 1e-12)) {
    std::ostringstream os;
    os << name_ << ": point outside domain (";
    for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    throw DomainError(os.str());
  }
}

Taylor JetFunction::expand(std::span<const double> x, int order) const {
  if (order > max_order_)
    throw RangeError(name_ + ": jet order " + std::to_string(order) + " beyond max_order " + std::to_string(max_order_));
  check_point(x);
  return expand_(x, order);
}

cplx JetFunction::eval(std::span<const double> x) const {
  if (value_) {
    check_point(x);
    return value_(x);
  }
  return expand(x, 0).value();
}

cplx JetFunction::jet(std::span<const int> alpha, std::span<const double> x) const {
  int order = 0;
  for (int a : alpha) order += a;
  return expand(x, order).derivative_value(alpha);
}

cplx JetFunction::eval_complex(std::span<const cplx> z) const {
  if (!holo_) throw PreconditionError(name_ + ": no holomorphic continuation");
  return holo_(z);
}

JetPtr finite_difference_jets(JetPtr base, double scale) {
  const int m = base->dim();
  auto fd = [base, m, scale](std::span<const double> x, int order) {
    Taylor out(m, order);
    const auto& L = out.layout();
    for (int d : L.valid()) {
      auto alpha = L.multi_index(d);
      const int q = L.degree(d);
      auto stencil = [&](double h) {
        // Tensor product of 1-D central stencils with half-integer offsets.
        std::vector<int> idx(m, 0);
        cplx acc = 0.0;
        std::function<void(int, double, std::vector<double>&)> rec = [&](int var, double w, std::vector<double>& pt) {
          if (var == m) {
            acc += w * base->eval(pt);
            return;
          }
          const int a = alpha[var];
          for (int i = 0; i <= a; ++i) {
            double binom = 1.0;
            for (int t = 0; t < i; ++t) binom = binom * (a - t) / (t + 1);
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            const double saved = pt[var];
            pt[var] = x[var] + (0.5 * a - i) * h;
            rec(var + 1, w * sign * binom, pt);
            pt[var] = saved;
          }
        };
        std::vector<double> pt(x.begin(), x.end());
        rec(0, 1.0, pt);
        return acc / std::pow(h, q);
      };
      if (q == 0) {
        out.dense(d) = base->eval(x);
        continue;
      }
      const double h = scale * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (q + 4));
      const cplx D = (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
      out.dense(d) = D / multi_factorial(alpha);
    }
    return out;
  };
  Box dom = base->domain();
  auto f = std::make_shared<JetFunction>(base->name() + "_fd", m, dom, 3, JetKind::finite_difference, fd);
  f->kinks = base->kinks;
  f->support = base->support;
  return f;
}

JetPtr load_tabulated_csv(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open jet table " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> xs;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() < 2) throw ConfigError(path + ": each row needs x and f");
    if (!rows.empty() && vals.size() != rows.front().size() + 1) throw ConfigError(path + ": ragged table");
    xs.push_back(vals[0]);
    rows.emplace_back(vals.begin() + 1, vals.end());
  }
  if (rows.empty()) throw ConfigError(path + ": empty table");
  std::vector<int> order(xs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return xs[a] < xs[b]; });
  std::vector<double> sx;
  std::vector<std::vector<double>> srows;
  for (int i : order) {
    sx.push_back(xs[i]);
    srows.push_back(rows[i]);
  }
  const int J = static_cast<int>(srows.front().size()) - 1;
  auto expand = [sx, srows, J](std::span<const double> x, int ord) {
    const auto it = std::lower_bound(sx.begin(), sx.end(), x[0]);
    size_t i = static_cast<size_t>(it - sx.begin());
    if (i == sx.size() || (i > 0 && x[0] - sx[i - 1] < sx[i] - x[0])) --i;
    Taylor t = Taylor::variable(1, ord, 0, x[0] - sx[i]);
    Taylor acc(1, ord, 0.0);
    double fact = 1.0;
    for (int j = J; j >= 0; --j) {
      fact = 1.0;
      for (int k = 2; k <= j; ++k) fact *= k;
      acc = acc * t;
      acc += cplx(srows[i][j] / fact);
    }
    return acc;
  };
  Box dom{{sx.front()}, {sx.back()}};
  auto f = std::make_shared<JetFunction>(name, 1, dom, J, JetKind::tabulated, expand);
  f->description = "tabulated from " + path;
  return f;
}

VectorFrame VectorFrame::coordinate(int m) {
  VectorFrame f;
  f.m_ = m;
  f.kind_ = FrameKind::coordinate;
  return f;
}

VectorFrame VectorFrame::chart(std::shared_ptr<const FrameCoefficients> coeffs) {
  VectorFrame f;
  f.m_ = coeffs->dim();
  f.kind_ = FrameKind::chart;
  f.coeffs_ = std::move(coeffs);
  return f;
}

std::vector<Taylor> VectorFrame::coefficient_series(std::span<const double> x, int order) const {
  if (kind_ == FrameKind::chart) return coeffs_->coefficient_series(x, order);
  std::vector<Taylor> out;
  for (int k = 0; k < m_; ++k)
    for (int l = 0; l < m_; ++l) out.emplace_back(m_, order, k == l ? 1.0 : 0.0);
  return out;
}

cplx VectorFrame::coeff(int k, int l, std::span<const double> x) const {
  if (kind_ == FrameKind::coordinate) return k == l ? 1.0 : 0.0;
  return coeffs_->coefficient_series(x, 0)[k * m_ + l].value();
}

namespace {

Taylor apply_field(const std::vector<Taylor>& a, int m, int k, const Taylor& h) {
  const int o = h.order();
  Taylor out(m, o - 1);
  for (int l = 0; l < m; ++l) out += a[k * m + l].truncated(o - 1) * h.derivative(l);
  return out;
}

}  // namespace

Taylor frame_jets_from_series(const VectorFrame& frame, const Taylor& g, std::span<const double> x) {
  const int m = frame.dim();
  const int K = g.order();
  Taylor out(m, K);
  if (frame.kind() == FrameKind::coordinate) {
    for (int d : out.layout().valid()) {
      auto alpha = out.layout().multi_index(d);
      out.dense(d) = g.derivative_value(alpha);
    }
    return out;
  }
  const auto a = frame.coefficient_series(x, K);
  std::vector<int> alpha(m, 0);
  // X_m is applied first, X_1 last.
  std::function<void(int, Taylor)> rec = [&](int var, Taylor h) {
    for (int j = 0;; ++j) {
      alpha[var] = j;
      if (var == 0)
        out.coeff_ref(alpha) = h.value();
      else
        rec(var - 1, h);
      if (h.order() == 0) break;
      h = apply_field(a, m, var, h);
    }
    alpha[var] = 0;
  };
  rec(m - 1, g);
  return out;
}

Taylor frame_jets(const VectorFrame& frame, const JetFunction& f, std::span<const double> x, int K) {
  if (frame.dim() != f.dim()) throw PreconditionError("frame and function dimensions differ");
  return frame_jets_from_series(frame, f.expand(x, K), x);
}

cplx frame_apply(const VectorFrame& frame, const JetFunction& f, std::span<const int> alpha, std::span<const double> x) {
  int K = 0;
  for (int a : alpha) K += a;
  if (frame.kind() == FrameKind::coordinate) return f.jet(alpha, x);
  return frame_jets(frame, f, x, K).coeff(alpha);
}

cplx taylor_coefficient(const JetFunction& f, const VectorFrame& frame, std::span<const int> alpha, std::span<const double> u) {
  return frame_apply(frame, f, alpha, u) / multi_factorial(alpha);
}

cplx frame_commutator(const VectorFrame& frame, const JetFunction& g, int j, int k, std::span<const double> x) {
  const int m = frame.dim();
  const Taylor s = g.expand(x, 2);
  const auto a = frame.coefficient_series(x, 2);
  const cplx jk = apply_field(a, m, j, apply_field(a, m, k, s)).value();
  const cplx kj = apply_field(a, m, k, apply_field(a, m, j, s)).value();
  return jk - kj;
}

std::vector<std::vector<double>> box_grid(const Box& box, int n) {
  const int m = box.dim();
  std::vector<std::vector<double>> out;
  std::vector<int> idx(m, 0);
  while (true) {
    std::vector<double> p(m);
    for (int i = 0; i < m; ++i)
      p[i] = n == 1 ? 0.5 * (box.lo[i] + box.hi[i]) : box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (n - 1);
    out.push_back(p);
    int i = 0;
    while (i < m && ++idx[i] == n) idx[i++] = 0;
    if (i == m) break;
  }
  return out;
}

nlohmann::json ClassFit::to_json() const {
  nlohmann::json j;
  j["C"] = finite ? nlohmann::json(C) : nlohmann::json("inf");
  j["finite"] = finite;
  j["K"] = K;
  j["stable"] = stable;
  j["sup_per_order"] = sup_per_order;
  j["C_up_to"] = C_up_to;
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

ClassFit class_constant_fit(const JetFunction& f, const VectorFrame& frame, const RegularSequence& seq, int K,
                            const std::vector<std::vector<double>>& grid) {
  if (grid.empty()) throw PreconditionError("class_constant_fit: empty grid");
  if (K > f.max_order()) throw RangeError("class_constant_fit: K beyond max_order " + std::to_string(f.max_order()));
  ClassFit fit;
  fit.K = K;
  fit.sup_per_order.assign(K + 1, 0.0);
  for (const auto& x : grid) {
    Taylor jets;
    try {
      jets = frame_jets(frame, f, x, K);
    } catch (const std::exception& e) {
      fit.finite = false;
      fit.stable = false;
      fit.C = std::numeric_limits<double>::infinity();
      fit.failure = e.what();
      return fit;
    }
    for (int d : jets.layout().valid()) {
      const int k = jets.layout().degree(d);
      const double v = std::abs(jets.dense(d));
      if (!std::isfinite(v)) {
        fit.finite = false;
        fit.stable = false;
        fit.C = std::numeric_limits<double>::infinity();
        fit.failure = "non-finite derivative";
        return fit;
      }
      fit.sup_per_order[k] = std::max(fit.sup_per_order[k], v);
    }
  }
  double C = 0.0;
  for (int k = 0; k <= K; ++k) {
    if (fit.sup_per_order[k] > 0.0)
      C = std::max(C, std::exp((std::log(fit.sup_per_order[k]) - seq.log_M(k)) / (k + 1)));
    fit.C_up_to.push_back(C);
  }
  fit.C = C;
  const double prev = fit.C_up_to[std::max(0, K - 2)];
  fit.stable = C <= 1.1 * prev || C == 0.0;
  return fit;
}

}  // namespace dcmicro
