#include "dcmicro/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "dcmicro/errors.hpp"
#include "dcmicro/nonlinear.hpp"

namespace dcmicro {

namespace {

constexpr int k_order_1d = 80;
constexpr int k_order_2d = 48;

// |s|^3 as a series in s; at s = 0 only orders <= 2 exist.
template <class T>
T abs_cubed_of(const T& s) {
  const double b = base_real(s);
  if (b > 0.0) return s * s * s;
  if (b < 0.0) return -(s * s * s);
  if (series_order(s) >= 3) throw DomainError("|s|^3 has no third derivative at s = 0");
  return zero_like(s);
}

JetPtr build_function(const std::string& name) {
  const Box d1 = Box::cube(1, 8.0);
  const Box d2 = Box::cube(2, 6.0);
  if (name == "poly_x2")
    return make_exact_jet(name, 1, d1, k_order_1d, [](const auto& v) { return v[0] * v[0]; }, true, "x^2");
  if (name == "rational")
    return make_exact_jet(
        name, 1, d1, k_order_1d, [](const auto& v) { return 1.0 / (1.0 + v[0] * v[0]); }, true, "1/(1+x^2)");
  if (name == "exp")
    return make_exact_jet(name, 1, d1, k_order_1d, [](const auto& v) { return exp(v[0]); }, true, "e^x");
  if (name == "gaussian")
    return make_exact_jet(name, 1, d1, k_order_1d, [](const auto& v) { return exp(-(v[0] * v[0])); }, true, "e^{-x^2}");
  if (name == "gevrey_bump" || name == "bump_x2") {
    const bool weighted = name == "bump_x2";
    auto f = make_exact_jet(
        name, 1, d1, k_order_1d,
        [weighted](const auto& v) {
          const auto r2 = v[0] * v[0];
          if (base_real(r2) >= 1.0) return zero_like(v[0]);
          auto b = exp(-1.0 / (1.0 - r2));
          if (weighted) b = b * r2;
          return b;
        },
        false, weighted ? "x^2 exp(-1/(1-x^2)) on |x| < 1, 0 outside" : "exp(-1/(1-x^2)) on |x| < 1, 0 outside");
    auto mf = std::const_pointer_cast<JetFunction>(f);
    mf->support = {Box::cube(1, 1.0)};
    mf->kinks = {{-1.0}, {1.0}};
    return f;
  }
  if (name == "abs_cubed") {
    auto f = make_exact_jet(name, 1, d1, k_order_1d, [](const auto& v) { return abs_cubed_of(v[0]); }, false, "|x|^3");
    std::const_pointer_cast<JetFunction>(f)->kinks = {{0.0}};
    return f;
  }
  if (name == "heaviside") {
    auto expand = [](std::span<const double> x, int order) {
      if (x[0] == 0.0) throw DomainError("heaviside: no jets at the jump x = 0");
      return Taylor(1, order, x[0] > 0.0 ? 1.0 : 0.0);
    };
    auto f = std::make_shared<JetFunction>(name, 1, d1, k_order_1d, JetKind::pairing_only, expand);
    f->set_value([](std::span<const double> x) { return cplx(x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? 0.0 : 0.5)); });
    f->kinks = {{0.0}};
    f->description = "1 for x > 0, 0 for x < 0";
    return f;
  }
  if (name == "gaussian2")
    return make_exact_jet(
        name, 2, d2, k_order_2d, [](const auto& v) { return exp(-(v[0] * v[0] + v[1] * v[1])); }, true,
        "e^{-|x|^2}");
  if (name == "rational2")
    return make_exact_jet(
        name, 2, d2, k_order_2d, [](const auto& v) { return 1.0 / (1.0 + v[0] * v[0] + v[1] * v[1]); }, true,
        "1/(1+|x|^2)");
  if (name == "poly2")
    return make_exact_jet(
        name, 2, d2, k_order_2d, [](const auto& v) { return v[0] * v[0] + v[0] * v[1] - 2.0 * v[1]; }, true,
        "x1^2 + x1 x2 - 2 x2");
  if (name == "transport_abs_cubed") {
    auto f = make_exact_jet(
        name, 2, d2, k_order_2d, [](const auto& v) { return abs_cubed_of(v[0] - v[1]); }, false, "|x - t|^3");
    std::const_pointer_cast<JetFunction>(f)->kinks = {{1.0, -1.0, 0.0}};
    return f;
  }
  if (name == "holo_square")
    return make_exact_jet(
        name, 2, d2, k_order_2d,
        [](const auto& v) {
          const auto w = v[0] + cplx(0.0, 1.0) * v[1];
          return w * w;
        },
        false, "(x + i t)^2");
  if (name == "burgers_line")
    return make_exact_jet(
        name, 2, Box{{-0.5, -0.5}, {0.5, 0.5}}, k_order_2d, [](const auto& v) { return v[0] / (1.0 - v[1]); }, false,
        "x / (1 - t)");
  if (name == "quadratic_blowup")
    return make_exact_jet(
        name, 2, Box{{-0.5, -0.5}, {0.5, 0.5}}, k_order_2d,
        [](const auto& v) { return 1.0 / (2.0 - v[1]) + 0.0 * v[0]; }, false, "1 / (2 - t)");
  if (name == "burgers_hierarchy")
    return make_exact_jet(
        name, 3, Box::cube(3, 0.3), k_order_2d,
        [](const auto& v) {
          const auto s = 1.0 - v[1];
          return 2.0 * v[0] / (s + sqrt(s * s - 4.0 * v[2] * v[0]));
        },
        false, "2x / ((1 - t1) + sqrt((1 - t1)^2 - 4 t2 x))");
  throw ConfigError("unknown corpus function '" + name + "'");
}

const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names = {
      "abs_cubed", "bump_x2", "burgers_hierarchy", "burgers_line", "exp", "gaussian", "gaussian2", "gevrey_bump", "heaviside", "holo_square",
      "poly2", "poly_x2", "quadratic_blowup", "rational", "rational2", "transport_abs_cubed"};
  return names;
}

const std::vector<std::string>& chart_names() {
  static const std::vector<std::string> names = {"chart_bilinear2", "chart_flat", "chart_flat2", "chart_quadratic"};
  return names;
}

template <class F>
MaximallyRealChart::PhiSeries phi_series(int m, F formula) {
  return [m, formula](std::span<const double> x, int order) {
    std::vector<Taylor> v;
    for (int i = 0; i < m; ++i) v.push_back(Taylor::variable(m, order, i, x[i]));
    return formula(v);
  };
}

}  // namespace

JetPtr corpus_function(const std::string& name) { return build_function(name); }

CorpusMember corpus_member(const std::string& name) {
  CorpusMember c;
  c.name = name;
  if (name == "dirac") {
    c.kind = MemberKind::dirac;
    c.point = {0.0};
    c.description = "Dirac mass at 0";
    return c;
  }
  if (name == "inv_x_plus_i0") {
    c.kind = MemberKind::boundary_value;
    c.regularized = [](double x, double eps) { return 1.0 / cplx(x, eps); };
    c.eps_ladder = {2e-3, 1e-3};
    c.singular_points = {0.0};
    c.description = "1/(x + i0), limit of 1/(x + i eps)";
    return c;
  }
  c.f = build_function(name);
  c.m = c.f->dim();
  c.kind = MemberKind::function;
  for (const auto& k : c.f->kinks)
    if (k.size() == 1) c.singular_points.push_back(k[0]);
  c.description = c.f->description;
  return c;
}

ChartPtr corpus_chart(const std::string& name) {
  if (name == "chart_flat" || name == "chart_quadratic") return corpus_chart(name, Box::cube(1, name == "chart_flat" ? 1.0 : 0.2));
  if (name == "chart_flat2" || name == "chart_bilinear2") return corpus_chart(name, Box::cube(2, name == "chart_flat2" ? 1.0 : 0.2));
  throw ConfigError("unknown chart '" + name + "'");
}

ChartPtr corpus_chart(const std::string& name, const Box& U) {
  if (name == "chart_flat") {
    auto phi = phi_series(1, [](const std::vector<Taylor>& v) { return std::vector<Taylor>{zero_like(v[0])}; });
    return std::make_shared<MaximallyRealChart>(name, 1, U, phi, true);
  }
  if (name == "chart_quadratic") {
    auto phi = phi_series(1, [](const std::vector<Taylor>& v) { return std::vector<Taylor>{v[0] * v[0] * 0.25}; });
    return std::make_shared<MaximallyRealChart>(name, 1, U, phi, false);
  }
  if (name == "chart_flat2") {
    auto phi = phi_series(2, [](const std::vector<Taylor>& v) {
      return std::vector<Taylor>{zero_like(v[0]), zero_like(v[0])};
    });
    return std::make_shared<MaximallyRealChart>(name, 2, U, phi, true);
  }
  if (name == "chart_bilinear2") {
    auto phi = phi_series(2, [](const std::vector<Taylor>& v) {
      return std::vector<Taylor>{v[0] * v[1] * 0.25, zero_like(v[0])};
    });
    return std::make_shared<MaximallyRealChart>(name, 2, U, phi, false);
  }
  throw ConfigError("unknown chart '" + name + "'");
}

std::vector<CorpusRow> list_corpus(const std::string& filter) {
  std::vector<CorpusRow> rows;
  for (const auto& n : function_names()) {
    auto f = build_function(n);
    const bool dist = f->kind() == JetKind::pairing_only;
    rows.push_back({dist ? "distribution" : "function", n, f->dim(),
                    dist ? "pairing" : std::to_string(f->max_order()), f->description});
  }
  for (const std::string n : {"dirac", "inv_x_plus_i0"}) {
    auto c = corpus_member(n);
    rows.push_back({"distribution", n, 1, "pairing", c.description});
  }
  for (const auto& n : chart_names()) {
    auto c = corpus_chart(n);
    rows.push_back({"chart", n, c->dim(), "exact", c->flat() ? "phi = 0" : (n == "chart_quadratic" ? "phi = x^2/4" : "phi = (x1 x2/4, 0)")});
  }
  for (const auto& n : system_names()) {
    auto s = corpus_system(n);
    rows.push_back({"system", n, s.d + s.n, "exact", s.description});
  }
  std::vector<CorpusRow> out;
  for (auto& r : rows)
    if (filter.empty() || r.name.find(filter) != std::string::npos || r.category.find(filter) != std::string::npos)
      out.push_back(r);
  std::sort(out.begin(), out.end(), [](const CorpusRow& a, const CorpusRow& b) {
    return std::tie(a.category, a.name) < std::tie(b.category, b.name);
  });
  return out;
}

std::string format_corpus_table(const std::vector<CorpusRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "category" << std::setw(24) << "name" << std::setw(4) << "m" << std::setw(10)
     << "jets" << "description\n";
  for (const auto& r : rows)
    os << std::left << std::setw(14) << r.category << std::setw(24) << r.name << std::setw(4) << r.m << std::setw(10)
       << r.jet_order << r.description << "\n";
  return os.str();
}

}  // namespace dcmicro
