#include "dcmicro/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace dcmicro {

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
  auto rule = std::make_unique<GaussRule>();
  for (int i = 0; i < n; ++i) {
    double xi = 0.0, wi = 0.0;
    gsl_integration_glfixed_point(-1.0, 1.0, i, &xi, &wi, table);
    rule->nodes.push_back(xi);
    rule->weights.push_back(wi);
  }
  gsl_integration_glfixed_table_free(table);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return rule->nodes[a] < rule->nodes[b]; });
  GaussRule sorted;
  for (int i : order) {
    sorted.nodes.push_back(rule->nodes[i]);
    sorted.weights.push_back(rule->weights[i]);
  }
  *rule = std::move(sorted);
  auto [pos, _] = cache.emplace(n, std::move(rule));
  return *pos->second;
}

LineRule composite_gauss(std::span<const double> breaks, int points_per_panel) {
  const GaussRule& g = gauss_legendre(points_per_panel);
  LineRule r;
  for (size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < points_per_panel; ++i) {
      r.x.push_back(mid + half * g.nodes[i]);
      r.w.push_back(half * g.weights[i]);
    }
  }
  return r;
}

std::vector<double> panel_breaks(double a, double b, std::span<const double> forced, double max_len) {
  std::vector<double> pts{a, b};
  for (double f : forced)
    if (f > a && f < b) pts.push_back(f);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> out;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = pts[i + 1] - pts[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_len)));
    for (int k = 0; k < pieces; ++k) out.push_back(pts[i] + len * k / pieces);
  }
  out.push_back(pts.back());
  return out;
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

cplx extrapolate_to_zero(std::span<const double> h, std::span<const cplx> y, int order) {
  const int n = static_cast<int>(h.size());
  if (n != static_cast<int>(y.size()) || n < order + 1)
    throw std::invalid_argument("extrapolate_to_zero: ladder shorter than order + 1");
  const int start = n - (order + 1);
  std::vector<cplx> p(y.begin() + start, y.end());
  std::vector<double> xs(h.begin() + start, h.end());
  const int m = order + 1;
  for (int level = 1; level < m; ++level) {
    for (int i = 0; i < m - level; ++i) {
      const double xi = xs[i], xj = xs[i + level];
      p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
    }
  }
  return p[0];
}

}  // namespace dcmicro
