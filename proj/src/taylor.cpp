#include "dcmicro/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dcmicro {

TaylorLayout::TaylorLayout(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || order < 0) throw std::invalid_argument("TaylorLayout: bad shape");
  stride_.resize(nvars);
  long size = 1;
  for (int i = 0; i < nvars; ++i) {
    stride_[i] = static_cast<int>(size);
    size *= (order + 1);
    if (size > (1L << 26)) throw std::invalid_argument("TaylorLayout: series too large");
  }
  dense_size_ = static_cast<int>(size);
  degree_.assign(dense_size_, 0);
  for (int d = 0; d < dense_size_; ++d) {
    int rest = d, deg = 0;
    for (int i = 0; i < nvars; ++i) {
      deg += rest % (order + 1);
      rest /= (order + 1);
    }
    degree_[d] = deg;
  }
  degree_start_.assign(order + 2, 0);
  for (int deg = 0; deg <= order; ++deg) {
    degree_start_[deg] = static_cast<int>(valid_.size());
    for (int d = 0; d < dense_size_; ++d)
      if (degree_[d] == deg) valid_.push_back(d);
  }
  degree_start_[order + 1] = static_cast<int>(valid_.size());
}

std::shared_ptr<const TaylorLayout> TaylorLayout::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const TaylorLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const TaylorLayout> layout(new TaylorLayout(nvars, order));
  cache.emplace(key, layout);
  return layout;
}

int TaylorLayout::index(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != nvars_)
    throw std::invalid_argument("Taylor: multi-index has wrong length");
  int idx = 0, deg = 0;
  for (int i = 0; i < nvars_; ++i) {
    if (alpha[i] < 0) throw std::invalid_argument("Taylor: negative multi-index");
    deg += alpha[i];
    idx += alpha[i] * stride_[i];
  }
  if (deg > order_) return -1;
  return idx;
}

std::vector<int> TaylorLayout::multi_index(int dense) const {
  std::vector<int> alpha(nvars_);
  for (int i = 0; i < nvars_; ++i) {
    alpha[i] = dense % (order_ + 1);
    dense /= (order_ + 1);
  }
  return alpha;
}

Taylor::Taylor(int nvars, int order, cplx constant)
    : layout_(TaylorLayout::get(nvars, order)), c_(layout_->dense_size(), 0.0) {
  c_[0] = constant;
}

Taylor Taylor::variable(int nvars, int order, int var, cplx at) {
  Taylor t(nvars, order, at);
  if (order >= 1) t.c_[t.layout_->stride(var)] = 1.0;
  return t;
}

cplx Taylor::coeff(std::span<const int> alpha) const {
  int i = layout_->index(alpha);
  return i < 0 ? cplx(0.0) : c_[i];
}

cplx& Taylor::coeff_ref(std::span<const int> alpha) {
  int i = layout_->index(alpha);
  if (i < 0) throw std::out_of_range("Taylor: multi-index beyond truncation order");
  return c_[i];
}

cplx Taylor::derivative_value(std::span<const int> alpha) const {
  double fact = 1.0;
  for (int a : alpha)
    for (int k = 2; k <= a; ++k) fact *= k;
  return coeff(alpha) * fact;
}

Taylor Taylor::derivative(int var) const {
  const int K = order();
  if (K == 0) throw std::invalid_argument("Taylor: cannot differentiate an order-0 series");
  Taylor out(nvars(), K - 1);
  const auto& lo = *out.layout_;
  for (int d : lo.valid()) {
    auto alpha = lo.multi_index(d);
    alpha[var] += 1;
    out.c_[d] = c_[layout_->index(alpha)] * static_cast<double>(alpha[var]);
  }
  return out;
}

Taylor Taylor::truncated(int new_order) const {
  if (new_order == order()) return *this;
  if (new_order > order()) throw std::invalid_argument("Taylor: cannot raise truncation order");
  Taylor out(nvars(), new_order);
  for (int d : out.layout_->valid()) {
    auto alpha = out.layout_->multi_index(d);
    out.c_[d] = c_[layout_->index(alpha)];
  }
  return out;
}

static void check_same(const Taylor& a, const Taylor& b) {
  if (a.nvars() != b.nvars() || a.order() != b.order())
    throw std::invalid_argument("Taylor: operands have different shapes");
}

Taylor& Taylor::operator+=(const Taylor& o) {
  check_same(*this, o);
  for (int d : layout_->valid()) c_[d] += o.c_[d];
  return *this;
}

Taylor& Taylor::operator-=(const Taylor& o) {
  check_same(*this, o);
  for (int d : layout_->valid()) c_[d] -= o.c_[d];
  return *this;
}

Taylor& Taylor::operator*=(cplx s) {
  for (int d : layout_->valid()) c_[d] *= s;
  return *this;
}

Taylor& Taylor::operator*=(const Taylor& o) {
  *this = *this * o;
  return *this;
}

Taylor Taylor::operator-() const {
  Taylor out = *this;
  out *= -1.0;
  return out;
}

Taylor operator*(const Taylor& a, const Taylor& b) {
  check_same(a, b);
  const auto& L = a.layout();
  const int K = L.order();
  Taylor out(a.nvars(), K);
  auto valid = L.valid();
  for (int ii = 0; ii < static_cast<int>(valid.size()); ++ii) {
    const int i = valid[ii];
    const cplx ai = a.dense(i);
    if (ai == 0.0) continue;
    const int jend = L.degree_start(K - L.degree(i) + 1);
    for (int jj = 0; jj < jend; ++jj) {
      const int j = valid[jj];
      out.dense(i + j) += ai * b.dense(j);
    }
  }
  return out;
}

Taylor Taylor::compose(std::span<const cplx> g) const {
  const int K = order();
  Taylor h = *this;
  h.c_[0] = 0.0;
  Taylor result(nvars(), K, g[K]);
  for (int k = K - 1; k >= 0; --k) {
    result = result * h;
    result.c_[0] += g[k];
  }
  return result;
}

Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
Taylor operator/(const Taylor& a, const Taylor& b) { return a * reciprocal(b); }
Taylor operator+(Taylor a, cplx s) { return a += s; }
Taylor operator+(cplx s, Taylor a) { return a += s; }
Taylor operator-(Taylor a, cplx s) { return a -= s; }
Taylor operator-(cplx s, const Taylor& a) {
  Taylor out = -a;
  out += s;
  return out;
}
Taylor operator*(Taylor a, cplx s) { return a *= s; }
Taylor operator*(cplx s, Taylor a) { return a *= s; }
Taylor operator/(Taylor a, cplx s) { return a *= (1.0 / s); }
Taylor operator/(cplx s, const Taylor& a) { return reciprocal(a) * s; }

Taylor exp(const Taylor& a) {
  const int K = a.order();
  std::vector<cplx> g(K + 1);
  cplx e = std::exp(a.value());
  double fact = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    g[k] = e / fact;
  }
  return a.compose(g);
}

Taylor log(const Taylor& a) {
  const int K = a.order();
  const cplx a0 = a.value();
  if (a0 == 0.0) throw std::domain_error("Taylor log: zero base value");
  std::vector<cplx> g(K + 1);
  g[0] = std::log(a0);
  cplx inv = 1.0 / a0, p = 1.0;
  for (int k = 1; k <= K; ++k) {
    p *= inv;
    g[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / static_cast<double>(k);
  }
  return a.compose(g);
}

Taylor pow(const Taylor& a, double p) {
  const int K = a.order();
  const cplx a0 = a.value();
  if (a0 == 0.0) throw std::domain_error("Taylor pow: zero base value");
  std::vector<cplx> g(K + 1);
  cplx inv = 1.0 / a0;
  cplx base = std::pow(a0, p);
  double binom = 1.0;
  cplx ip = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) {
      binom *= (p - k + 1) / k;
      ip *= inv;
    }
    g[k] = base * binom * ip;
  }
  return a.compose(g);
}

Taylor pow(const Taylor& a, int n) {
  if (n < 0) return reciprocal(pow(a, -n));
  Taylor result(a.nvars(), a.order(), 1.0);
  Taylor base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Taylor sqrt(const Taylor& a) { return pow(a, 0.5); }

Taylor reciprocal(const Taylor& a) {
  const int K = a.order();
  const cplx a0 = a.value();
  if (a0 == 0.0) throw std::domain_error("Taylor reciprocal: zero base value");
  if (a.nvars() == 1) {
    // b_k = -(1/a0) sum_{i=1..k} a_i b_{k-i}
    Taylor b(1, K);
    b.dense(0) = 1.0 / a0;
    for (int k = 1; k <= K; ++k) {
      cplx s = 0.0;
      for (int i = 1; i <= k; ++i) s += a.dense(i) * b.dense(k - i);
      b.dense(k) = -s / a0;
    }
    return b;
  }
  std::vector<cplx> g(K + 1);
  cplx inv = 1.0 / a0, p = inv;
  for (int k = 0; k <= K; ++k) {
    g[k] = ((k % 2 == 0) ? 1.0 : -1.0) * p;
    p *= inv;
  }
  return a.compose(g);
}

}  // namespace dcmicro
