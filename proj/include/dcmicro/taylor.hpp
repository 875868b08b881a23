#pragma once

// Truncated multivariate Taylor series with complex coefficients.
//
// A Taylor object stores the coefficients c_alpha = d^alpha g(x0) / alpha! of a
// function g around a base point x0, for every multi-index |alpha| <= order.
// Arithmetic on Taylor objects is exact truncated power-series arithmetic, so
// evaluating a formula on Taylor variables yields every partial derivative of
// the formula up to the truncation order.
//
// Storage is dense with per-variable stride (order + 1): the dense index of a
// multi-index is sum_i alpha_i * (order + 1)^i.  Because every component of a
// product index is bounded by the total degree, adding dense indices never
// carries, which keeps multiplication a plain index sum.

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace dcmicro {

using cplx = std::complex<double>;

class TaylorLayout {
 public:
  static std::shared_ptr<const TaylorLayout> get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int dense_size() const { return dense_size_; }
  int degree(int dense) const { return degree_[dense]; }

  // Dense indices with total degree <= order, sorted by degree.
  std::span<const int> valid() const { return valid_; }
  // valid()[degree_start(d) .. degree_start(d + 1)) have total degree d.
  int degree_start(int d) const { return degree_start_[d]; }

  int index(std::span<const int> alpha) const;
  std::vector<int> multi_index(int dense) const;
  int stride(int var) const { return stride_[var]; }

 private:
  TaylorLayout(int nvars, int order);

  int nvars_;
  int order_;
  int dense_size_;
  std::vector<int> stride_;
  std::vector<int> degree_;
  std::vector<int> valid_;
  std::vector<int> degree_start_;
};

class Taylor {
 public:
  Taylor() = default;
  Taylor(int nvars, int order, cplx constant = 0.0);

  // The coordinate function x_var expanded around x0 = at.
  static Taylor variable(int nvars, int order, int var, cplx at);

  int nvars() const { return layout_->nvars(); }
  int order() const { return layout_->order(); }
  const TaylorLayout& layout() const { return *layout_; }

  cplx value() const { return c_[0]; }
  cplx coeff(std::span<const int> alpha) const;
  cplx& coeff_ref(std::span<const int> alpha);
  // d^alpha g(x0), i.e. alpha! * coeff(alpha).
  cplx derivative_value(std::span<const int> alpha) const;

  cplx dense(int i) const { return c_[i]; }
  cplx& dense(int i) { return c_[i]; }

  // Series of d g / d x_var; the result has order - 1.
  Taylor derivative(int var) const;
  Taylor truncated(int order) const;

  Taylor& operator+=(const Taylor& o);
  Taylor& operator-=(const Taylor& o);
  Taylor& operator*=(const Taylor& o);
  Taylor& operator+=(cplx s) { c_[0] += s; return *this; }
  Taylor& operator-=(cplx s) { c_[0] -= s; return *this; }
  Taylor& operator*=(cplx s);

  Taylor operator-() const;

  // sum_k g_k (self - value())^k for the univariate coefficients g_k, k <= order.
  Taylor compose(std::span<const cplx> univariate) const;

 private:
  std::shared_ptr<const TaylorLayout> layout_;
  std::vector<cplx> c_;
};

Taylor operator+(Taylor a, const Taylor& b);
Taylor operator-(Taylor a, const Taylor& b);
Taylor operator*(const Taylor& a, const Taylor& b);
Taylor operator/(const Taylor& a, const Taylor& b);
Taylor operator+(Taylor a, cplx s);
Taylor operator+(cplx s, Taylor a);
Taylor operator-(Taylor a, cplx s);
Taylor operator-(cplx s, const Taylor& a);
Taylor operator*(Taylor a, cplx s);
Taylor operator*(cplx s, Taylor a);
Taylor operator/(Taylor a, cplx s);
Taylor operator/(cplx s, const Taylor& a);
inline Taylor operator+(Taylor a, double s) { return std::move(a) + cplx(s); }
inline Taylor operator+(double s, Taylor a) { return std::move(a) + cplx(s); }
inline Taylor operator-(Taylor a, double s) { return std::move(a) - cplx(s); }
inline Taylor operator-(double s, const Taylor& a) { return cplx(s) - a; }
inline Taylor operator*(Taylor a, double s) { return std::move(a) * cplx(s); }
inline Taylor operator*(double s, Taylor a) { return std::move(a) * cplx(s); }
inline Taylor operator/(Taylor a, double s) { return std::move(a) / cplx(s); }
inline Taylor operator/(double s, const Taylor& a) { return cplx(s) / a; }

Taylor exp(const Taylor& a);
Taylor log(const Taylor& a);
Taylor sqrt(const Taylor& a);
Taylor pow(const Taylor& a, double p);
Taylor pow(const Taylor& a, int n);
Taylor reciprocal(const Taylor& a);

// Helpers that let corpus formulas be written once for cplx and Taylor.
inline double base_real(cplx z) { return z.real(); }
inline double base_real(const Taylor& t) { return t.value().real(); }
inline cplx zero_like(cplx) { return 0.0; }
inline Taylor zero_like(const Taylor& t) { return Taylor(t.nvars(), t.order()); }
inline cplx ipow(cplx z, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}
inline Taylor ipow(const Taylor& t, int n) { return pow(t, n); }

}  // namespace dcmicro
