#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dcmicro {

using cplx = std::complex<double>;

// Gauss-Legendre rule on [-1, 1] (nodes ascending).  Backed by GSL, cached per n.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

// Nodes and weights of a composite Gauss-Legendre rule on the panels
// [breaks[i], breaks[i + 1]].
struct LineRule {
  std::vector<double> x;
  std::vector<double> w;
};
LineRule composite_gauss(std::span<const double> breaks, int points_per_panel);

// Breakpoints for [a, b] that include every interior point of `forced`, with
// no panel longer than max_len.
std::vector<double> panel_breaks(double a, double b, std::span<const double> forced, double max_len);

// Neumaier-compensated accumulator; summation order is the call order.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedSumC {
 public:
  void add(cplx z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_, im_;
};

// Value at h = 0 of the polynomial of degree order through the last
// (order + 1) samples (h_i, y_i).  Neville's scheme.
cplx extrapolate_to_zero(std::span<const double> h, std::span<const cplx> y, int order);

}  // namespace dcmicro
