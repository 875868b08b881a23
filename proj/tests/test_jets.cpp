#include <doctest.h>

#include <cmath>

#include "dcmicro/corpus.hpp"
#include "dcmicro/errors.hpp"
#include "dcmicro/jets.hpp"

using namespace dcmicro;

TEST_CASE("coordinate frame: X^2 x^2 = 2") {
  const auto f = corpus_function("poly_x2");
  const double x[1] = {0.37};
  const int a2[1] = {2}, a3[1] = {3};
  const auto fr = VectorFrame::coordinate(1);
  CHECK(std::abs(frame_apply(fr, *f, a2, x) - 2.0) < 1e-13);
  CHECK(std::abs(frame_apply(fr, *f, a3, x)) < 1e-13);
}

TEST_CASE("chart frame: X^2 x^2 = 2 at x = 0") {
  const auto chart = corpus_chart("chart_quadratic");
  const auto f = corpus_function("poly_x2");
  const double x[1] = {0.0};
  const int a2[1] = {2};
  CHECK(std::abs(frame_apply(chart_frame(chart), *f, a2, x) - 2.0) < 1e-13);
}

TEST_CASE("chart frame: X x = 1 / (1 + i phi') away from 0") {
  const auto chart = corpus_chart("chart_quadratic");
  const auto f = corpus_function("poly_x2");
  const double x[1] = {0.1};
  const int a1[1] = {1};
  // X = (1 + i x/2)^{-1} d/dx
  const cplx expect = 2.0 * 0.1 / cplx(1.0, 0.05);
  CHECK(std::abs(frame_apply(chart_frame(chart), *f, a1, x) - expect) < 1e-13);
}

TEST_CASE("Taylor coefficients of 1/(1+x^2) at 0") {
  const auto f = corpus_function("rational");
  const double u[1] = {0.0};
  const auto fr = VectorFrame::coordinate(1);
  const int a2[1] = {2}, a4[1] = {4}, a3[1] = {3};
  CHECK(std::abs(taylor_coefficient(*f, fr, a2, u) - (-1.0)) < 1e-13);
  CHECK(std::abs(taylor_coefficient(*f, fr, a4, u) - 1.0) < 1e-13);
  CHECK(std::abs(taylor_coefficient(*f, fr, a3, u)) < 1e-13);
}

TEST_CASE("two-dimensional jets") {
  const auto f = corpus_function("poly2");
  const double x[2] = {0.3, -0.2};
  const auto fr = VectorFrame::coordinate(2);
  const auto t = frame_jets(fr, *f, x, 3);
  const int a00[2] = {0, 0};
  CHECK(std::abs(t.coeff(a00) - f->eval(x)) < 1e-14);
}

TEST_CASE("frame vector fields commute") {
  const auto chart = corpus_chart("chart_bilinear2");
  const auto g = corpus_function("poly2");
  const double x[2] = {0.05, -0.1};
  CHECK(std::abs(frame_commutator(chart_frame(chart), *g, 0, 1, x)) < 1e-13);
}

TEST_CASE("class constant fits") {
  const auto seq = RegularSequence::gevrey(2.0);
  const auto fr = VectorFrame::coordinate(1);

  const auto x2 = corpus_function("poly_x2");
  const auto fit = class_constant_fit(*x2, fr, seq, 4, box_grid(Box::cube(1, 1.0), 21));
  CHECK(fit.finite);
  CHECK(fit.C == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  const auto zero = make_exact_jet("zero", 1, Box::cube(1, 2.0), 60, [](const auto& v) { return zero_like(v[0]); },
                                   true, "0");
  const auto z = class_constant_fit(*zero, fr, seq, 8, box_grid(Box::cube(1, 1.0), 5));
  CHECK(z.finite);
  CHECK(z.C == 0.0);

  const auto rat = corpus_function("rational");
  const auto r = class_constant_fit(*rat, fr, seq, 8, box_grid(Box::cube(1, 0.5), 11));
  CHECK(r.finite);
  CHECK(r.stable);
  CHECK(r.C > 0.0);
}

TEST_CASE("Heaviside has no finite class constant across its jump") {
  const auto seq = RegularSequence::gevrey(2.0);
  const auto h = corpus_function("heaviside");
  const auto fit = class_constant_fit(*h, VectorFrame::coordinate(1), seq, 6, box_grid(Box::cube(1, 1.0), 21));
  CHECK_FALSE(fit.finite);
  CHECK_FALSE(fit.failure.empty());
}

TEST_CASE("finite-difference jets agree with exact ones to low order") {
  const auto f = corpus_function("gaussian");
  const auto fd = finite_difference_jets(f);
  const double x[1] = {0.4};
  for (int k = 0; k <= 3; ++k) {
    const int a[1] = {k};
    CAPTURE(k);
    CHECK(std::abs(fd->jet(a, x) - f->jet(a, x)) < 1e-5);
  }
  const int a4[1] = {4};
  CHECK_THROWS(fd->jet(a4, x));
}

TEST_CASE("points outside the domain are rejected") {
  const auto f = corpus_function("rational");
  const double x[1] = {1e6};
  CHECK_THROWS_AS(f->eval(x), DomainError);
}

TEST_CASE("multi-index helpers") {
  CHECK(multi_indices(2, 3).size() == 4);
  CHECK(multi_indices(1, 5).size() == 1);
  const int a[2] = {2, 3};
  CHECK(multi_factorial(a) == 12.0);
  CHECK(box_grid(Box::cube(2, 1.0), 3).size() == 9);
  CHECK(box_grid(Box::cube(1, 1.0), 1)[0][0] == 0.0);
}
