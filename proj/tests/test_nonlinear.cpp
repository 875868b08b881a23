#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dcmicro/corpus.hpp"
#include "dcmicro/errors.hpp"
#include "dcmicro/nonlinear.hpp"

using namespace dcmicro;

namespace {
const cplx I(0.0, 1.0);
}

TEST_CASE("linearization") {
  const auto cr = corpus_system("sys_cr");
  const auto sq = corpus_function("holo_square");
  for (double x : {-0.3, 0.0, 0.4}) {
    const double p[2] = {x, 0.1};
    const auto a = linearize(cr, *sq, p);
    CHECK(std::abs(a[0][0] - I) < 1e-14);
  }
  const auto burgers = corpus_system("sys_burgers");
  const auto u = corpus_function("burgers_line");
  const double p[2] = {0.3, 0.2};
  const auto a = linearize(burgers, *u, p);
  CHECK(std::abs(a[0][0] - 0.375) < 1e-14);
  const auto afd = linearize_fd(burgers, *u, p);
  CHECK(std::abs(a[0][0] - afd[0][0]) < 1e-7);

  const auto hier = corpus_system("sys_burgers_hierarchy");
  const auto uh = corpus_function("burgers_hierarchy");
  const double ph[3] = {0.2, 0.1, 0.05};
  const auto ah = linearize(hier, *uh, ph), ahfd = linearize_fd(hier, *uh, ph);
  REQUIRE(ah.size() == 2);
  const cplx uval = uh->eval(ph);
  CHECK(std::abs(ah[0][0] - uval) < 1e-13);
  CHECK(std::abs(ah[1][0] - uval * uval) < 1e-13);
  for (int j = 0; j < 2; ++j) CHECK(std::abs(ah[j][0] - ahfd[j][0]) < 1e-7);
}

TEST_CASE("solutions are checked before use") {
  const auto grid = box_grid(Box{{-0.3, 0.0}, {0.3, 0.2}}, 5);
  CHECK(check_solution(corpus_system("sys_burgers"), *corpus_function("burgers_line"), grid).admitted);
  CHECK(check_solution(corpus_system("sys_cr"), *corpus_function("holo_square"), grid).admitted);
  CHECK_FALSE(check_solution(corpus_system("sys_cr"), *corpus_function("burgers_line"), grid).admitted);
}

TEST_CASE("characteristic test") {
  const std::vector<std::vector<cplx>> ai = {{I}};
  const double xi1[1] = {1.0}, tau0[1] = {0.0}, tau2[1] = {2.0};
  const auto r = characteristic_test(ai, xi1, tau0);
  CHECK_FALSE(r.characteristic);
  CHECK(r.margin == doctest::Approx(1.0));

  const std::vector<std::vector<cplx>> a2 = {{2.0}};
  const auto r2 = characteristic_test(a2, xi1, tau2);
  CHECK(r2.characteristic);
  CHECK(r2.margin == doctest::Approx(0.0).epsilon(1e-12));

  // a = i: no unit (xi, tau) is characteristic.
  for (int k = 0; k < 32; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 32.0;
    const double xi[1] = {std::cos(th)}, tau[1] = {std::sin(th)};
    CHECK_FALSE(characteristic_test(ai, xi, tau).characteristic);
  }
}

TEST_CASE("theta-rotated systems") {
  const auto cr = corpus_system("sys_cr");
  // (x, t, zeta_0, zeta, tau)
  const std::vector<cplx> args = {0.1, 0.2, cplx(0.3, 0.1), cplx(0.5, -0.2), 0.7};
  const cplx base = args[4] - I * args[3];
  const auto t0 = theta_system(cr, 0.0).eval(args);
  CHECK(std::abs(t0[0] - base) < 1e-15);
  const auto t1 = theta_system(cr, std::numbers::pi / 2).eval(args);
  CHECK(std::abs(t1[0] - (-I) * base) < 1e-14);
}

TEST_CASE("Hamiltonian coefficients") {
  const auto cr = corpus_system("sys_cr");
  const std::vector<cplx> args = {0.1, 0.2, cplx(0.3, 0.1), cplx(0.5, -0.2), 0.7};
  for (double th : {0.0, 0.7, 2.0}) {
    const auto h = hamiltonian_coeffs(cr, th, 0, args);
    CHECK(std::abs(h[0]) < 1e-14);
  }
  // f = -zeta depends on nothing but zeta.
  const auto tr = corpus_system("sys_transport");
  for (cplx hi : hamiltonian_coeffs(tr, 0.4, 0, args)) CHECK(std::abs(hi) < 1e-14);
}

TEST_CASE("holomorphy, commutators and the substitution identity") {
  CHECK(holomorphy_residual(corpus_system("sys_burgers"), 50, 1) < 1e-10);
  const auto hier = corpus_system("sys_burgers_hierarchy");
  const std::vector<cplx> lifted(lifted_nvars(hier), cplx(0.1, 0.05));
  CHECK(hamiltonian_commutator(hier, 0.3, lifted) < 1e-10);
  const double xtr[3] = {0.2, 0.1, 0.05};
  CHECK(substitution_identity_residual(corpus_system("sys_burgers"), *corpus_function("burgers_line"), 0.3, xtr) <
        1e-10);
}

TEST_CASE("wave-front inclusion") {
  WfInclusionConfig cfg;
  cfg.points = {{0.0, 0.0}};
  cfg.directions = 8;
  const auto rep = wf_inclusion_experiment(corpus_system("sys_cr"), "holo_square", cfg);
  CHECK(rep.pass);
  CHECK(rep.flagged.empty());
  CHECK(rep.scanned == 8);

  CHECK_THROWS_AS(wf_inclusion_experiment(corpus_system("sys_cr"), "burgers_line", cfg), InadmissibleSolution);
}

TEST_CASE("unknown systems are rejected") {
  CHECK_THROWS_AS(corpus_system("sys_nope"), ConfigError);
}
