#include <doctest.h>

#include <cmath>

#include "dcmicro/errors.hpp"
#include "dcmicro/sequence.hpp"

using namespace dcmicro;

TEST_CASE("Gevrey weights") {
  const auto g2 = RegularSequence::gevrey(2.0), g3 = RegularSequence::gevrey(3.0);
  CHECK(g2.m_value(0) == doctest::Approx(1.0));
  CHECK(g2.m_value(1) == doctest::Approx(1.0));
  CHECK(g2.m_value(3) == doctest::Approx(6.0));
  CHECK(g3.m_value(4) == doctest::Approx(576.0));
  CHECK(g2.M_value(4) == doctest::Approx(576.0));
}

TEST_CASE("choose_c") {
  CHECK(RegularSequence::gevrey(2.0).choose_c(50, false) == doctest::Approx(2.1).epsilon(1e-12));
  CHECK(RegularSequence::gevrey(1.5).choose_c(50, false) == doctest::Approx(1.05 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(RegularSequence::gevrey(2.0).choose_c(1, false), PreconditionError);
  const auto g = RegularSequence::gevrey(2.0);
  CHECK(g.c_moderate() >= g.c());
}

TEST_CASE("associated functions h, h1, N") {
  const auto g = RegularSequence::gevrey(2.0);
  AssociatedEvaluator A(g);
  CHECK(A.h(1.0) == doctest::Approx(1.0));
  CHECK(A.h(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(A.h(0.1) == doctest::Approx(3.6288e-4).epsilon(1e-12));
  CHECK(A.h1(2.0) == doctest::Approx(1.0));
  CHECK(A.h1(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(A.h1(0.1) == doctest::Approx(0.0036288).epsilon(1e-12));
  CHECK(A.bigN(0.5) == 1);
  CHECK(A.bigN(0.1) == 9);
  CHECK(A.bigN(3.0) == 1);
  CHECK_THROWS_AS(A.h(0.0), DomainError);
  CHECK_THROWS_AS(A.h(-1.0), DomainError);
}

TEST_CASE("h matches brute-force minimisation over k") {
  const auto g = RegularSequence::gevrey(2.0);
  AssociatedEvaluator A(g);
  for (double r : {0.9, 0.3, 0.07, 0.02, 0.004}) {
    double best = 1e300;
    for (int k = 0; k <= g.k_max(); ++k) best = std::min(best, std::exp(g.log_m(k) + k * std::log(r)));
    CHECK(A.h(r) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("validate") {
  CHECK(validate(RegularSequence::gevrey(2.0), 60).all_pass());

  const auto flat = validate(RegularSequence::table(std::vector<double>(41, 0.0)), 40);
  CHECK_FALSE(flat.all_pass());
  bool d_failed = false;
  for (const auto& it : flat.items)
    if (it.condition == "d") d_failed = !it.pass;
  CHECK(d_failed);

  auto condition_b = [](const std::vector<double>& lm) {
    for (const auto& it : validate(RegularSequence::table(lm), 40).items)
      if (it.condition == "b") return it.pass;
    return true;
  };
  std::vector<double> lm;
  for (int k = 0; k <= 40; ++k) lm.push_back(std::lgamma(k + 1.0));
  // A 10% dip at k = 5 stays log-convex for m_k = k! (the slack at k = 4 is ln(1.25));
  // a 10% bump leaves the hull.
  auto dip = lm, bump = lm;
  dip[5] += std::log(0.9);
  bump[5] += std::log(1.1);
  CHECK(condition_b(dip));
  CHECK_FALSE(condition_b(bump));
  auto deep = lm;
  deep[5] += std::log(0.7);
  CHECK_FALSE(condition_b(deep));
}

TEST_CASE("sequence laws hold for Gevrey 1.5, 2, 3") {
  for (double s : {1.5, 2.0, 3.0}) {
    const auto rep = check_laws(RegularSequence::gevrey(s), 100, 12, 10000, 1);
    CAPTURE(s);
    CHECK(rep.all_pass());
  }
}

TEST_CASE("the literal M-form of the kappa estimate fails for Gevrey 1.5 and is non-gating") {
  const auto rep = check_laws(RegularSequence::gevrey(1.5), 20, 2, 10, 0);
  bool found = false;
  for (const auto& c : rep.checks)
    if (!c.gating) {
      found = true;
      CHECK(c.violations > 0);
    }
  CHECK(found);
  CHECK(rep.all_pass());
}

TEST_CASE("from_json") {
  const auto g = RegularSequence::from_json({{"kind", "gevrey"}, {"s", 2.0}, {"k_max", 30}});
  CHECK(g.k_max() == 30);
  CHECK(g.m_value(3) == doctest::Approx(6.0));
}
