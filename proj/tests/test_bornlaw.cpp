#include "doctest.h"

#include <cmath>
#include <complex>

#include "branchlab/bornlaw.hpp"

using namespace branchlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("law evaluation at fixed points") {
  const ProbabilityLaw born = ProbabilityLaw::born();
  CHECK(born.eval(0, 0.37) == 0.37);

  const ProbabilityLaw aq = ProbabilityLaw::affine_quadratic(0.8, 0.2);
  CHECK(aq.eval(0, 0.5) == doctest::Approx(0.8 * 0.5 + 0.2 * 0.25).epsilon(1e-15));
  CHECK(aq.eval(0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));  // full certainty preserved
  CHECK(aq.eval(0, 0.0) == 0.0);

  const ProbabilityLaw odd = ProbabilityLaw::odd_counterexample(0.05);
  CHECK(odd.eval(0, 0.25) == doctest::Approx(0.25 + 0.05 * std::sin(kPi / 2)).epsilon(1e-15));
  CHECK_THROWS_AS(ProbabilityLaw::odd_counterexample(0.5), std::invalid_argument);
  CHECK(ProbabilityLaw::odd_counterexample(0.0).kind() == ProbabilityLaw::Kind::Born);
}

TEST_CASE("log_eval stays finite far below double underflow") {
  const ProbabilityLaw born = ProbabilityLaw::born();
  CHECK(born.log_eval(0, -8000.0) == -8000.0);
  const ProbabilityLaw aq = ProbabilityLaw::affine_quadratic(0.8, 0.2);
  // for tiny x the quadratic term vanishes: log(0.8 x) = log(0.8) + log x
  CHECK(aq.log_eval(0, -8000.0) ==
        doctest::Approx(std::log(0.8) - 8000.0).epsilon(1e-14));
  const ProbabilityLaw ga = ProbabilityLaw::general_affine(2.0, {0.0});
  CHECK(ga.log_eval(0, -8000.0) == doctest::Approx(-8000.0).epsilon(1e-14));
  // consistency with eval in the representable range
  for (double lx : {-1.0, -5.0, -20.0})
    CHECK(aq.log_eval(0, lx) ==
          doctest::Approx(std::log(aq.eval(0, std::exp(lx)))).epsilon(1e-12));
}

TEST_CASE("born satisfies the constraints for n in {2,3,5,8}") {
  const ProbabilityLaw born = ProbabilityLaw::born();
  for (int n : {2, 3, 5, 8}) {
    const auto rep = check_constraints(born, n, 2000, 77 + static_cast<std::uint64_t>(n));
    CHECK(rep.max_sum_violation <= 1e-12);
    CHECK(rep.max_range_violation <= 1e-12);
  }
}

TEST_CASE("general affine with nonzero offsets violates the sum constraint") {
  const ProbabilityLaw ga = ProbabilityLaw::general_affine(2.0, {0.1});
  const auto rep = check_constraints(ga, 3, 100, 5);
  // sum = (lambda/2) + n*c - 1 = 0.3 for lambda=2, c=0.1, n=3
  CHECK(rep.max_sum_violation == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("odd counterexample: valid at n=2, fails at n=3") {
  const ProbabilityLaw odd = ProbabilityLaw::odd_counterexample(0.05);
  const auto r2 = check_constraints(odd, 2, 2000, 11);
  CHECK(r2.max_sum_violation <= 1e-12);  // sin is odd around x -> 1-x
  CHECK(r2.max_range_violation <= 1e-12);
  // deterministic witness at a^2 = (.5, .3, .2):
  const double s = odd.eval(0, 0.5) + odd.eval(1, 0.3) + odd.eval(2, 0.2);
  // sin(pi) = 0, sin(.6 pi) + sin(.4 pi) = 2 sin(.5 pi) cos(.1 pi) > 0
  const double expect = 0.05 * (std::sin(0.6 * kPi) + std::sin(0.4 * kPi));
  CHECK(std::abs(s - 1.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(s - 1.0) > 0.01);
}

TEST_CASE("single detector reduction extracts magnitude and phase") {
  const Factor f{"s", {"0", "1", "2"}};
  const double theta = 0.7;
  const Amplitude phase = std::exp(Amplitude{0.0, theta});
  const StateVector psi =
      StateVector({f}, {phase * std::sqrt(0.6), {std::sqrt(0.3), 0.0}, {std::sqrt(0.1), 0.0}});
  const StateVector target = StateVector::basis_state({f}, {"0"});
  const auto res = single_detector_reduction(psi, target);
  CHECK(res.a1 == doctest::Approx(std::sqrt(0.6)).epsilon(1e-12));
  CHECK(res.absorbed_phase == doctest::Approx(theta).epsilon(1e-12));
  CHECK(!res.degenerate);
  REQUIRE(res.remainder.has_value());
  CHECK(res.remainder->norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(inner_product(target, *res.remainder)) <= 1e-12);

  const auto deg = single_detector_reduction(target, target);
  CHECK(deg.degenerate);
  CHECK(deg.a1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!deg.remainder.has_value());
}

TEST_CASE("lagrange residual: born gives the constant 2") {
  const ProbabilityLaw born = ProbabilityLaw::born();
  const std::vector<double> a{std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)};
  const auto rep = lagrange_residual(born, a);
  REQUIRE(rep.values.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(!rep.skipped[k]);
    // oracle: (1/a) d(a^2)/da = 2 exactly, independent of a
    CHECK(rep.values[k] == doctest::Approx(2.0).epsilon(1e-6));
  }
  CHECK(rep.max_pair_residual <= 1e-6);
}

TEST_CASE("lagrange residual: affine quadratic is not constant") {
  const ProbabilityLaw aq = ProbabilityLaw::affine_quadratic(0.8, 0.2);
  const std::vector<double> a{std::sqrt(0.7), std::sqrt(0.3)};
  const auto rep = lagrange_residual(aq, a);
  // oracle: (1/a) dP(a^2)/da = 2 alpha + 4 beta a^2
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(rep.values[k] ==
          doctest::Approx(2.0 * 0.8 + 4.0 * 0.2 * a[k] * a[k]).epsilon(1e-5));
  CHECK(rep.max_pair_residual > 0.1);
}

TEST_CASE("lagrange residual skips components at the pole") {
  const auto rep = lagrange_residual(ProbabilityLaw::born(), {1.0, 0.0});
  CHECK(!rep.skipped[0]);
  CHECK(rep.skipped[1]);
}

TEST_CASE("composition: born composes exactly") {
  const ProbabilityLaw born = ProbabilityLaw::born();
  const auto rep = compose_auxiliary(
      born, {std::sqrt(0.6), std::sqrt(0.4)},
      {{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)},
       {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}});
  CHECK(rep.max_violation <= 1e-14);
}

TEST_CASE("composition: odd counterexample fails at the 50/50 auxiliary probe") {
  const double eps = 0.05;
  const ProbabilityLaw odd = ProbabilityLaw::odd_counterexample(eps);
  const auto rep = compose_auxiliary(odd, {std::sqrt(0.9), std::sqrt(0.1)},
                                     {{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)},
                                      {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}});
  // hand-derived: violation(1,j) = eps |sin(0.9 pi) - 0.5 sin(1.8 pi)|
  //             = eps (sin(0.1 pi) + 0.5 sin(0.2 pi)) = 0.602910... * eps
  const double expect = eps * (std::sin(0.1 * kPi) + 0.5 * std::sin(0.2 * kPi));
  CHECK(expect == doctest::Approx(0.60291 * eps).epsilon(1e-4));
  CHECK(rep.max_violation == doctest::Approx(expect).epsilon(1e-12));
  CHECK(rep.max_violation > 0.95 * 0.603 * eps);
  CHECK(rep.max_violation < 1.05 * 0.603 * eps);
}

TEST_CASE("derive_born recovers lambda=2, c=0 from exact probes") {
  const std::vector<BornProbe> probes{{0, 0.6, {0.2, 0.5}},
                                      {0, 0.3, {0.2, 0.5}},
                                      {1, 0.4, {0.3, 0.6}},
                                      {1, 0.7, {0.3, 0.6}}};
  const BornSolution sol = derive_born(probes, 2);
  CHECK(sol.lambda == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(sol.c.size() == 2);
  for (double c : sol.c) CHECK(std::abs(c) <= 1e-12);
}

TEST_CASE("derive_born tolerates small measurement noise") {
  Rng rng(99);
  std::vector<BornProbe> probes;
  for (int k = 0; k < 2; ++k)
    for (double a_sq : {0.3, 0.6}) {
      BornProbe p;
      p.k = k;
      p.a_sq = k == 0 ? a_sq : 1.0 - a_sq;
      p.b_sq = {0.2, 0.4, 0.6, 0.8};
      for (double xb : p.b_sq) p.p12.push_back(p.a_sq * xb + 1e-6 * rng.normal());
      probes.push_back(p);
    }
  const BornSolution sol = derive_born(probes, 2);
  CHECK(sol.lambda == doctest::Approx(2.0).epsilon(1e-4));
  for (double c : sol.c) CHECK(std::abs(c) <= 1e-4);
}

TEST_CASE("derive_born rejects degenerate probe sets") {
  // only one a_sq value for each k: lambda and c are not separable
  const std::vector<BornProbe> probes{{0, 0.5, {0.2, 0.5}}, {1, 0.5, {0.2, 0.5}}};
  CHECK_THROWS_WITH_AS(derive_born(probes, 2), "degenerate probe set", std::invalid_argument);
  // single b value per probe: no slope measurable
  const std::vector<BornProbe> flat{{0, 0.5, {0.2}}};
  CHECK_THROWS_AS(derive_born(flat, 2), std::invalid_argument);
}

TEST_CASE("custom laws route through the callback") {
  const ProbabilityLaw sq = ProbabilityLaw::custom("square", [](int, double x) { return x * x; });
  CHECK(sq.eval(3, 0.5) == 0.25);
  const auto rep = check_constraints(sq, 2, 500, 3);
  CHECK(rep.max_sum_violation > 0.1);  // x^2 + (1-x)^2 != 1 in general
}
