#include <doctest.h>

#include <cmath>
#include <random>

#include "catalog.hpp"
#include "cconvex/bergman.hpp"
#include "cconvex/bounds.hpp"
#include "oracles.hpp"

using namespace cconvex;
using catalog::reals;
using oracle::pi;

namespace {

ComplexVector pt(std::initializer_list<Complex> v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto c : v) out(i++) = c;
  return out;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("constants in low dimensions") {
  const auto c1 = paper_constants(1);
  CHECK(c1.C_n == doctest::Approx(std::sqrt(2 / pi)).epsilon(1e-14));
  CHECK(c1.c_prime_n == doctest::Approx(4 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(c1.c_n == doctest::Approx(4 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(c1.kernel_upper == doctest::Approx(1 / pi).epsilon(1e-14));
  CHECK(c1.kernel_lower == doctest::Approx(1 / (16 * pi)).epsilon(1e-14));
  const auto c2 = paper_constants(2);
  CHECK(c2.C_n == doctest::Approx(std::sqrt(30.0) / pi).epsilon(1e-14));
  CHECK(c2.kernel_upper == doctest::Approx(6 / (pi * pi)).epsilon(1e-14));
  CHECK(c2.c_n == doctest::Approx(2 * c2.c_prime_n).epsilon(1e-15));
}

TEST_CASE("constants against direct factorial formulas") {
  for (int n = 1; n <= 8; ++n) {
    CAPTURE(n);
    const auto c = paper_constants(n);
    const double C = std::sqrt(factorial(2 * n + 2) / (6 * std::pow(2 * pi, n)));
    const double cp = std::pow(2.0, n) * std::sqrt(std::pow(2.0, n - 1) * factorial(2 * n + 2) / 3);
    CHECK(c.C_n == doctest::Approx(C).epsilon(1e-12));
    CHECK(c.c_prime_n == doctest::Approx(cp).epsilon(1e-12));
    CHECK(c.kernel_upper == doctest::Approx(factorial(2 * n) / std::pow(2 * pi, n)).epsilon(1e-12));
    CHECK(c.kernel_lower == doctest::Approx(std::pow(16 * pi, -n)).epsilon(1e-12));
    CHECK(c.kernel_lower < c.kernel_upper);
    if (n <= 6) CHECK(std::abs(c_prime_from_C(c) - c.c_prime_n) <= 1e-10 * c.c_prime_n);
    if (n > 1) CHECK(c.c_n > paper_constants(n - 1).c_n);
  }
  CHECK_THROWS_AS(paper_constants(0), PreconditionError);
  CHECK_THROWS_AS(paper_constants(9), PreconditionError);
}

TEST_CASE("invariant-metric interval examples") {
  const auto k = prop1_bounds(Domain::koebe_slit_plane(), pt({0.0}), pt({1.0}));
  CHECK(k.d == doctest::Approx(0.25));
  CHECK(k.gamma.lower == doctest::Approx(1.0));
  CHECK(k.gamma.upper == doctest::Approx(4.0));
  CHECK(k.gamma.admits(1.0, 1e-9));
  CHECK_FALSE(k.gamma.admits(0.9, 1e-9));
  const auto d = prop1_bounds(Domain::unit_disc(), pt({0.0}), pt({1.0}));
  CHECK(d.kappa.lower == doctest::Approx(0.25));
  CHECK(d.kappa.upper == doctest::Approx(1.0));
  CHECK(d.kappa.domain_id.size() == 16);
}

TEST_CASE("kernel interval examples") {
  const auto disc = thm9_bounds(Domain::unit_disc(), pt({0.0}), 1 / pi);
  REQUIRE(disc.bound.value.has_value());
  CHECK(*disc.bound.value == doctest::Approx(1 / pi).epsilon(1e-14));
  CHECK(*disc.bound.value == doctest::Approx(disc.bound.upper).epsilon(1e-14));

  const auto poly = Domain::polydisc(ComplexVector::Zero(2), reals({1, 1}));
  const auto z = pt({0.5, 0.0});
  const double k = bergman_oracle(poly, z).value;
  const auto t = thm9_bounds(poly, z, k);
  CHECK(t.frame.p == doctest::Approx(0.5));
  CHECK(*t.bound.value == doctest::Approx(k * 0.25));
  CHECK(t.bound.admits(*t.bound.value, 0.0));
  CHECK_THROWS_AS(thm9_bounds(Domain::koebe_slit_plane(), pt({0.0})), PreconditionError);
}

TEST_CASE("Bergman metric bounds examples") {
  const auto disc = thm8_bound(Domain::unit_disc(), pt({0.0}), pt({1.0}));
  CHECK(disc.coarse_upper == doctest::Approx(4 * std::sqrt(2.0)));
  CHECK(disc.refined_upper == doctest::Approx(4 * std::sqrt(2.0)));
  CHECK(disc.bound.admits(std::sqrt(2.0), 0.0));

  const auto e = Domain::weighted_diamond(reals({1, 1}));
  const auto model = build_gram(e, [] { GramOptions g; g.degree = 10; return g; }());
  const double b = metric_at(model, pt({0.0, 0.0}), pt({1.0, 0.0})).B;
  const auto t = thm8_bound(e, pt({0.0, 0.0}), pt({1.0, 0.0}));
  CHECK(b * t.d <= paper_constants(2).c_n);
  CHECK(t.bound.admits(b, 0.0));
}

TEST_CASE("the refined upper bound never exceeds the coarse one") {
  std::mt19937_64 rng(3);
  for (const auto& entry : catalog::bounded()) {
    CAPTURE(entry.name);
    for (const auto& z : catalog::interior_points(entry.domain, 4, 12)) {
      const auto frame = minimal_basis(entry.domain, z);
      for (int k = 0; k < 5; ++k) {
        const auto x = oracle::random_direction(z.size(), rng);
        const auto t = thm8_bound(entry.domain, z, x, frame);
        CHECK(t.refined_upper <= t.coarse_upper * (1 + 1e-12));
        CHECK(t.bound.lower <= t.bound.upper);
        const auto cmp = comparison_bounds(entry.domain, z, x, frame);
        CHECK(cmp.admits(*cmp.value, 1e-9));
      }
    }
  }
}

TEST_CASE("comparison-sum ratios") {
  const auto poly = Domain::polydisc(ComplexVector::Zero(2), reals({1, 2}));
  const auto x = pt({0.0, 1.0});
  const double kappa = gamma_kappa_oracle(poly, pt({0.0, 0.0}), x).kappa.value;
  CHECK(kappa == doctest::Approx(0.5));
  const auto r = prop10_check(poly, pt({0.0, 0.0}), x, kappa, MetricKind::kobayashi);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.pass);
  CHECK(r.lower == doctest::Approx(1 / (16 * paper_constants(2).c_n)));
  CHECK(r.note == "kobayashi");

  const auto disc = prop10_check(Domain::unit_disc(), pt({0.0}), pt({1.0}), 1.0, MetricKind::caratheodory);
  CHECK(disc.value == doctest::Approx(1.0));
  const auto huge = prop10_check(Domain::unit_disc(), pt({0.0}), pt({1.0}), 1e3, MetricKind::caratheodory);
  CHECK_FALSE(huge.pass);

  const auto ball = Domain::unit_ball(2);
  const auto z = pt({0.3, 0.0});
  const double b = bergman_metric_oracle(ball, z, pt({0.0, 1.0})).value;
  CHECK(prop10_check(ball, z, pt({0.0, 1.0}), b, MetricKind::bergman_metric).pass);
}

TEST_CASE("boundary exponent fit") {
  for (int m = 1; m <= 3; ++m) {
    CAPTURE(m);
    const auto fit = exponent_experiment(m, {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05});
    CHECK(fit.expected_slope == doctest::Approx(1.0 / (2 * m)));
    CHECK(std::abs(fit.slope - fit.expected_slope) <= 0.05 * fit.expected_slope);
    for (const auto& s : fit.samples) {
      CHECK(s.directional_distance == doctest::Approx(std::pow(2 * s.delta - s.delta * s.delta, 1.0 / (2 * m))).epsilon(1e-10));
      CHECK(s.boundary_distance == doctest::Approx(s.delta).epsilon(1e-9));
      CHECK(s.fitted == (s.delta <= 1e-2));
      CHECK(s.lower * 4 == doctest::Approx(s.upper));
    }
  }
  CHECK_THROWS_AS(exponent_experiment(2, {0.5, 1e-3}), PreconditionError);
  CHECK_THROWS_AS(exponent_experiment(2, {0.05}), PreconditionError);
  CHECK_THROWS_AS(exponent_experiment(0, {1e-3, 1e-4}), PreconditionError);
}
