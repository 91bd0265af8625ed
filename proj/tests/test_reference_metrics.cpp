#include <doctest.h>

#include <cmath>
#include <random>

#include "catalog.hpp"
#include "cconvex/geometry.hpp"
#include "cconvex/reference_metrics.hpp"
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

// Preimage of w under zeta / (1 + zeta)^2 from the quadratic
// w zeta^2 + (2w - 1) zeta + w = 0; the roots multiply to 1.
Complex koebe_preimage(Complex w) {
  if (std::abs(w) < 1e-300) return 0.0;
  const Complex disc = std::sqrt((2.0 * w - 1.0) * (2.0 * w - 1.0) - 4.0 * w * w);
  const Complex r1 = (1.0 - 2.0 * w + disc) / (2.0 * w);
  const Complex r2 = (1.0 - 2.0 * w - disc) / (2.0 * w);
  return std::abs(r1) < std::abs(r2) ? r1 : r2;
}

}  // namespace

TEST_CASE("invariant metric examples") {
  const auto disc = gamma_kappa_oracle(Domain::unit_disc(), pt({0.0}), pt({1.0}));
  CHECK(disc.gamma.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(disc.kappa.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(disc.kappa.exactness == Exactness::closed_form);

  const auto koebe = gamma_kappa_oracle(Domain::koebe_slit_plane(), pt({0.0}), pt({1.0}));
  CHECK(koebe.gamma.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(koebe.kappa.exactness == Exactness::transported);
  CHECK(koebe.gamma.value * directional_distance(Domain::koebe_slit_plane(), pt({0.0}), pt({1.0})).value ==
        doctest::Approx(0.25).epsilon(1e-12));

  const auto ball = gamma_kappa_oracle(Domain::unit_ball(2), pt({0.0, 0.0}), pt({1.0, 0.0}));
  CHECK(ball.kappa.value == doctest::Approx(1.0).epsilon(1e-15));

  // polydisc: max_j |X_j| r_j / (r_j^2 - |z_j|^2)
  const auto poly = gamma_kappa_oracle(Domain::polydisc(ComplexVector::Zero(2), reals({1, 2})), pt({0.5, 0.0}),
                                       pt({1.0, 1.0}));
  CHECK(poly.kappa.value == doctest::Approx(std::max(1.0 / 0.75, 2.0 / 4.0)).epsilon(1e-14));
}

TEST_CASE("disc metric is Mobius invariant") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  const auto disc = Domain::unit_disc();
  for (int t = 0; t < 200; ++t) {
    const Complex z(u(rng), u(rng)), a(u(rng), u(rng)), x(u(rng), u(rng));
    if (std::abs(z) >= 0.99 || std::abs(a) >= 0.99 || std::abs(x) < 1e-3) continue;
    const Complex phi = (z - a) / (1.0 - std::conj(a) * z);
    const Complex dphi = (1.0 - std::norm(a)) / ((1.0 - std::conj(a) * z) * (1.0 - std::conj(a) * z));
    const double before = gamma_kappa_oracle(disc, pt({z}), pt({x})).kappa.value;
    const double after = gamma_kappa_oracle(disc, pt({phi}), pt({dphi * x})).kappa.value;
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
    CHECK(before == doctest::Approx(std::abs(x) / (1 - std::norm(z))).epsilon(1e-13));
  }
}

TEST_CASE("ball metric matches the automorphism-invariant form") {
  std::mt19937_64 rng(2);
  const auto ball = Domain::unit_ball(3);
  for (const auto& z : sample_uniform(ball, 100, 3).points) {
    const auto x = oracle::random_direction(3, rng);
    const double s = 1 - z.squaredNorm();
    const double expect = std::sqrt(x.squaredNorm() / s + std::norm(z.dot(x)) / (s * s));
    const auto gk = gamma_kappa_oracle(ball, z, x);
    CHECK(gk.kappa.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(gk.gamma.value == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("slit plane metric agrees with the disc metric transported by an independent inverse") {
  const auto koebe = Domain::koebe_slit_plane();
  std::mt19937_64 rng(3);
  for (const auto& w : catalog::interior_points(koebe, 200, 4)) {
    const Complex zeta = koebe_preimage(w(0));
    REQUIRE(std::abs(zeta) < 1.0);
    const Complex dk = (1.0 - zeta) / std::pow(1.0 + zeta, 3);
    const auto x = oracle::random_direction(1, rng);
    const double expect = std::abs(x(0)) / (std::abs(dk) * (1.0 - std::norm(zeta)));
    CHECK(gamma_kappa_oracle(koebe, w, x).kappa.value == doctest::Approx(expect).epsilon(1e-10));
    CHECK(std::abs(koebe_map_inverse(w(0)) - zeta) < 1e-12);
  }
}

TEST_CASE("Koebe map round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  int tested = 0;
  while (tested < 1000) {
    const Complex zeta(u(rng), u(rng));
    if (std::abs(zeta) >= 0.999) continue;
    ++tested;
    const Complex w = koebe_map(zeta);
    CHECK(std::abs(koebe_map_inverse(w) - zeta) < 1e-12);
    const Complex h = 1e-6;
    const Complex numeric = (koebe_map(zeta + h) - koebe_map(zeta - h)) / (2.0 * h);
    CHECK(std::abs(koebe_map_derivative(zeta) - numeric) < 1e-6 * std::max(1.0, std::abs(numeric)));
  }
  CHECK(std::abs(koebe_map(0.0)) == 0.0);
  CHECK(std::abs(koebe_map_derivative(0.0) - 1.0) < 1e-15);
  CHECK(koebe_map(0.999999).real() == doctest::Approx(0.25).epsilon(1e-10));
  CHECK_THROWS_AS(koebe_map_inverse(0.3), PreconditionError);
}

TEST_CASE("Caratheodory and Kobayashi sit between the directional-distance bounds") {
  std::vector<catalog::Entry> entries = {
      {"disc", Domain::unit_disc()},
      {"ball2", Domain::unit_ball(2)},
      {"ball3", Domain::unit_ball(3)},
      {"polydisc", Domain::polydisc(ComplexVector::Zero(2), reals({1, 2}))},
      {"product", catalog::bounded()[8].domain},
      {"image", catalog::bounded()[9].domain},
      {"koebe", Domain::koebe_slit_plane()},
  };
  std::mt19937_64 rng(5);
  for (const auto& entry : entries) {
    CAPTURE(entry.name);
    REQUIRE(has_gamma_kappa_oracle(entry.domain));
    for (const auto& z : catalog::interior_points(entry.domain, 40, 6)) {
      const auto x = oracle::random_direction(z.size(), rng);
      const double d = directional_distance(entry.domain, z, x).value;
      const auto gk = gamma_kappa_oracle(entry.domain, z, x);
      CHECK(gk.gamma.value <= gk.kappa.value * (1 + 1e-12));
      CHECK(gk.gamma.value >= 1 / (4 * d) - 1e-9);
      CHECK(gk.kappa.value <= 1 / d + 1e-9);
    }
  }
}

TEST_CASE("domains without invariant-metric formulas are refused") {
  CHECK_FALSE(has_gamma_kappa_oracle(Domain::weighted_diamond(reals({1, 1}))));
  CHECK_THROWS_AS(gamma_kappa_oracle(Domain::weighted_diamond(reals({1, 1})), pt({0.0, 0.0}), pt({1.0, 0.0})),
                  UnsupportedError);
  CHECK(has_gamma_kappa_oracle(Domain::complex_ellipsoid({1, 1})));
  CHECK(has_gamma_kappa_oracle(Domain::weighted_diamond(reals({2}))));
  CHECK_THROWS_AS(gamma_kappa_oracle(Domain::unit_disc(), pt({1.5}), pt({1.0})), PreconditionError);
}

TEST_CASE("Bergman kernel examples") {
  CHECK(bergman_oracle(Domain::unit_disc(), pt({0.0})).value == doctest::Approx(1 / pi).epsilon(1e-15));
  CHECK(bergman_oracle(Domain::unit_ball(2), pt({0.0, 0.0})).value == doctest::Approx(2 / (pi * pi)).epsilon(1e-15));
  CHECK(bergman_oracle(Domain::weighted_diamond(reals({1, 1})), pt({0.0, 0.0})).value ==
        doctest::Approx(6 / (pi * pi)).epsilon(1e-14));
  CHECK(bergman_metric_oracle(Domain::unit_disc(), pt({0.0}), pt({1.0})).value ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_FALSE(has_bergman_oracle(Domain::weighted_diamond(reals({1, 1})), pt({0.1, 0.0})));
  CHECK_THROWS_AS(bergman_oracle(Domain::weighted_diamond(reals({1, 1})), pt({0.1, 0.0})), UnsupportedError);
  CHECK_FALSE(has_bergman_oracle(Domain::koebe_slit_plane(), pt({0.0})));
}

TEST_CASE("disc and ball kernels against their power series") {
  for (const auto& z : sample_uniform(Domain::unit_disc(), 100, 7).points) {
    if (std::abs(z(0)) > 0.95) continue;
    CHECK(bergman_oracle(Domain::unit_disc(), z).value == doctest::Approx(oracle::disc_kernel_series(z(0))).epsilon(1e-12));
  }
  for (const auto& z : sample_uniform(Domain::unit_ball(2), 100, 8).points) {
    if (z.norm() > 0.95) continue;
    CHECK(bergman_oracle(Domain::unit_ball(2), z).value == doctest::Approx(oracle::ball2_kernel_series(z)).epsilon(1e-12));
  }
}

TEST_CASE("moments against nested radial quadrature") {
  const auto diamond = Domain::weighted_diamond(reals({1.0, 2.0}));
  const auto ell12 = Domain::complex_ellipsoid({1, 2});
  const auto ell23 = Domain::complex_ellipsoid({2, 3});
  for (int a1 = 0; a1 <= 4; ++a1) {
    for (int a2 = 0; a2 + a1 <= 4; ++a2) {
      CAPTURE(a1);
      CAPTURE(a2);
      CHECK(reinhardt_moment(diamond, {a1, a2}) == doctest::Approx(oracle::diamond_moment_2d(1, 2, a1, a2)).epsilon(1e-10));
      CHECK(reinhardt_moment(ell12, {a1, a2}) == doctest::Approx(oracle::ellipsoid_moment_2d(1, 2, a1, a2)).epsilon(1e-10));
      CHECK(reinhardt_moment(ell23, {a1, a2}) == doctest::Approx(oracle::ellipsoid_moment_2d(2, 3, a1, a2)).epsilon(1e-10));
      CHECK(reinhardt_moment(Domain::unit_ball(2), {a1, a2}) ==
            doctest::Approx(oracle::ellipsoid_moment_2d(1, 1, a1, a2)).epsilon(1e-10));
    }
  }
  // polydisc moments factor into disc moments pi r^(2a+2) / (a+1)
  const auto poly = Domain::polydisc(ComplexVector::Zero(2), reals({1, 2}));
  CHECK(reinhardt_moment(poly, {1, 2}) == doctest::Approx(pi / 2 * pi * std::pow(2.0, 6) / 3).epsilon(1e-14));
  CHECK_THROWS_AS(reinhardt_moment(Domain::koebe_slit_plane(), {0}), UnsupportedError);
  CHECK_THROWS_AS(reinhardt_moment(poly, {1}), DimensionError);
}

TEST_CASE("unit diamond metric at the centre from quadrature moments") {
  const double m0 = oracle::diamond_moment_2d(1, 1, 0, 0);
  const double m1 = oracle::diamond_moment_2d(1, 1, 1, 0);
  CHECK(1 / std::sqrt(m1) == doctest::Approx(std::sqrt(30.0) / pi).epsilon(1e-10));
  const auto e = Domain::weighted_diamond(reals({1, 1}));
  CHECK(bergman_metric_oracle(e, pt({0.0, 0.0}), pt({1.0, 0.0})).value ==
        doctest::Approx(std::sqrt(m0 / m1)).epsilon(1e-10));
  const auto x = pt({{0.3, 0.4}, -1.2});
  CHECK(bergman_metric_oracle(e, pt({0.0, 0.0}), x).value ==
        doctest::Approx(std::sqrt(m0 * x.squaredNorm() / m1)).epsilon(1e-10));
}

TEST_CASE("product and linear-image transformation laws") {
  const auto disc = Domain::unit_disc();
  const auto small = Domain::ball(pt({0.5}), 0.5);
  const auto prod = Domain::product({disc, small});
  const auto z = pt({{0.2, -0.1}, {0.6, 0.1}});
  const auto x = pt({0.7, {0.0, -0.4}});
  const double k1 = bergman_oracle(disc, pt({z(0)})).value, k2 = bergman_oracle(small, pt({z(1)})).value;
  CHECK(bergman_oracle(prod, z).value == doctest::Approx(k1 * k2).epsilon(1e-14));
  const double b1 = bergman_metric_oracle(disc, pt({z(0)}), pt({x(0)})).value;
  const double b2 = bergman_metric_oracle(small, pt({z(1)}), pt({x(1)})).value;
  CHECK(bergman_metric_oracle(prod, z, x).value == doctest::Approx(std::hypot(b1, b2)).epsilon(1e-14));
  const auto g1 = gamma_kappa_oracle(disc, pt({z(0)}), pt({x(0)})).kappa.value;
  const auto g2 = gamma_kappa_oracle(small, pt({z(1)}), pt({x(1)})).kappa.value;
  CHECK(gamma_kappa_oracle(prod, z, x).kappa.value == doctest::Approx(std::max(g1, g2)).epsilon(1e-14));

  const auto a = catalog::shear2();
  const ComplexVector shift = pt({0.1, {0.0, 0.3}});
  const auto ball = Domain::unit_ball(2);
  const auto image = Domain::linear_image(ball, a, shift);
  const auto w = pt({0.3, {0.1, 0.2}});
  const double det = std::abs(a.determinant());
  CHECK(bergman_oracle(image, ComplexVector(a * w + shift)).value * det * det ==
        doctest::Approx(bergman_oracle(ball, w).value).epsilon(1e-13));
  CHECK(bergman_metric_oracle(image, ComplexVector(a * w + shift), ComplexVector(a * x)).value ==
        doctest::Approx(bergman_metric_oracle(ball, w, x).value).epsilon(1e-13));
  CHECK(gamma_kappa_oracle(image, ComplexVector(a * w + shift), ComplexVector(a * x)).kappa.value ==
        doctest::Approx(gamma_kappa_oracle(ball, w, x).kappa.value).epsilon(1e-13));
}
