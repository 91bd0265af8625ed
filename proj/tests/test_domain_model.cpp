#include <doctest.h>

#include <cmath>
#include <random>

#include "catalog.hpp"
#include "cconvex/domain_io.hpp"
#include "oracles.hpp"

using namespace cconvex;
using catalog::reals;

namespace {

ComplexVector pt(std::initializer_list<Complex> v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto c : v) out(i++) = c;
  return out;
}

}  // namespace

TEST_CASE("membership examples") {
  const auto koebe = Domain::koebe_slit_plane();
  CHECK_FALSE(contains(koebe, pt({0.3})));
  CHECK(contains(koebe, pt({{0.3, 1e-6}})));
  CHECK(contains(koebe, pt({-100.0})));
  CHECK(contains(koebe, pt({0.2499})));

  const auto e = Domain::weighted_diamond(reals({1, 1}));
  CHECK(contains(e, pt({0.5, 0.49})));
  CHECK_FALSE(contains(e, pt({0.5, 0.51})));
  CHECK_FALSE(contains(e, pt({0.5, 0.5})));  // open set

  const auto ell = Domain::complex_ellipsoid({1, 2});
  CHECK(contains(ell, pt({0.0, 0.99})));
  CHECK_FALSE(contains(ell, pt({0.8, 0.8})));  // 0.64 + 0.4096 > 1

  CHECK(contains(Domain::unit_ball(2), pt({0.6, {0.0, 0.79}})));
  CHECK_FALSE(contains(Domain::unit_ball(2), pt({0.6, {0.0, 0.81}})));
  CHECK_THROWS_AS(contains(Domain::unit_ball(2), pt({0.1})), DimensionError);
}

TEST_CASE("bounding boxes of the basic variants") {
  const auto box = bounding_box(Domain::polydisc(pt({{1, 0}, 0.0}), reals({1, 2})));
  CHECK(box.lower(0) == doctest::Approx(0.0));
  CHECK(box.upper(0) == doctest::Approx(2.0));
  CHECK(box.upper(3) == doctest::Approx(2.0));
  const auto ebox = bounding_box(Domain::complex_ellipsoid({1, 2}));
  for (Eigen::Index k = 0; k < 4; ++k) CHECK(ebox.upper(k) == doctest::Approx(1.0).epsilon(1e-9));
  const auto dbox = bounding_box(Domain::weighted_diamond(reals({1, 3})));
  CHECK(dbox.upper(2) == doctest::Approx(3.0));
  CHECK_THROWS_AS(bounding_box(Domain::koebe_slit_plane()), PreconditionError);
}

TEST_CASE("bounding boxes contain every sample and are tight") {
  for (const auto& entry : catalog::bounded()) {
    CAPTURE(entry.name);
    const auto box = bounding_box(entry.domain);
    const auto samples = sample_uniform(entry.domain, 20000, 2);
    for (const auto& z : samples.points) {
      CHECK(contains(entry.domain, z));
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        CHECK(z(j).real() >= box.lower(2 * j));
        CHECK(z(j).real() <= box.upper(2 * j));
        CHECK(z(j).imag() >= box.lower(2 * j + 1));
        CHECK(z(j).imag() <= box.upper(2 * j + 1));
      }
    }
    // each face of the box is touched by the closure: rays from the
    // centre reach it
    for (Eigen::Index j = 0; j < entry.domain.dim(); ++j) {
      ComplexVector e = ComplexVector::Zero(entry.domain.dim());
      e(j) = 1.0;
      double best = -1e9;
      std::mt19937_64 rng(j + 1);
      const auto centre = box.center();
      REQUIRE(contains(entry.domain, centre));
      for (int k = 0; k < 4000; ++k) {
        ComplexVector v = oracle::random_direction(entry.domain.dim(), rng);
        if (k % 2 == 0) v = (e + 0.05 * v).normalized();
        const auto w = centre + oracle::bisect_exit(entry.domain, centre, v) * v;
        best = std::max(best, w(j).real());
      }
      CHECK(best <= box.upper(2 * j) + 1e-9);
      CHECK(best >= box.upper(2 * j) - 0.1 * (box.upper(2 * j) - box.lower(2 * j)));
    }
  }
}

TEST_CASE("sampled volumes agree with exact volumes") {
  const auto disc = sample_uniform(Domain::unit_disc(), 400000, 1);
  CHECK(std::abs(disc.volume - oracle::pi) <= 3 * disc.volume_stderr);
  const auto poly = sample_uniform(Domain::polydisc(ComplexVector::Zero(2), reals({1, 1})), 400000, 1);
  CHECK(std::abs(poly.volume - oracle::pi * oracle::pi) <= 3 * poly.volume_stderr);
  const auto ball = sample_uniform(Domain::unit_ball(2), 400000, 4);
  CHECK(std::abs(ball.volume - oracle::pi * oracle::pi / 2) <= 3 * ball.volume_stderr);
  // diamond volume from nested quadrature: (2 pi)^2 / 24 for unit radii
  const double e_volume = oracle::diamond_moment_2d(1, 1, 0, 0);
  const auto e = sample_uniform(Domain::weighted_diamond(reals({1, 1})), 400000, 5);
  CHECK(std::abs(e.volume - e_volume) <= 3 * e.volume_stderr);
}

TEST_CASE("sampling is reproducible and independent of the thread count") {
  const auto d = Domain::complex_ellipsoid({1, 2});
  const auto a = sample_uniform(d, 50000, 17, 1);
  const auto b = sample_uniform(d, 50000, 17, 3);
  const auto c = sample_uniform(d, 50000, 18, 1);
  REQUIRE(a.points.size() == 50000);
  REQUIRE(b.points.size() == 50000);
  bool same = true;
  for (std::size_t i = 0; i < a.points.size(); ++i) same = same && (a.points[i] == b.points[i]);
  CHECK(same);
  CHECK(a.volume == b.volume);
  CHECK(a.proposals == b.proposals);
  CHECK_FALSE(a.points[0] == c.points[0]);
  CHECK_THROWS_AS(sample_uniform(Domain::koebe_slit_plane(), 10, 1), PreconditionError);
}

TEST_CASE("a near-degenerate image trips the acceptance floor") {
  ComplexMatrix flat(3, 3);
  flat << 1.0, 1.0, 1.0, 1.0, 1.0 + 1e-5, 1.0, 1.0, 1.0, 1.0 + 1e-5;
  const auto d = Domain::linear_image(Domain::polydisc(ComplexVector::Zero(3), reals({1, 1, 1})), flat);
  CHECK_THROWS_AS(sample_uniform(d, 1000, 1), SamplingError);
}

TEST_CASE("linear images pull back membership") {
  const auto base = Domain::weighted_diamond(reals({1, 2}));
  const auto a = catalog::shear2();
  const ComplexVector b = pt({{0.3, 0.1}, -0.2});
  const auto img = Domain::linear_image(base, a, b);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  int inside = 0;
  for (int t = 0; t < 5000; ++t) {
    const ComplexVector z = pt({{u(rng), u(rng)}, {u(rng), u(rng)}});
    const ComplexVector w = a * z + b;
    const bool in_base = contains(base, z);
    inside += in_base;
    CHECK(contains(img, w) == in_base);
  }
  CHECK(inside > 100);
}

TEST_CASE("Reinhardt flag means invariance under coordinate rotations") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(0, 2 * oracle::pi);
  for (const auto& entry : catalog::bounded()) {
    CAPTURE(entry.name);
    const auto info = symmetry(entry.domain);
    CHECK(info.is_bounded);
    CHECK(info.is_convex);
    if (!info.is_reinhardt) continue;
    std::uniform_real_distribution<double> u(-1.6, 1.6);
    for (int t = 0; t < 2000; ++t) {
      ComplexVector z(entry.domain.dim()), w(entry.domain.dim());
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        z(j) = {u(rng), u(rng)};
        w(j) = z(j) * std::polar(1.0, angle(rng));
      }
      CHECK(contains(entry.domain, z) == contains(entry.domain, w));
    }
  }
  CHECK_FALSE(symmetry(catalog::bounded()[8].domain).is_reinhardt);  // off-centre factor
  CHECK_FALSE(symmetry(Domain::koebe_slit_plane()).is_bounded);
}

TEST_CASE("convex variants are midpoint convex") {
  std::mt19937_64 rng(31);
  for (const auto& entry : catalog::bounded()) {
    CAPTURE(entry.name);
    const auto pts = sample_uniform(entry.domain, 2000, 9).points;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      std::uniform_real_distribution<double> t(0, 1);
      const double s = t(rng);
      CHECK(contains(entry.domain, ComplexVector(s * pts[i] + (1 - s) * pts[i + 1])));
    }
  }
}

TEST_CASE("construction validates parameters") {
  CHECK_THROWS_AS(Domain::ball(pt({0.0}), -1.0), PreconditionError);
  CHECK_THROWS_AS(Domain::polydisc(pt({0.0, 0.0}), reals({1})), DimensionError);
  CHECK_THROWS_AS(Domain::weighted_diamond(reals({1, 0})), PreconditionError);
  CHECK_THROWS_AS(Domain::complex_ellipsoid({1, 0}), PreconditionError);
  CHECK_THROWS_AS(Domain::product({}), PreconditionError);
  CHECK_THROWS_AS(Domain::linear_image(Domain::unit_ball(2), ComplexMatrix::Zero(2, 2)), PreconditionError);
  CHECK_THROWS_AS(Domain::linear_image(Domain::unit_ball(2), ComplexMatrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("JSON round trip is lossless") {
  auto entries = catalog::bounded();
  entries.push_back({"koebe", Domain::koebe_slit_plane()});
  entries.push_back({"nested", Domain::product({Domain::koebe_slit_plane(), entries[9].domain})});
  for (const auto& entry : entries) {
    CAPTURE(entry.name);
    const Json j = domain_to_json(entry.domain);
    const Domain back = domain_from_json(Json::parse(j.dump()));
    CHECK(domain_to_json(back) == j);
    CHECK(domain_hash(back) == domain_hash(entry.domain));
    CHECK(domain_hash_hex(back).size() == 16);
  }
  CHECK(domain_hash(Domain::unit_ball(2)) != domain_hash(Domain::unit_ball(3)));
}

TEST_CASE("JSON schema errors") {
  CHECK_THROWS_AS(domain_from_json(Json::parse(R"({"variant":"torus"})")), SchemaError);
  CHECK_THROWS_AS(domain_from_json(Json::parse(R"({"params":{}})")), SchemaError);
  CHECK_THROWS_AS(domain_from_json(Json::parse(R"({"variant":"polydisc","params":{}})")), SchemaError);
  CHECK_THROWS_AS(domain_from_json(Json::parse(R"({"variant":"complex_ellipsoid","params":{"exponents":[1.5]}})")),
                  SchemaError);
  const auto ball = domain_from_json(Json::parse(R"({"variant":"ball","params":{"dim":3}})"));
  CHECK(ball.dim() == 3);
}
