#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cconvex/linalg.hpp"

namespace cconvex {

enum class DomainKind {
  ball,
  polydisc,
  weighted_diamond,
  complex_ellipsoid,
  koebe_slit_plane,
  product,
  linear_image,
};

std::string to_string(DomainKind kind);

struct Ball;
struct Polydisc;
struct WeightedDiamond;
struct ComplexEllipsoid;
struct KoebeSlitPlane;
struct Product;
struct LinearImage;

using DomainVariant = std::variant<Ball, Polydisc, WeightedDiamond, ComplexEllipsoid,
                                   KoebeSlitPlane, Product, LinearImage>;

/// Immutable handle to one model domain in C^n.
///
/// The catalog is closed: balls, polydiscs, weighted diamonds
/// {sum |z_j|/r_j < 1}, complex ellipsoids {sum |z_j|^(2 m_j) < 1}, the Koebe
/// slit plane C \ [1/4, inf), Cartesian products and invertible affine images.
/// Copies share the underlying model. Construction validates every parameter.
class Domain {
 public:
  static Domain ball(ComplexVector center, double radius);
  static Domain unit_ball(Eigen::Index n);
  static Domain unit_disc() { return unit_ball(1); }
  static Domain polydisc(ComplexVector center, RealVector radii);
  static Domain weighted_diamond(RealVector radii);
  static Domain complex_ellipsoid(std::vector<int> exponents);
  static Domain koebe_slit_plane();
  static Domain product(std::vector<Domain> factors);
  /// The set {map * w + shift : w in base}.
  static Domain linear_image(Domain base, ComplexMatrix map, ComplexVector shift);
  static Domain linear_image(Domain base, ComplexMatrix map);

  Eigen::Index dim() const { return dim_; }
  DomainKind kind() const;
  const DomainVariant& variant() const;

  template <typename T>
  const T* get_if() const;

 private:
  struct Model;
  Domain(std::shared_ptr<const Model> model, Eigen::Index dim);

  std::shared_ptr<const Model> model_;
  Eigen::Index dim_ = 0;
};

struct Ball {
  ComplexVector center;
  double radius = 1.0;
};

struct Polydisc {
  ComplexVector center;
  RealVector radii;
};

struct WeightedDiamond {
  RealVector radii;
};

struct ComplexEllipsoid {
  std::vector<int> exponents;
};

struct KoebeSlitPlane {};

struct Product {
  std::vector<Domain> factors;
};

struct LinearImage {
  Domain base;
  ComplexMatrix map;
  ComplexVector shift;
  ComplexMatrix inverse;  // map^{-1}, cached at construction
  double abs_det = 1.0;   // |det map|

  ComplexVector pull_point(const ComplexVector& z) const { return inverse * (z - shift); }
  ComplexVector pull_vector(const ComplexVector& x) const { return inverse * x; }
};

struct Domain::Model {
  DomainVariant value;
};

template <typename T>
const T* Domain::get_if() const {
  return std::get_if<T>(&variant());
}

struct SymmetryInfo {
  bool is_reinhardt = false;  // invariant under z_j -> e^{i t_j} z_j independently
  bool is_circular = false;   // invariant under z -> e^{i t} z
  bool is_convex = false;
  bool is_bounded = false;
};

SymmetryInfo symmetry(const Domain& domain);

/// Axis-aligned box in R^{2n}; coordinate 2j is Re z_j, 2j+1 is Im z_j.
struct Box {
  RealVector lower;
  RealVector upper;

  double volume() const { return (upper - lower).prod(); }
  ComplexVector center() const;
  RealVector half_widths() const { return (upper - lower) / 2.0; }
};

/// Points this close to the defining equality count as outside: every domain
/// is open and every construction works with strict inequalities.
inline constexpr double kMembershipMargin = 1e-12;

bool contains(const Domain& domain, const ComplexVector& z);

/// sup { Re <w, u> : w in domain }; +inf for unbounded domains.
double support_function(const Domain& domain, const ComplexVector& u);

/// Smallest axis-aligned box containing the closure of a bounded domain.
Box bounding_box(const Domain& domain);

struct SampleSet {
  std::vector<ComplexVector> points;
  double volume = 0.0;         // box volume times acceptance ratio
  double volume_stderr = 0.0;  // binomial standard error of that estimate
  std::uint64_t proposals = 0;
};

/// Uniform rejection sampling from the bounding box.
///
/// Proposals are generated in fixed-size chunks, each seeded by (seed, chunk
/// index), so the output is identical for any thread count. Throws
/// SamplingError when the acceptance ratio drops below 1e-4.
SampleSet sample_uniform(const Domain& domain, std::size_t count, std::uint64_t seed,
                         unsigned threads = 1);

}  // namespace cconvex
