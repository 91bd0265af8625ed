#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cconvex/domain.hpp"

namespace cconvex {

/// Tuning constants of the numerical searches. The defaults are the documented
/// values; tests only ever tighten them.
struct GeometryOptions {
  int phase_grid = 256;           // angles used to bracket the minimizing phase
  int search_starts = 32;         // quasi-random starts on the direction sphere
  int certify_directions = 1000;  // random directions used to certify a distance
  double certify_slack = 1e-6;    // certified ball has radius d * (1 - slack)
};

/// d_D(z, X) = sup { r > 0 : z + lambda X in D whenever |lambda| < r }.
///
/// `value` is infinite only when the whole complex line lies in D.
/// `contact` is a lambda with |lambda| = value and z + lambda X on the boundary.
struct DirectionalDistance {
  double value = 0.0;
  Complex contact{0.0, 0.0};

  bool finite() const { return value < std::numeric_limits<double>::infinity(); }
};

/// First exit time sup { t : z + s v in D for all 0 <= s < t } along a real ray.
double ray_exit(const Domain& domain, const ComplexVector& z, const ComplexVector& v);

DirectionalDistance directional_distance(const Domain& domain, const ComplexVector& z,
                                         const ComplexVector& x,
                                         const GeometryOptions& options = {});

struct BoundaryPoint {
  double distance = 0.0;
  ComplexVector point;      // a nearest boundary point
  ComplexVector direction;  // (point - z) / distance
};

/// Euclidean distance from z to the boundary, with a nearest boundary point.
BoundaryPoint boundary_distance(const Domain& domain, const ComplexVector& z,
                                const GeometryOptions& options = {});

/// Distance from z to the boundary of the slice D cap (z + span Q), measured
/// inside that affine subspace. Q has orthonormal columns.
BoundaryPoint boundary_distance_in_subspace(const Domain& domain, const ComplexVector& z,
                                            const ComplexMatrix& subspace,
                                            const GeometryOptions& options = {});

/// Greedy orthonormal frame of nearest-boundary directions at a point.
///
/// Step j finds the nearest boundary point a^j of the slice of D through z
/// orthogonal to the previous directions, records d_j = |a^j - z| and the
/// direction b_j = (a^j - z) / d_j, then restricts to b_j's orthogonal
/// complement. Slices are never materialized: membership of a slice is
/// membership of D at the embedded point.
struct MinimalBasisFrame {
  ComplexMatrix basis;                // column j is b_j
  RealVector distances;               // d_1 <= ... <= d_n
  std::vector<ComplexVector> contacts;
  double p = 0.0;                     // product of the distances
  ComplexVector base_point;
};

MinimalBasisFrame minimal_basis(const Domain& domain, const ComplexVector& z,
                                const GeometryOptions& options = {});

/// Components X_j = <X, b_j> in the frame's basis.
ComplexVector decompose(const ComplexVector& x, const MinimalBasisFrame& frame);

/// sum_j |X_j(z)| / d_j(z), the comparison sum of the frame.
double comparison_sum(const ComplexVector& x, const MinimalBasisFrame& frame);

struct InclusionResult {
  bool contained = true;
  std::optional<ComplexVector> witness;  // a sampled point outside D
  std::size_t samples_checked = 0;
};

/// Samples the scaled diamond {z + sum_j w_j b_j : sum_j |w_j| / r_j < 1 - 1e-6}
/// and checks every point lies in D. Requires the disc of radius r_j about z
/// in direction b_j to be inside D for each j (checked first). Columns of
/// `directions` are the b_j; the identity is used when omitted.
InclusionResult diamond_inclusion_check(const Domain& domain, const ComplexVector& z,
                                        const RealVector& radii,
                                        const ComplexMatrix& directions,
                                        std::size_t samples, std::uint64_t seed);

InclusionResult diamond_inclusion_check(const Domain& domain, const ComplexVector& z,
                                        const RealVector& radii, std::size_t samples,
                                        std::uint64_t seed);

}  // namespace cconvex
