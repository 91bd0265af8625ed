#pragma once

#include <vector>

#include "cconvex/domain.hpp"

namespace cconvex {

enum class MetricKind { caratheodory, kobayashi, bergman_kernel, bergman_M, bergman_metric };
enum class Exactness { closed_form, transported };

std::string to_string(MetricKind kind);
std::string to_string(Exactness exactness);

struct MetricValue {
  MetricKind kind = MetricKind::kobayashi;
  double value = 0.0;
  Exactness exactness = Exactness::closed_form;
};

struct InvariantMetricPair {
  MetricValue gamma;  // Caratheodory
  MetricValue kappa;  // Kobayashi
};

/// Closed-form Caratheodory and Kobayashi metrics on the catalog.
///
/// Supported: balls, polydiscs, one-dimensional diamonds and ellipsoids
/// (discs), ellipsoids with all exponents 1 (the unit ball), the Koebe slit
/// plane, products of supported factors and linear images of them. Products
/// use the maximum of the factor metrics. Throws UnsupportedError otherwise.
InvariantMetricPair gamma_kappa_oracle(const Domain& domain, const ComplexVector& z,
                                       const ComplexVector& x);
bool has_gamma_kappa_oracle(const Domain& domain);

/// Closed-form Bergman kernel K_D(z). Diamonds and ellipsoids in dimension
/// n >= 2 are supported only at the origin, where K = 1 / volume.
MetricValue bergman_oracle(const Domain& domain, const ComplexVector& z);
bool has_bergman_oracle(const Domain& domain, const ComplexVector& z);

/// Closed-form Bergman metric B_D(z; X), with the same coverage as the kernel.
MetricValue bergman_metric_oracle(const Domain& domain, const ComplexVector& z,
                                  const ComplexVector& x);

/// Integral of prod_j |z_j - c_j|^(2 alpha_j) over a complete Reinhardt model
/// centred at c (balls, polydiscs, diamonds, ellipsoids and their products).
double reinhardt_moment(const Domain& domain, const std::vector<int>& alpha);
bool has_reinhardt_moments(const Domain& domain);

/// Symmetry centre used by reinhardt_moment.
ComplexVector reinhardt_center(const Domain& domain);

/// k(zeta) = zeta / (1 + zeta)^2 maps the unit disc onto C \ [1/4, inf).
Complex koebe_map(Complex zeta);
Complex koebe_map_derivative(Complex zeta);
/// Inverse of koebe_map; round trip error below 1e-12. Throws on the slit.
Complex koebe_map_inverse(Complex w);

}  // namespace cconvex
