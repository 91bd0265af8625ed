#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cconvex/check_record.hpp"
#include "cconvex/geometry.hpp"
#include "cconvex/reference_metrics.hpp"

namespace cconvex {

/// Explicit constants of the metric and kernel estimates in dimension n.
///
///   C_n  = sqrt((2n+2)! / (6 (2 pi)^n))            M_E(0; e_1) for the unit diamond E
///   c'_n = 2^n sqrt(2^(n-1) (2n+2)! / 3)            equal to (4 sqrt(pi))^n C_n
///   c_n  = n c'_n
///   kernel interval [(16 pi)^-n, (2n)! / (2 pi)^n] for K_D(z) p_D(z)^2
struct PaperConstants {
  int n = 1;
  double C_n = 0.0;
  double c_prime_n = 0.0;
  double c_n = 0.0;
  double kernel_lower = 0.0;
  double kernel_upper = 0.0;
};

/// Computed in log space; n must lie in 1..8.
PaperConstants paper_constants(int n);

/// (4 sqrt(pi))^n C_n, the second expression for c'_n.
double c_prime_from_C(const PaperConstants& constants);

enum class BoundQuantity { gamma, kappa, bergman_metric, kernel_times_p2, comparison_sum };
std::string to_string(BoundQuantity quantity);

struct MetricBound {
  BoundQuantity quantity = BoundQuantity::gamma;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> value;
  std::string domain_id;
  ComplexVector z;
  std::optional<ComplexVector> x;

  bool admits(double v, double tolerance) const { return within(lower, v, upper, tolerance); }
};

/// gamma and kappa both lie in [1/(4d), 1/d], d = d_D(z, X). The lower end is
/// the Caratheodory estimate, the upper end the Kobayashi one.
struct Prop1Bounds {
  double d = 0.0;
  MetricBound gamma;
  MetricBound kappa;
};

/// Throws PreconditionError when d_D(z, X) is infinite.
Prop1Bounds prop1_bounds(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                         const GeometryOptions& options = {});

/// The kernel interval for K p^2, with p from the minimal basis. When a kernel
/// value is supplied, `bound.value` holds K p^2.
struct Thm9Bounds {
  MetricBound bound;
  MinimalBasisFrame frame;
};

Thm9Bounds thm9_bounds(const Domain& domain, const ComplexVector& z, std::optional<double> kernel = {},
                       const GeometryOptions& options = {});
Thm9Bounds thm9_bounds(const Domain& domain, const ComplexVector& z, std::optional<double> kernel,
                       const MinimalBasisFrame& frame);

/// Bergman metric bounds: B >= 1/(4d) and B <= min_k c'_n d_k / (|X_k| d^2),
/// which never exceeds the coarse bound c_n / d.
struct Thm8Bounds {
  MetricBound bound;  // [1/(4d), refined_upper]
  double d = 0.0;
  double coarse_upper = 0.0;
  double refined_upper = 0.0;
  Eigen::Index refined_index = 0;  // k attaining the minimum
};

Thm8Bounds thm8_bound(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                      const GeometryOptions& options = {});
Thm8Bounds thm8_bound(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                      const MinimalBasisFrame& frame, const GeometryOptions& options = {});

/// Comparison sum S = sum_j |X_j(z)| / d_j(z) with its interval [1/d, 4 c_n / d].
MetricBound comparison_bounds(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                              const MinimalBasisFrame& frame, const GeometryOptions& options = {});

/// Checks F / S in [(16 c_n)^-1, c_n] for a metric value F at (z, X).
CheckRecord prop10_check(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                         double f_value, MetricKind kind, double tolerance = 1e-9,
                         const GeometryOptions& options = {});
CheckRecord prop10_check(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                         double f_value, MetricKind kind, double tolerance,
                         const MinimalBasisFrame& frame);

struct ExponentSample {
  double delta = 0.0;
  double boundary_distance = 0.0;     // d_D(z_delta)
  double directional_distance = 0.0;  // d_D(z_delta, e_2)
  double lower = 0.0;                 // 1 / (4 d_D(z_delta, e_2))
  double upper = 0.0;                 // 1 / d_D(z_delta, e_2)
  bool fitted = false;
};

struct ExponentFit {
  int m = 1;
  double slope = 0.0;
  double intercept = 0.0;
  double expected_slope = 0.0;  // 1 / (2m)
  std::vector<ExponentSample> samples;
};

/// Approaches a = (1, 0) on {|z_1|^2 + |z_2|^(2m) < 1} along z = (1 - delta, 0)
/// and fits log d_D(z, e_2) against log d_D(z) by least squares over
/// delta <= 1e-2. Every delta must lie in (0, 0.1].
ExponentFit exponent_experiment(int m, const std::vector<double>& deltas, const GeometryOptions& options = {});

inline constexpr double kExponentFitWindow = 1e-2;

}  // namespace cconvex
