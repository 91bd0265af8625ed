#include "cconvex/bounds.hpp"

#include <cmath>
#include <numbers>

#include "cconvex/domain_io.hpp"

namespace cconvex {

namespace {

constexpr double kPi = std::numbers::pi;

double log_factorial(int k) { return std::lgamma(k + 1.0); }

MetricBound make_bound(BoundQuantity q, double lower, double upper, const Domain& domain, const ComplexVector& z,
                       std::optional<ComplexVector> x) {
  MetricBound b;
  b.quantity = q;
  b.lower = lower;
  b.upper = upper;
  b.domain_id = domain_hash_hex(domain);
  b.z = z;
  b.x = std::move(x);
  return b;
}

double finite_directional_distance(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                                   const GeometryOptions& options) {
  const double d = directional_distance(domain, z, x, options).value;
  if (!std::isfinite(d)) throw PreconditionError("bounds: the complex line through z in direction X lies in D");
  return d;
}

}  // namespace

PaperConstants paper_constants(int n) {
  if (n < 1 || n > 8) throw PreconditionError("paper_constants: n must lie in 1..8");
  PaperConstants c;
  c.n = n;
  const double log_fact = log_factorial(2 * n + 2);
  c.C_n = std::exp(0.5 * (log_fact - std::log(6.0) - n * std::log(2.0 * kPi)));
  c.c_prime_n = std::exp(n * std::log(2.0) + 0.5 * ((n - 1) * std::log(2.0) + log_fact - std::log(3.0)));
  c.c_n = n * c.c_prime_n;
  c.kernel_lower = std::exp(-n * std::log(16.0 * kPi));
  c.kernel_upper = std::exp(log_factorial(2 * n) - n * std::log(2.0 * kPi));
  return c;
}

double c_prime_from_C(const PaperConstants& constants) {
  return std::pow(4.0 * std::sqrt(kPi), constants.n) * constants.C_n;
}

std::string to_string(BoundQuantity quantity) {
  switch (quantity) {
    case BoundQuantity::gamma: return "gamma";
    case BoundQuantity::kappa: return "kappa";
    case BoundQuantity::bergman_metric: return "bergman_metric";
    case BoundQuantity::kernel_times_p2: return "kernel_times_p2";
    case BoundQuantity::comparison_sum: return "comparison_sum";
  }
  return "unknown";
}

Prop1Bounds prop1_bounds(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                         const GeometryOptions& options) {
  Prop1Bounds out;
  out.d = finite_directional_distance(domain, z, x, options);
  out.gamma = make_bound(BoundQuantity::gamma, 0.25 / out.d, 1.0 / out.d, domain, z, x);
  out.kappa = make_bound(BoundQuantity::kappa, 0.25 / out.d, 1.0 / out.d, domain, z, x);
  return out;
}

Thm9Bounds thm9_bounds(const Domain& domain, const ComplexVector& z, std::optional<double> kernel,
                       const MinimalBasisFrame& frame) {
  if (!symmetry(domain).is_bounded) throw PreconditionError("thm9_bounds: domain must be bounded");
  const auto c = paper_constants(static_cast<int>(domain.dim()));
  Thm9Bounds out;
  out.frame = frame;
  out.bound = make_bound(BoundQuantity::kernel_times_p2, c.kernel_lower, c.kernel_upper, domain, z, std::nullopt);
  if (kernel) out.bound.value = *kernel * frame.p * frame.p;
  return out;
}

Thm9Bounds thm9_bounds(const Domain& domain, const ComplexVector& z, std::optional<double> kernel,
                       const GeometryOptions& options) {
  return thm9_bounds(domain, z, kernel, minimal_basis(domain, z, options));
}

Thm8Bounds thm8_bound(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                      const MinimalBasisFrame& frame, const GeometryOptions& options) {
  const auto c = paper_constants(static_cast<int>(domain.dim()));
  Thm8Bounds out;
  out.d = finite_directional_distance(domain, z, x, options);
  out.coarse_upper = c.c_n / out.d;
  const ComplexVector comps = decompose(x, frame);
  out.refined_upper = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < comps.size(); ++k) {
    const double xk = std::abs(comps(k));
    if (xk == 0.0) continue;
    const double bound = c.c_prime_n * frame.distances(k) / (xk * out.d * out.d);
    if (bound < out.refined_upper) {
      out.refined_upper = bound;
      out.refined_index = k;
    }
  }
  if (!std::isfinite(out.refined_upper)) throw PreconditionError("thm8_bound: direction has no component");
  out.bound = make_bound(BoundQuantity::bergman_metric, 0.25 / out.d, out.refined_upper, domain, z, x);
  return out;
}

Thm8Bounds thm8_bound(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                      const GeometryOptions& options) {
  return thm8_bound(domain, z, x, minimal_basis(domain, z, options), options);
}

MetricBound comparison_bounds(const Domain& domain, const ComplexVector& z, const ComplexVector& x,
                              const MinimalBasisFrame& frame, const GeometryOptions& options) {
  const auto c = paper_constants(static_cast<int>(domain.dim()));
  const double d = finite_directional_distance(domain, z, x, options);
  MetricBound b = make_bound(BoundQuantity::comparison_sum, 1.0 / d, 4.0 * c.c_n / d, domain, z, x);
  b.value = comparison_sum(x, frame);
  return b;
}

CheckRecord prop10_check(const Domain& domain, const ComplexVector& z, const ComplexVector& x, double f_value,
                         MetricKind kind, double tolerance, const MinimalBasisFrame& frame) {
  const auto c = paper_constants(static_cast<int>(domain.dim()));
  CheckRecord r;
  r.check = "prop10";
  r.domain_hash = domain_hash_hex(domain);
  r.z = z;
  r.x = x;
  r.lower = 1.0 / (16.0 * c.c_n);
  r.upper = c.c_n;
  r.value = f_value / comparison_sum(x, frame);
  r.tolerance = tolerance;
  r.note = to_string(kind);
  settle(r);
  return r;
}

CheckRecord prop10_check(const Domain& domain, const ComplexVector& z, const ComplexVector& x, double f_value,
                         MetricKind kind, double tolerance, const GeometryOptions& options) {
  return prop10_check(domain, z, x, f_value, kind, tolerance, minimal_basis(domain, z, options));
}

ExponentFit exponent_experiment(int m, const std::vector<double>& deltas, const GeometryOptions& options) {
  if (m < 1) throw PreconditionError("exponent_experiment: m must be positive");
  if (deltas.empty()) throw PreconditionError("exponent_experiment: no deltas");
  const Domain domain = Domain::complex_ellipsoid({1, m});
  ComplexVector e2 = ComplexVector::Zero(2);
  e2(1) = 1.0;

  ExponentFit fit;
  fit.m = m;
  fit.expected_slope = 1.0 / (2.0 * m);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (double delta : deltas) {
    if (!(delta > 0.0 && delta <= 0.1)) throw PreconditionError("exponent_experiment: delta outside (0, 0.1]");
    ComplexVector z = ComplexVector::Zero(2);
    z(0) = 1.0 - delta;
    ExponentSample s;
    s.delta = delta;
    s.boundary_distance = boundary_distance(domain, z, options).distance;
    s.directional_distance = directional_distance(domain, z, e2, options).value;
    s.lower = 0.25 / s.directional_distance;
    s.upper = 1.0 / s.directional_distance;
    s.fitted = delta <= kExponentFitWindow;
    if (s.fitted) {
      const double lx = std::log(s.boundary_distance), ly = std::log(s.directional_distance);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++count;
    }
    fit.samples.push_back(s);
  }
  if (count < 2) throw PreconditionError("exponent_experiment: need two deltas <= 1e-2 for the fit");
  const double denom = count * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw PreconditionError("exponent_experiment: deltas must be distinct");
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / count;
  return fit;
}

}  // namespace cconvex
