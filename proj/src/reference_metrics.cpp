#include "cconvex/reference_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

namespace cconvex {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCenterTolerance = 1e-12;

void require_point(const Domain& domain, const ComplexVector& z, const char* where) {
  if (z.size() != domain.dim()) throw DimensionError(std::string(where) + ": dimension mismatch");
  if (!contains(domain, z)) throw PreconditionError(std::string(where) + ": point is not in the domain");
}

bool all_unit_exponents(const ComplexEllipsoid& e) {
  return std::all_of(e.exponents.begin(), e.exponents.end(), [](int m) { return m == 1; });
}

// Domains whose metric is that of a disc of the given radius centred at 0.
std::optional<double> as_disc_radius(const Domain& domain) {
  if (domain.dim() != 1) return std::nullopt;
  if (const auto* d = domain.get_if<WeightedDiamond>()) return d->radii(0);
  if (domain.get_if<ComplexEllipsoid>()) return 1.0;
  return std::nullopt;
}

bool is_unit_ball_ellipsoid(const Domain& domain) {
  const auto* e = domain.get_if<ComplexEllipsoid>();
  return e != nullptr && all_unit_exponents(*e);
}

double disc_kappa(double r, Complex w, Complex x) { return r * std::abs(x) / (r * r - std::norm(w)); }

double ball_kappa(const ComplexVector& w, const ComplexVector& x) {
  const double s = 1.0 - w.squaredNorm();
  return std::sqrt(s * x.squaredNorm() + std::norm(hermitian_inner(x, w))) / s;
}

double kappa(const Domain& domain, const ComplexVector& z, const ComplexVector& x, Exactness& exactness) {
  if (auto r = as_disc_radius(domain)) return disc_kappa(*r, z(0), x(0));
  if (is_unit_ball_ellipsoid(domain)) return ball_kappa(z, x);
  if (const auto* b = domain.get_if<Ball>()) {
    return ball_kappa((z - b->center) / b->radius, x / b->radius);
  }
  if (const auto* p = domain.get_if<Polydisc>()) {
    double k = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) k = std::max(k, disc_kappa(p->radii(j), z(j) - p->center(j), x(j)));
    return k;
  }
  if (domain.get_if<KoebeSlitPlane>()) {
    exactness = Exactness::transported;
    const Complex zeta = koebe_map_inverse(z(0));
    return std::abs(x(0)) / (std::abs(koebe_map_derivative(zeta)) * (1.0 - std::norm(zeta)));
  }
  if (const auto* p = domain.get_if<Product>()) {
    double k = 0.0;
    Eigen::Index offset = 0;
    for (const auto& f : p->factors) {
      k = std::max(k, kappa(f, z.segment(offset, f.dim()), x.segment(offset, f.dim()), exactness));
      offset += f.dim();
    }
    return k;
  }
  if (const auto* l = domain.get_if<LinearImage>()) {
    return kappa(l->base, l->pull_point(z), l->pull_vector(x), exactness);
  }
  throw UnsupportedError("no closed-form Caratheodory/Kobayashi metric for " + to_string(domain.kind()));
}

double log_factorial(int k) { return std::lgamma(k + 1.0); }

double kernel(const Domain& domain, const ComplexVector& z, Exactness& exactness);

// Bergman metric at the symmetry centre of a complete Reinhardt model.
double reinhardt_center_metric(const Domain& domain, const ComplexVector& x) {
  const auto n = static_cast<std::size_t>(domain.dim());
  const double m0 = reinhardt_moment(domain, std::vector<int>(n, 0));
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<int> alpha(n, 0);
    alpha[j] = 1;
    sum += std::norm(x(static_cast<Eigen::Index>(j))) / reinhardt_moment(domain, alpha);
  }
  return std::sqrt(m0 * sum);
}

bool at_center(const Domain& domain, const ComplexVector& z) {
  return (z - reinhardt_center(domain)).norm() <= kCenterTolerance;
}

double kernel(const Domain& domain, const ComplexVector& z, Exactness& exactness) {
  if (auto r = as_disc_radius(domain)) {
    const double s = *r * *r - std::norm(z(0));
    return *r * *r / (kPi * s * s);
  }
  if (is_unit_ball_ellipsoid(domain)) return kernel(Domain::unit_ball(domain.dim()), z, exactness);
  if (const auto* b = domain.get_if<Ball>()) {
    const int n = static_cast<int>(z.size());
    const double s = 1.0 - ((z - b->center) / b->radius).squaredNorm();
    return std::exp(log_factorial(n) - n * std::log(kPi) - 2.0 * n * std::log(b->radius) -
                    (n + 1) * std::log(s));
  }
  if (const auto* p = domain.get_if<Polydisc>()) {
    double k = 1.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double r2 = p->radii(j) * p->radii(j);
      const double s = r2 - std::norm(z(j) - p->center(j));
      k *= r2 / (kPi * s * s);
    }
    return k;
  }
  if ((domain.get_if<WeightedDiamond>() || domain.get_if<ComplexEllipsoid>()) && at_center(domain, z)) {
    return 1.0 / reinhardt_moment(domain, std::vector<int>(static_cast<std::size_t>(z.size()), 0));
  }
  if (const auto* p = domain.get_if<Product>()) {
    double k = 1.0;
    Eigen::Index offset = 0;
    for (const auto& f : p->factors) {
      k *= kernel(f, z.segment(offset, f.dim()), exactness);
      offset += f.dim();
    }
    return k;
  }
  if (const auto* l = domain.get_if<LinearImage>()) {
    return kernel(l->base, l->pull_point(z), exactness) / (l->abs_det * l->abs_det);
  }
  throw UnsupportedError("no closed-form Bergman kernel for " + to_string(domain.kind()) + " at this point");
}

double metric(const Domain& domain, const ComplexVector& z, const ComplexVector& x, Exactness& exactness) {
  if (as_disc_radius(domain)) return std::sqrt(2.0) * kappa(domain, z, x, exactness);
  if (is_unit_ball_ellipsoid(domain) || domain.get_if<Ball>()) {
    return std::sqrt(static_cast<double>(z.size()) + 1.0) * kappa(domain, z, x, exactness);
  }
  if (const auto* p = domain.get_if<Polydisc>()) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double b = std::sqrt(2.0) * disc_kappa(p->radii(j), z(j) - p->center(j), x(j));
      sum += b * b;
    }
    return std::sqrt(sum);
  }
  if ((domain.get_if<WeightedDiamond>() || domain.get_if<ComplexEllipsoid>()) && at_center(domain, z)) {
    return reinhardt_center_metric(domain, x);
  }
  if (const auto* p = domain.get_if<Product>()) {
    double sum = 0.0;
    Eigen::Index offset = 0;
    for (const auto& f : p->factors) {
      const double b = metric(f, z.segment(offset, f.dim()), x.segment(offset, f.dim()), exactness);
      sum += b * b;
      offset += f.dim();
    }
    return std::sqrt(sum);
  }
  if (const auto* l = domain.get_if<LinearImage>()) {
    return metric(l->base, l->pull_point(z), l->pull_vector(x), exactness);
  }
  throw UnsupportedError("no closed-form Bergman metric for " + to_string(domain.kind()) + " at this point");
}

}  // namespace

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::caratheodory: return "caratheodory";
    case MetricKind::kobayashi: return "kobayashi";
    case MetricKind::bergman_kernel: return "bergman_kernel";
    case MetricKind::bergman_M: return "bergman_M";
    case MetricKind::bergman_metric: return "bergman_metric";
  }
  return "unknown";
}

std::string to_string(Exactness exactness) {
  return exactness == Exactness::closed_form ? "closed_form" : "transported";
}

InvariantMetricPair gamma_kappa_oracle(const Domain& domain, const ComplexVector& z, const ComplexVector& x) {
  require_point(domain, z, "gamma_kappa_oracle");
  if (x.size() != domain.dim()) throw DimensionError("gamma_kappa_oracle: direction dimension mismatch");
  Exactness exactness = Exactness::closed_form;
  const double k = kappa(domain, z, x, exactness);
  // Every supported model is convex or a simply connected plane domain, where
  // the two metrics agree.
  return {{MetricKind::caratheodory, k, exactness}, {MetricKind::kobayashi, k, exactness}};
}

bool has_gamma_kappa_oracle(const Domain& domain) {
  if (as_disc_radius(domain) || is_unit_ball_ellipsoid(domain)) return true;
  if (domain.get_if<Ball>() || domain.get_if<Polydisc>() || domain.get_if<KoebeSlitPlane>()) return true;
  if (const auto* p = domain.get_if<Product>()) {
    return std::all_of(p->factors.begin(), p->factors.end(), [](const Domain& f) { return has_gamma_kappa_oracle(f); });
  }
  if (const auto* l = domain.get_if<LinearImage>()) return has_gamma_kappa_oracle(l->base);
  return false;
}

MetricValue bergman_oracle(const Domain& domain, const ComplexVector& z) {
  require_point(domain, z, "bergman_oracle");
  Exactness exactness = Exactness::closed_form;
  const double k = kernel(domain, z, exactness);
  return {MetricKind::bergman_kernel, k, exactness};
}

bool has_bergman_oracle(const Domain& domain, const ComplexVector& z) {
  if (as_disc_radius(domain) || is_unit_ball_ellipsoid(domain)) return true;
  if (domain.get_if<Ball>() || domain.get_if<Polydisc>()) return true;
  if (domain.get_if<WeightedDiamond>() || domain.get_if<ComplexEllipsoid>()) return at_center(domain, z);
  if (const auto* p = domain.get_if<Product>()) {
    Eigen::Index offset = 0;
    for (const auto& f : p->factors) {
      if (!has_bergman_oracle(f, z.segment(offset, f.dim()))) return false;
      offset += f.dim();
    }
    return true;
  }
  if (const auto* l = domain.get_if<LinearImage>()) return has_bergman_oracle(l->base, l->pull_point(z));
  return false;
}

MetricValue bergman_metric_oracle(const Domain& domain, const ComplexVector& z, const ComplexVector& x) {
  require_point(domain, z, "bergman_metric_oracle");
  if (x.size() != domain.dim()) throw DimensionError("bergman_metric_oracle: direction dimension mismatch");
  Exactness exactness = Exactness::closed_form;
  const double b = metric(domain, z, x, exactness);
  return {MetricKind::bergman_metric, b, exactness};
}

bool has_reinhardt_moments(const Domain& domain) {
  if (domain.get_if<Ball>() || domain.get_if<Polydisc>() || domain.get_if<WeightedDiamond>() ||
      domain.get_if<ComplexEllipsoid>()) {
    return true;
  }
  if (const auto* p = domain.get_if<Product>()) {
    return std::all_of(p->factors.begin(), p->factors.end(), [](const Domain& f) { return has_reinhardt_moments(f); });
  }
  return false;
}

ComplexVector reinhardt_center(const Domain& domain) {
  if (const auto* b = domain.get_if<Ball>()) return b->center;
  if (const auto* p = domain.get_if<Polydisc>()) return p->center;
  if (const auto* p = domain.get_if<Product>()) {
    ComplexVector c(domain.dim());
    Eigen::Index offset = 0;
    for (const auto& f : p->factors) {
      c.segment(offset, f.dim()) = reinhardt_center(f);
      offset += f.dim();
    }
    return c;
  }
  if (domain.get_if<WeightedDiamond>() || domain.get_if<ComplexEllipsoid>()) return ComplexVector::Zero(domain.dim());
  throw UnsupportedError("no symmetry centre for " + to_string(domain.kind()));
}

double reinhardt_moment(const Domain& domain, const std::vector<int>& alpha) {
  if (alpha.size() != static_cast<std::size_t>(domain.dim())) throw DimensionError("reinhardt_moment: multi-index length");
  const int n = static_cast<int>(alpha.size());
  const int total = std::accumulate(alpha.begin(), alpha.end(), 0);
  if (const auto* b = domain.get_if<Ball>()) {
    double log_m = n * std::log(kPi) + (2.0 * total + 2.0 * n) * std::log(b->radius) - log_factorial(total + n);
    for (int a : alpha) log_m += log_factorial(a);
    return std::exp(log_m);
  }
  if (const auto* p = domain.get_if<Polydisc>()) {
    double m = 1.0;
    for (int j = 0; j < n; ++j) m *= kPi * std::pow(p->radii(j), 2 * alpha[static_cast<std::size_t>(j)] + 2) / (alpha[static_cast<std::size_t>(j)] + 1);
    return m;
  }
  if (const auto* d = domain.get_if<WeightedDiamond>()) {
    // Polar coordinates reduce to a Dirichlet integral over the simplex.
    double log_m = n * std::log(2.0 * kPi) - std::lgamma(2.0 * total + 2.0 * n + 1.0);
    for (int j = 0; j < n; ++j) {
      const int a = alpha[static_cast<std::size_t>(j)];
      log_m += (2.0 * a + 2.0) * std::log(d->radii(j)) + std::lgamma(2.0 * a + 2.0);
    }
    return std::exp(log_m);
  }
  if (const auto* e = domain.get_if<ComplexEllipsoid>()) {
    double log_m = n * std::log(2.0 * kPi);
    double beta_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double m = e->exponents[static_cast<std::size_t>(j)];
      const double beta = (alpha[static_cast<std::size_t>(j)] + 1.0) / m;
      log_m += std::lgamma(beta) - std::log(2.0 * m);
      beta_sum += beta;
    }
    return std::exp(log_m - std::lgamma(beta_sum + 1.0));
  }
  if (const auto* p = domain.get_if<Product>()) {
    double m = 1.0;
    std::size_t offset = 0;
    for (const auto& f : p->factors) {
      const auto fd = static_cast<std::size_t>(f.dim());
      m *= reinhardt_moment(f, std::vector<int>(alpha.begin() + static_cast<std::ptrdiff_t>(offset),
                                                alpha.begin() + static_cast<std::ptrdiff_t>(offset + fd)));
      offset += fd;
    }
    return m;
  }
  throw UnsupportedError("no closed-form moments for " + to_string(domain.kind()));
}

Complex koebe_map(Complex zeta) {
  const Complex s = 1.0 + zeta;
  return zeta / (s * s);
}

Complex koebe_map_derivative(Complex zeta) {
  const Complex s = 1.0 + zeta;
  return (1.0 - zeta) / (s * s * s);
}

Complex koebe_map_inverse(Complex w) {
  if (!contains(Domain::koebe_slit_plane(), ComplexVector::Constant(1, w))) {
    throw PreconditionError("koebe_map_inverse: point lies on the slit");
  }
  // Root of w zeta^2 + (2w - 1) zeta + w = 0 inside the disc; the principal
  // square root has its cut exactly on the slit.
  Complex zeta = 2.0 * w / (1.0 - 2.0 * w + std::sqrt(1.0 - 4.0 * w));
  for (int it = 0; it < 3; ++it) {
    const Complex step = (koebe_map(zeta) - w) / koebe_map_derivative(zeta);
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    zeta -= step;
  }
  return zeta;
}

}  // namespace cconvex
