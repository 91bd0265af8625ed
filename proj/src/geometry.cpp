#include "cconvex/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace cconvex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_inside(const Domain& domain, const ComplexVector& z, const char* where) {
  if (z.size() != domain.dim()) throw DimensionError(std::string(where) + ": dimension mismatch");
  if (!contains(domain, z)) throw PreconditionError(std::string(where) + ": point is not in the domain");
}

// Positive root of |w + t v| = r for |w| < r.
double circle_exit(Complex w, Complex v, double r) {
  const double a = std::norm(v);
  if (a == 0.0) return kInf;
  const double b = (w * std::conj(v)).real();
  const double c = std::norm(w) - r * r;
  const double disc = std::sqrt(std::max(0.0, b * b - a * c));
  return b > 0.0 ? -c / (b + disc) : (disc - b) / a;
}

// Root of h(t) = 1 on (0, hi] for convex h with h(0) < 1 <= h(hi). Newton
// from the right is monotone for convex h; bisection guards the bracket.
template <class F>
double convex_exit(F&& h, double hi) {
  double lo = 0.0;
  double t = hi;
  for (int it = 0; it < 200; ++it) {
    const auto [value, slope] = h(t);
    if (value >= 1.0) hi = t; else lo = t;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    double next = (slope > 0.0) ? t - (value - 1.0) / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 2.0 * std::numeric_limits<double>::epsilon() * t) {
      t = next;
      break;
    }
    t = next;
  }
  return std::min(t, hi);
}

double diamond_exit(const WeightedDiamond& d, const ComplexVector& w, const ComplexVector& v) {
  double gw = 0.0, gv = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    gw += std::abs(w(j)) / d.radii(j);
    gv += std::abs(v(j)) / d.radii(j);
  }
  if (gv == 0.0) return kInf;
  auto h = [&](double t) {
    double value = 0.0, slope = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      const Complex u = w(j) + t * v(j);
      const double mod = std::abs(u);
      value += mod / d.radii(j);
      slope += (mod > 0.0 ? (std::conj(u) * v(j)).real() / mod : std::abs(v(j))) / d.radii(j);
    }
    return std::pair{value, slope};
  };
  return convex_exit(h, (1.0 + gw) / gv);
}

double ellipsoid_exit(const ComplexEllipsoid& e, const ComplexVector& w, const ComplexVector& v) {
  double hi = kInf;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (v(j) != 0.0) hi = std::min(hi, (1.0 + std::abs(w(j))) / std::abs(v(j)));
  }
  if (hi == kInf) return kInf;
  auto h = [&](double t) {
    double value = 0.0, slope = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      const Complex u = w(j) + t * v(j);
      const int m = e.exponents[static_cast<std::size_t>(j)];
      const double mod2 = std::norm(u);
      value += std::pow(mod2, m);
      slope += 2.0 * m * std::pow(mod2, m - 1) * (std::conj(u) * v(j)).real();
    }
    return std::pair{value, slope};
  };
  return convex_exit(h, hi);
}

double koebe_exit(Complex z, Complex v) {
  const double x = z.real(), y = z.imag(), a = v.real(), b = v.imag();
  if (b != 0.0) {
    const double t = -y / b;
    if (t > 0.0 && x + t * a >= 0.25) return t;
    return kInf;
  }
  if (y != 0.0 || a <= 0.0) return kInf;
  return (0.25 - x) / a;
}

// Nearest point of the slit [1/4, inf) to z.
double koebe_slit_point(Complex z) { return std::max(0.25, z.real()); }

}  // namespace

double ray_exit(const Domain& domain, const ComplexVector& z, const ComplexVector& v) {
  return std::visit(
      overloaded{
          [&](const Ball& b) {
            const ComplexVector w = z - b.center;
            const double a = v.squaredNorm();
            if (a == 0.0) return kInf;
            const double lin = hermitian_inner(w, v).real();
            const double c = w.squaredNorm() - b.radius * b.radius;
            const double disc = std::sqrt(std::max(0.0, lin * lin - a * c));
            return lin > 0.0 ? -c / (lin + disc) : (disc - lin) / a;
          },
          [&](const Polydisc& p) {
            double t = kInf;
            for (Eigen::Index j = 0; j < z.size(); ++j) {
              t = std::min(t, circle_exit(z(j) - p.center(j), v(j), p.radii(j)));
            }
            return t;
          },
          [&](const WeightedDiamond& d) { return diamond_exit(d, z, v); },
          [&](const ComplexEllipsoid& e) { return ellipsoid_exit(e, z, v); },
          [&](const KoebeSlitPlane&) { return koebe_exit(z(0), v(0)); },
          [&](const Product& p) {
            double t = kInf;
            Eigen::Index offset = 0;
            for (const auto& f : p.factors) {
              const auto seg_v = v.segment(offset, f.dim());
              if (!seg_v.isZero(0.0)) t = std::min(t, ray_exit(f, z.segment(offset, f.dim()), seg_v));
              offset += f.dim();
            }
            return t;
          },
          [&](const LinearImage& l) { return ray_exit(l.base, l.pull_point(z), l.pull_vector(v)); },
      },
      domain.variant());
}

namespace {

// Golden-section search for a minimum of f on [a, b].
template <class F>
std::pair<double, double> golden_minimize(F&& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d; d = c; fd = fc;
      c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + r * (b - a); fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

// min over theta of ray_exit(z, e^{i theta} x): the complex line through z in
// direction x meets the boundary first at that phase.
DirectionalDistance phase_minimize(const Domain& domain, const ComplexVector& z,
                                   const ComplexVector& x, int grid) {
  grid = std::max(grid, 8);
  std::vector<double> values(static_cast<std::size_t>(grid));
  auto f = [&](double theta) {
    return ray_exit(domain, z, ComplexVector(std::polar(1.0, theta) * x));
  };
  for (int i = 0; i < grid; ++i) values[static_cast<std::size_t>(i)] = f(kTwoPi * i / grid);

  std::vector<int> minima;
  for (int i = 0; i < grid; ++i) {
    const double prev = values[static_cast<std::size_t>((i + grid - 1) % grid)];
    const double next = values[static_cast<std::size_t>((i + 1) % grid)];
    const double here = values[static_cast<std::size_t>(i)];
    if (here <= prev && here <= next) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });
  if (minima.size() > 3) minima.resize(3);

  DirectionalDistance best{kInf, {0.0, 0.0}};
  for (int i : minima) {
    const double step = kTwoPi / grid;
    auto [theta, value] = golden_minimize(f, step * (i - 1), step * (i + 1), 1e-12);
    if (values[static_cast<std::size_t>(i)] < value) {
      theta = step * i;
      value = values[static_cast<std::size_t>(i)];
    }
    if (value < best.value) best = {value, std::polar(value, theta)};
  }
  if (!std::isfinite(best.value)) best.contact = {0.0, 0.0};
  return best;
}

DirectionalDistance directional_distance_impl(const Domain& domain, const ComplexVector& z,
                                              const ComplexVector& x, const GeometryOptions& options) {
  return std::visit(
      overloaded{
          [&](const Ball& b) {
            const ComplexVector w = z - b.center;
            const Complex g = hermitian_inner(x, w);
            const double gm = std::abs(g);
            const double xx = x.squaredNorm();
            const double slack = b.radius * b.radius - w.squaredNorm();
            const double r = slack / (gm + std::sqrt(gm * gm + xx * slack));
            const Complex phase = gm > 0.0 ? std::conj(g) / gm : Complex(1.0, 0.0);
            return DirectionalDistance{r, r * phase};
          },
          [&](const Polydisc& p) {
            DirectionalDistance best{kInf, {0.0, 0.0}};
            for (Eigen::Index j = 0; j < z.size(); ++j) {
              const double xm = std::abs(x(j));
              if (xm == 0.0) continue;
              const Complex w = z(j) - p.center(j);
              const double r = (p.radii(j) - std::abs(w)) / xm;
              if (r < best.value) {
                const Complex wphase = std::abs(w) > 0.0 ? w / std::abs(w) : Complex(1.0, 0.0);
                best = {r, r * wphase * xm / x(j)};
              }
            }
            return best;
          },
          [&](const KoebeSlitPlane&) {
            const Complex slit(koebe_slit_point(z(0)), 0.0);
            return DirectionalDistance{std::abs(slit - z(0)) / std::abs(x(0)), (slit - z(0)) / x(0)};
          },
          [&](const Product& p) {
            DirectionalDistance best{kInf, {0.0, 0.0}};
            Eigen::Index offset = 0;
            for (const auto& f : p.factors) {
              const ComplexVector seg_x = x.segment(offset, f.dim());
              if (!seg_x.isZero(0.0)) {
                const auto d = directional_distance_impl(f, z.segment(offset, f.dim()), seg_x, options);
                if (d.value < best.value) best = d;
              }
              offset += f.dim();
            }
            return best;
          },
          [&](const LinearImage& l) {
            return directional_distance_impl(l.base, l.pull_point(z), l.pull_vector(x), options);
          },
          [&](const auto&) { return phase_minimize(domain, z, x, options.phase_grid); },
      },
      domain.variant());
}

}  // namespace

DirectionalDistance directional_distance(const Domain& domain, const ComplexVector& z,
                                         const ComplexVector& x, const GeometryOptions& options) {
  require_inside(domain, z, "directional_distance");
  if (x.size() != domain.dim()) throw DimensionError("directional_distance: direction dimension mismatch");
  if (x.isZero(0.0)) throw PreconditionError("directional_distance: zero direction");
  return directional_distance_impl(domain, z, x, options);
}

// ---------------------------------------------------------------------------
// Nearest boundary point inside an affine subspace z + span(Q).
// ---------------------------------------------------------------------------

namespace {

ComplexVector to_complex(const RealVector& x) {
  ComplexVector c(x.size() / 2);
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = Complex(x(2 * j), x(2 * j + 1));
  return c;
}

RealVector to_real(const ComplexVector& c) {
  RealVector x(2 * c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    x(2 * j) = c(j).real();
    x(2 * j + 1) = c(j).imag();
  }
  return x;
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0, f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

// Halton points pushed through Box-Muller: well spread, reproducible starts.
std::vector<RealVector> quasi_random_sphere(Eigen::Index dim, int count) {
  static constexpr std::array<std::uint64_t, 16> primes{2, 3, 5, 7, 11, 13, 17, 19,
                                                        23, 29, 31, 37, 41, 43, 47, 53};
  std::vector<RealVector> out;
  for (int i = 1; out.size() < static_cast<std::size_t>(count); ++i) {
    RealVector x(dim);
    for (Eigen::Index k = 0; k < dim; k += 2) {
      const double u1 = radical_inverse(static_cast<std::uint64_t>(i), primes[static_cast<std::size_t>(k % 16)]);
      const double u2 = radical_inverse(static_cast<std::uint64_t>(i), primes[static_cast<std::size_t>((k + 1) % 16)]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      x(k) = radius * std::cos(kTwoPi * u2);
      if (k + 1 < dim) x(k + 1) = radius * std::sin(kTwoPi * u2);
    }
    if (x.norm() > 0.0) out.push_back(x / x.norm());
  }
  return out;
}

// Outward normal (any positive length) of the boundary where the ray z + s v
// leaves the domain at s = t. Empty at corners and edges, where there is none.
std::optional<ComplexVector> exit_normal(const Domain& domain, const ComplexVector& z, const ComplexVector& v,
                                         double t) {
  const ComplexVector a = z + t * v;
  return std::visit(
      overloaded{
          [&](const Ball& b) -> std::optional<ComplexVector> { return ComplexVector(a - b.center); },
          [&](const Polydisc& p) -> std::optional<ComplexVector> {
            Eigen::Index hit = -1;
            double first = kInf, second = kInf;
            for (Eigen::Index j = 0; j < z.size(); ++j) {
              const double s = circle_exit(z(j) - p.center(j), v(j), p.radii(j));
              if (s < first) {
                second = first;
                first = s;
                hit = j;
              } else {
                second = std::min(second, s);
              }
            }
            if (hit < 0 || second <= first * (1 + 1e-9)) return std::nullopt;
            ComplexVector nu = ComplexVector::Zero(z.size());
            nu(hit) = a(hit) - p.center(hit);
            return nu;
          },
          [&](const WeightedDiamond& d) -> std::optional<ComplexVector> {
            ComplexVector nu(z.size());
            for (Eigen::Index j = 0; j < z.size(); ++j) {
              const double mod = std::abs(a(j));
              if (mod <= 1e-9 * d.radii(j)) return std::nullopt;
              nu(j) = a(j) / (mod * d.radii(j));
            }
            return nu;
          },
          [&](const ComplexEllipsoid& e) -> std::optional<ComplexVector> {
            ComplexVector nu(z.size());
            for (Eigen::Index j = 0; j < z.size(); ++j) {
              const int m = e.exponents[static_cast<std::size_t>(j)];
              nu(j) = static_cast<double>(m) * std::pow(std::norm(a(j)), m - 1) * a(j);
            }
            return nu;
          },
          [&](const KoebeSlitPlane&) -> std::optional<ComplexVector> { return std::nullopt; },
          [&](const Product& p) -> std::optional<ComplexVector> {
            std::size_t hit = p.factors.size();
            double first = kInf, second = kInf;
            Eigen::Index offset = 0, hit_offset = 0;
            for (std::size_t i = 0; i < p.factors.size(); ++i) {
              const auto& f = p.factors[i];
              const auto seg_v = v.segment(offset, f.dim());
              const double s = seg_v.isZero(0.0) ? kInf : ray_exit(f, z.segment(offset, f.dim()), seg_v);
              if (s < first) {
                second = first;
                first = s;
                hit = i;
                hit_offset = offset;
              } else {
                second = std::min(second, s);
              }
              offset += f.dim();
            }
            if (hit == p.factors.size() || second <= first * (1 + 1e-9)) return std::nullopt;
            const auto& f = p.factors[hit];
            const auto inner = exit_normal(f, z.segment(hit_offset, f.dim()), v.segment(hit_offset, f.dim()), t);
            if (!inner) return std::nullopt;
            ComplexVector nu = ComplexVector::Zero(z.size());
            nu.segment(hit_offset, f.dim()) = *inner;
            return nu;
          },
          [&](const LinearImage& l) -> std::optional<ComplexVector> {
            const auto inner = exit_normal(l.base, l.pull_point(z), l.pull_vector(v), t);
            if (!inner) return std::nullopt;
            return ComplexVector(l.inverse.adjoint() * *inner);
          },
      },
      domain.variant());
}

struct SphereObjective {
  const Domain& domain;
  const ComplexVector& z;
  const ComplexMatrix& q;
  mutable long evaluations = 0;

  double operator()(const RealVector& x) const {
    ++evaluations;
    const ComplexVector c = to_complex(x) / x.norm();
    return ray_exit(domain, z, ComplexVector(q * c));
  }

  // Gradient of the exit time in R^{2k} at a unit x, from the boundary normal:
  // dt = -t Re<nu, dv> / Re<nu, v>.
  std::optional<RealVector> gradient(const RealVector& x) const {
    const ComplexVector v = q * (to_complex(x) / x.norm());
    const double t = ray_exit(domain, z, v);
    if (!std::isfinite(t)) return std::nullopt;
    const auto nu = exit_normal(domain, z, v, t);
    if (!nu) return std::nullopt;
    const double along = hermitian_inner(*nu, v).real();
    if (!(along > 0.0)) return std::nullopt;
    return RealVector(-t / along * to_real(ComplexVector(q.adjoint() * *nu)));
  }
};

struct LocalResult {
  RealVector x;
  double f = kInf;
};

// Nelder-Mead in tangent coordinates y -> normalize(x0 + T y) around x0.
LocalResult nelder_mead_on_sphere(const SphereObjective& f, const RealVector& x0, double step,
                                  double xtol, int max_evals) {
  const Eigen::Index m = x0.size();
  const Eigen::Index dim = m - 1;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(x0 / x0.norm()));
  const Eigen::MatrixXd full = qr.householderQ();
  const Eigen::MatrixXd tangent = full.rightCols(dim);
  auto point = [&](const RealVector& y) {
    RealVector x = x0 / x0.norm() + tangent * y;
    return RealVector(x / x.norm());
  };

  std::vector<RealVector> simplex(static_cast<std::size_t>(dim + 1), RealVector::Zero(dim));
  std::vector<double> values(simplex.size());
  for (Eigen::Index i = 0; i < dim; ++i) simplex[static_cast<std::size_t>(i + 1)](i) = step;
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = f(point(simplex[i]));
  int evals = static_cast<int>(simplex.size());

  std::vector<std::size_t> order(simplex.size());
  while (evals < max_evals) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

    double diameter = 0.0;
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      diameter = std::max(diameter, (simplex[i] - simplex[best]).norm());
    }
    if (diameter < xtol) break;

    RealVector centroid = RealVector::Zero(dim);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(dim);

    const RealVector reflected = centroid + (centroid - simplex[worst]);
    const double fr = f(point(reflected));
    ++evals;
    if (fr < values[best]) {
      const RealVector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(point(expanded));
      ++evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const RealVector contracted = outside ? RealVector(centroid + 0.5 * (reflected - centroid))
                                          : RealVector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(point(contracted));
    ++evals;
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = f(point(simplex[i]));
      ++evals;
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  return {point(simplex[idx]), *it};
}

LocalResult polish(const SphereObjective& f, LocalResult start) {
  LocalResult best = start;
  for (double step : {3e-2, 1e-3, 3e-5, 1e-6}) {
    const auto r = nelder_mead_on_sphere(f, best.x, step, 1e-10, 1500);
    if (r.f < best.f) best = r;
  }
  return best;
}

// Newton steps in tangent coordinates. The gradient comes from the boundary
// normal where one exists and from finite differences otherwise; the Hessian
// is always a finite difference. Value-only searches pin the minimizer down to
// about sqrt(eps), and later frame directions depend on it linearly. A step is
// undone when the gradient grows or the value rises beyond rounding, so kinks
// are left alone.
LocalResult newton_refine(const SphereObjective& f, LocalResult cur) {
  const Eigen::Index dim = cur.x.size() - 1;
  constexpr double hg = 1e-5, hh = 1e-4;
  LocalResult previous = cur;
  double previous_grad = kInf;
  for (int iter = 0; iter < 8; ++iter) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(cur.x / cur.x.norm()));
    const Eigen::MatrixXd full = qr.householderQ();
    const Eigen::MatrixXd tangent = full.rightCols(dim);
    auto point = [&](const RealVector& y) {
      RealVector x = cur.x / cur.x.norm() + tangent * y;
      return RealVector(x / x.norm());
    };
    auto at = [&](Eigen::Index i, double hi, Eigen::Index j, double hj) {
      RealVector y = RealVector::Zero(dim);
      y(i) += hi;
      y(j) += hj;
      return f(point(y));
    };
    RealVector grad(dim);
    if (const auto g = f.gradient(cur.x)) {
      grad = tangent.transpose() * *g;
    } else {
      for (Eigen::Index i = 0; i < dim; ++i) grad(i) = (at(i, hg, i, 0.0) - at(i, -hg, i, 0.0)) / (2.0 * hg);
    }
    if (grad.norm() >= previous_grad) {
      cur = previous;
      break;
    }
    const double f0 = f(cur.x);
    Eigen::MatrixXd hess(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      hess(i, i) = (at(i, hh, i, 0.0) - 2.0 * f0 + at(i, -hh, i, 0.0)) / (hh * hh);
      for (Eigen::Index j = 0; j < i; ++j) {
        hess(i, j) = hess(j, i) = (at(i, hh, j, hh) - at(i, hh, j, -hh) - at(i, -hh, j, hh) + at(i, -hh, j, -hh)) /
                                  (4.0 * hh * hh);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
    const RealVector& lambda = eig.eigenvalues();
    if (lambda.maxCoeff() <= 0.0) break;
    RealVector step = RealVector::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (lambda(i) > 1e-6 * lambda.maxCoeff()) {
        step -= eig.eigenvectors().col(i) * (eig.eigenvectors().col(i).dot(grad) / lambda(i));
      }
    }
    if (!(step.norm() < 1e-4) || step.norm() < 1e-13) break;
    const RealVector candidate = point(step);
    const double fc = f(candidate);
    if (fc > f0 * (1.0 + 1e-12)) break;
    previous = cur;
    previous_grad = grad.norm();
    cur = {candidate, fc};
  }
  return cur;
}

struct SubspaceHit {
  double distance = kInf;
  ComplexVector coeffs;  // unit vector in C^k
};

SubspaceHit search_sphere(const Domain& domain, const ComplexVector& z, const ComplexMatrix& q,
                          const GeometryOptions& options) {
  const Eigen::Index k = q.cols();
  const SphereObjective f{domain, z, q};

  std::vector<LocalResult> screened;
  for (const auto& x : quasi_random_sphere(2 * k, options.search_starts)) {
    screened.push_back(nelder_mead_on_sphere(f, x, 0.25, 1e-3, 40 * static_cast<int>(k)));
  }
  for (Eigen::Index i = 0; i < 2 * k; ++i) {
    for (double sign : {1.0, -1.0}) {
      RealVector x = RealVector::Zero(2 * k);
      x(i) = sign;
      screened.push_back({x, f(x)});
    }
  }
  std::sort(screened.begin(), screened.end(), [](const auto& a, const auto& b) { return a.f < b.f; });

  LocalResult best = polish(f, screened.front());
  if (screened.size() > 1) {
    const auto second = polish(f, screened[1]);
    if (second.f < best.f) best = second;
  }

  // Certify: the ball of radius d (1 - slack) must survive random directions.
  std::mt19937_64 rng(0x5eed0000ULL + static_cast<std::uint64_t>(k));
  for (int round = 0;; ++round) {
    std::optional<LocalResult> counterexample;
    for (int i = 0; i < options.certify_directions; ++i) {
      const RealVector x = to_real(random_unit_vector(k, rng));
      const double value = f(x);
      if (value < best.f * (1.0 - options.certify_slack) && (!counterexample || value < counterexample->f)) {
        counterexample = LocalResult{x, value};
      }
    }
    if (!counterexample) break;
    if (round == 3) {
      throw NumericalError("boundary distance: search could not be certified");
    }
    const auto improved = polish(f, *counterexample);
    best = improved.f < counterexample->f ? improved : *counterexample;
  }
  best = newton_refine(f, best);
  return {best.f, to_complex(best.x) / best.x.norm()};
}

SubspaceHit nearest_exit(const Domain& domain, const ComplexVector& z, const ComplexMatrix& q,
                         const GeometryOptions& options) {
  const Eigen::Index k = q.cols();
  if (k == 1) {
    const auto d = directional_distance_impl(domain, z, q.col(0), options);
    ComplexVector c(1);
    c(0) = std::abs(d.contact) > 0.0 ? d.contact / std::abs(d.contact) : Complex(1.0, 0.0);
    return {d.value, c};
  }
  if (const auto* b = domain.get_if<Ball>()) {
    const ComplexVector offset = q.adjoint() * (z - b->center);  // in-subspace offset from the slice center
    const ComplexVector foot = z - q * offset;                   // slice center
    const double slice_radius = std::sqrt(std::max(0.0, b->radius * b->radius - (b->center - foot).squaredNorm()));
    const double r = offset.norm();
    ComplexVector c = ComplexVector::Zero(k);
    if (r > 1e-14 * b->radius) c = offset / r; else c(0) = 1.0;
    return {slice_radius - r, c};
  }
  if (const auto* p = domain.get_if<Polydisc>()) {
    SubspaceHit best;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double s = q.row(j).norm();
      if (s <= 0.0) continue;
      const Complex w = z(j) - p->center(j);
      const double t = (p->radii(j) - std::abs(w)) / s;
      if (t < best.distance) {
        const Complex phase = std::abs(w) > 0.0 ? w / std::abs(w) : Complex(1.0, 0.0);
        best = {t, ComplexVector(q.row(j).adjoint() / s * phase)};
      }
    }
    return best;
  }
  return search_sphere(domain, z, q, options);
}

BoundaryPoint make_boundary_point(const ComplexVector& z, const ComplexMatrix& q, const SubspaceHit& hit) {
  if (!std::isfinite(hit.distance)) {
    throw NumericalError("boundary distance: no boundary point in this subspace");
  }
  BoundaryPoint bp;
  bp.distance = hit.distance;
  bp.direction = q * hit.coeffs;
  bp.point = z + hit.distance * bp.direction;
  return bp;
}

}  // namespace

BoundaryPoint boundary_distance_in_subspace(const Domain& domain, const ComplexVector& z,
                                            const ComplexMatrix& subspace,
                                            const GeometryOptions& options) {
  require_inside(domain, z, "boundary_distance");
  if (subspace.rows() != domain.dim() || subspace.cols() == 0) {
    throw DimensionError("boundary_distance: subspace basis has wrong shape");
  }
  return make_boundary_point(z, subspace, nearest_exit(domain, z, subspace, options));
}

BoundaryPoint boundary_distance(const Domain& domain, const ComplexVector& z,
                                const GeometryOptions& options) {
  require_inside(domain, z, "boundary_distance");
  if (const auto* p = domain.get_if<Product>()) {
    // The nearest boundary point of a product moves a single factor.
    BoundaryPoint best;
    best.distance = kInf;
    Eigen::Index offset = 0;
    for (const auto& f : p->factors) {
      const auto fb = boundary_distance(f, z.segment(offset, f.dim()), options);
      if (fb.distance < best.distance) {
        best.distance = fb.distance;
        best.point = z;
        best.point.segment(offset, f.dim()) = fb.point;
        best.direction = ComplexVector::Zero(z.size());
        best.direction.segment(offset, f.dim()) = fb.direction;
      }
      offset += f.dim();
    }
    return best;
  }
  const ComplexMatrix identity = ComplexMatrix::Identity(z.size(), z.size());
  return make_boundary_point(z, identity, nearest_exit(domain, z, identity, options));
}

MinimalBasisFrame minimal_basis(const Domain& domain, const ComplexVector& z,
                                const GeometryOptions& options) {
  require_inside(domain, z, "minimal_basis");
  const Eigen::Index n = z.size();
  MinimalBasisFrame frame;
  frame.base_point = z;
  frame.basis.resize(n, n);
  frame.distances.resize(n);
  frame.contacts.reserve(static_cast<std::size_t>(n));

  ComplexMatrix q = ComplexMatrix::Identity(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    BoundaryPoint hit = j == 0 ? boundary_distance(domain, z, options)
                               : make_boundary_point(z, q, nearest_exit(domain, z, q, options));
    frame.basis.col(j) = hit.direction;
    frame.distances(j) = hit.distance;
    // slices only move the boundary away; ties such as the equal d_j of a ball can invert by rounding
    if (j > 0 && hit.distance < frame.distances(j - 1) && hit.distance >= frame.distances(j - 1) * (1 - 1e-12)) {
      frame.distances(j) = frame.distances(j - 1);
    }
    frame.contacts.push_back(hit.point);
    if (j + 1 < n) {
      // Coordinates of b_j in the current subspace, then its complement there.
      const ComplexVector coeffs = q.adjoint() * hit.direction;
      const ComplexMatrix u = complete_to_unitary(coeffs);
      q = q * u.rightCols(u.cols() - 1);
    }
  }
  frame.p = frame.distances.prod();
  return frame;
}

ComplexVector decompose(const ComplexVector& x, const MinimalBasisFrame& frame) {
  if (x.size() != frame.basis.rows()) throw DimensionError("decompose: dimension mismatch");
  return frame.basis.adjoint() * x;
}

double comparison_sum(const ComplexVector& x, const MinimalBasisFrame& frame) {
  const ComplexVector comps = decompose(x, frame);
  return (comps.cwiseAbs().array() / frame.distances.array()).sum();
}

InclusionResult diamond_inclusion_check(const Domain& domain, const ComplexVector& z,
                                        const RealVector& radii, const ComplexMatrix& directions,
                                        std::size_t samples, std::uint64_t seed) {
  require_inside(domain, z, "diamond_inclusion_check");
  const Eigen::Index n = z.size();
  if (radii.size() != n || directions.rows() != n || directions.cols() != n) {
    throw DimensionError("diamond_inclusion_check: radii/directions dimension mismatch");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(radii(j) > 0.0)) throw PreconditionError("diamond_inclusion_check: radii must be positive");
    const auto d = directional_distance(domain, z, directions.col(j));
    if (radii(j) > d.value * (1.0 + 1e-12)) {
      throw PreconditionError("diamond_inclusion_check: disc of radius " + std::to_string(radii(j)) +
                              " in direction " + std::to_string(j) + " leaves the domain (d = " +
                              std::to_string(d.value) + ")");
    }
  }

  // Uniform on {sum_j |w_j| < 1} in C^n: the moduli are Dirichlet(2,...,2; 1)
  // (Gamma(2) = sum of two exponentials), the phases independent uniform.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto exponential = [&] { return -std::log1p(-unit(rng)); };
  InclusionResult result;
  RealVector g(n);
  ComplexVector w(n);
  for (std::size_t s = 0; s < samples; ++s) {
    double total = exponential();  // slack variable
    for (Eigen::Index j = 0; j < n; ++j) {
      g(j) = exponential() + exponential();
      total += g(j);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      w(j) = std::polar(radii(j) * (1.0 - 1e-6) * g(j) / total, kTwoPi * unit(rng));
    }
    const ComplexVector point = z + directions * w;
    ++result.samples_checked;
    if (!contains(domain, point)) {
      result.contained = false;
      result.witness = point;
      break;
    }
  }
  return result;
}

InclusionResult diamond_inclusion_check(const Domain& domain, const ComplexVector& z,
                                        const RealVector& radii, std::size_t samples,
                                        std::uint64_t seed) {
  return diamond_inclusion_check(domain, z, radii,
                                 ComplexMatrix::Identity(z.size(), z.size()), samples, seed);
}

}  // namespace cconvex
