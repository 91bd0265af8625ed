#pragma once

// Test-side reference computations. Nothing here calls the library's
// geometry or metric code; only Domain membership is shared.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "cconvex/domain.hpp"

namespace oracle {

using cconvex::Complex;
using cconvex::ComplexVector;
using cconvex::Domain;

inline constexpr double pi = std::numbers::pi;

// Double-exponential (tanh-sinh) quadrature on [a, b]. Robust against
// integrable endpoint singularities such as (1 - r)^(1/4).
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b, double h = 1.0 / 32,
                        int levels = 3 * 32) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int k = -levels; k <= levels; ++k) {
    const double t = k * h;
    const double u = 0.5 * pi * std::sinh(t);
    const double x = std::tanh(u);
    const double w = 0.5 * pi * std::cosh(t) / (std::cosh(u) * std::cosh(u));
    if (w < 1e-300) continue;
    const double s = mid + half * x;
    if (s <= a || s >= b) continue;
    sum += w * f(s);
  }
  return sum * h * half;
}

// Integral of |z1|^(2a1) |z2|^(2a2) over a two-dimensional complete Reinhardt
// domain {r2 < h(r1), 0 <= r1 < r1max}, by nested radial quadrature.
inline double reinhardt_moment_2d(const std::function<double(double)>& h, double r1max, int a1, int a2) {
  const auto inner = [&](double r1) {
    const double top = h(r1);
    if (top <= 0.0) return 0.0;
    const auto g = [&](double r2) { return std::pow(r2, 2 * a2 + 1); };
    return std::pow(r1, 2 * a1 + 1) * tanh_sinh(g, 0.0, top);
  };
  return 4.0 * pi * pi * tanh_sinh(inner, 0.0, r1max);
}

inline double diamond_moment_2d(double rho1, double rho2, int a1, int a2) {
  return reinhardt_moment_2d([&](double r1) { return rho2 * (1.0 - r1 / rho1); }, rho1, a1, a2);
}

inline double ellipsoid_moment_2d(int m1, int m2, int a1, int a2) {
  return reinhardt_moment_2d(
      [&](double r1) { return std::pow(std::max(0.0, 1.0 - std::pow(r1, 2 * m1)), 1.0 / (2 * m2)); }, 1.0, a1, a2);
}

// Membership of the closed disc {z + lambda x : |lambda| <= r} checked on
// concentric circles; slices of the catalog domains are simply connected, so
// the outer circle decides for convex slices and the inner ones guard the
// slit plane.
inline bool disc_inside(const Domain& d, const ComplexVector& z, const ComplexVector& x, double r, int phases) {
  for (int ring = 1; ring <= 4; ++ring) {
    const double rr = r * ring / 4.0;
    for (int k = 0; k < phases; ++k) {
      const Complex lambda = std::polar(rr, 2.0 * pi * k / phases);
      if (!cconvex::contains(d, z + lambda * x)) return false;
    }
  }
  return true;
}

// d_D(z, X) by bisection on the disc radius.
inline double bisect_directional_distance(const Domain& d, const ComplexVector& z, const ComplexVector& x,
                                   double rmax = 64.0, int phases = 4096) {
  double lo = 0.0, hi = rmax;
  if (disc_inside(d, z, x, hi, phases)) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (disc_inside(d, z, x, mid, phases) ? lo : hi) = mid;
  }
  return lo;
}

// First exit along z + t v by bisection, for convex slices.
inline double bisect_exit(const Domain& d, const ComplexVector& z, const ComplexVector& v, double tmax = 64.0) {
  double lo = 0.0, hi = tmax;
  if (cconvex::contains(d, z + hi * v)) return hi;
  for (int it = 0; it < 70; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cconvex::contains(d, z + mid * v) ? lo : hi) = mid;
  }
  return lo;
}

inline ComplexVector random_direction(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v / v.norm();
}

// Boundary distance of a convex domain, from above: minimum of ray exits over
// random directions. Converges to the true value as directions grow.
inline double boundary_distance_upper(const Domain& d, const ComplexVector& z, int directions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < directions; ++k) best = std::min(best, bisect_exit(d, z, random_direction(z.size(), rng)));
  return best;
}

// Bergman kernel of the unit disc by its power series sum (k+1)|z|^2k / pi.
inline double disc_kernel_series(Complex z) {
  const double t = std::norm(z);
  double sum = 0.0, term = 1.0;
  for (int k = 0; k < 100000 && term > 1e-18; ++k) {
    sum += (k + 1) * term;
    term *= t;
  }
  return sum / pi;
}

// Bergman kernel of the unit ball in C^2 from the orthonormal monomial
// series: |z^a|^2 / ||z^a||^2 summed with ||z^a||^2 = pi^2 a1! a2! / (|a|+2)!.
inline double ball2_kernel_series(const ComplexVector& z) {
  const double x = std::norm(z(0)), y = std::norm(z(1));
  double sum = 0.0;
  for (int total = 0; total < 400; ++total) {
    // sum over a1 + a2 = total of (total+2)!/(a1! a2!) x^a1 y^a2 / pi^2
    // = (total+2)(total+1) (x + y)^total / pi^2
    const double term = (total + 2.0) * (total + 1.0) * std::pow(x + y, total);
    sum += term;
    if (term < 1e-18) break;
  }
  return sum / (pi * pi);
}

// Smallest eigen-free test of unitarity: max |U^* U - I|.
inline double unitarity_defect(const cconvex::ComplexMatrix& u) {
  return (u.adjoint() * u - cconvex::ComplexMatrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace oracle
