#include "cconvex/linalg.hpp"

#include <cmath>
#include <numeric>

namespace cconvex {

ComplexMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phases of R's diagonal so the distribution is Haar.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mod = std::abs(r(j, j));
    if (mod > 0.0) q.col(j) *= r(j, j) / mod;
  }
  return q;
}

ComplexVector random_unit_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal(rng), normal(rng));
  } while (v.norm() == 0.0);
  return v / v.norm();
}

namespace {

void require_bases(const ComplexMatrix& p, const ComplexMatrix& q) {
  if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows()) {
    throw DimensionError("basis comparability: bases must be square of equal size");
  }
  if (p.rows() == 0) throw DimensionError("basis comparability: empty basis");
  if (p.rows() > 8) throw PreconditionError("basis comparability: permutation search limited to n <= 8");
  if (!is_unitary(p, 1e-10) || !is_unitary(q, 1e-10)) {
    throw PreconditionError("basis comparability: bases must be unitary");
  }
}

void require_weights(const RealVector& a, const RealVector& b, Eigen::Index n) {
  if (a.size() != n || b.size() != n) throw DimensionError("basis comparability: weight length mismatch");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(a(j) > 0.0) || !(b(j) > 0.0)) {
      throw PreconditionError("basis comparability: weights must be positive");
    }
    if (j > 0 && (a(j) < a(j - 1) || b(j) < b(j - 1))) {
      throw PreconditionError("basis comparability: weights must be increasing");
    }
  }
}

double weighted_ratio(const ComplexVector& x, const ComplexMatrix& p, const ComplexMatrix& q,
                      const RealVector& a, const RealVector& b) {
  const ComplexVector xp = p.adjoint() * x;  // <x, p_j>
  const ComplexVector xq = q.adjoint() * x;
  return a.dot(xp.cwiseAbs()) / b.dot(xq.cwiseAbs());
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

PermutationWitness best_matching_permutation(const ComplexMatrix& p, const ComplexMatrix& q) {
  require_bases(p, q);
  const int n = static_cast<int>(p.rows());
  const Eigen::MatrixXd overlap = (p.adjoint() * q).cwiseAbs();  // |<q_k, p_j>| = |<p_j, q_k>|
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  PermutationWitness best;
  best.product = -1.0;
  do {
    double prod = 1.0;
    for (int j = 0; j < n; ++j) prod *= overlap(j, sigma[j]);
    if (prod > best.product) {
      best.product = prod;
      best.sigma = sigma;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

ComparabilityRange sampled_comparability_range(const ComplexMatrix& p, const ComplexMatrix& q,
                                               const RealVector& a, const RealVector& b,
                                               std::size_t samples, std::uint64_t seed) {
  require_bases(p, q);
  require_weights(a, b, p.rows());
  ComparabilityRange range{std::numeric_limits<double>::infinity(), 0.0};
  auto visit = [&](const ComplexVector& x) {
    const double r = weighted_ratio(x, p, q, a, b);
    range.min_ratio = std::min(range.min_ratio, r);
    range.max_ratio = std::max(range.max_ratio, r);
  };
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    visit(p.col(j));
    visit(q.col(j));
  }
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) visit(random_unit_vector(p.rows(), rng));
  return range;
}

ComparabilityResult basis_comparability_check(const ComplexMatrix& p, const ComplexMatrix& q,
                                              const RealVector& a, const RealVector& b, double c,
                                              std::size_t samples, std::uint64_t seed) {
  if (!(c > 1.0)) throw PreconditionError("basis comparability: constant must exceed 1");
  ComparabilityResult result;
  result.witness = best_matching_permutation(p, q);
  result.observed = sampled_comparability_range(p, q, a, b, samples, seed);
  const int n = static_cast<int>(p.rows());
  result.c_prime = factorial(n) * c;

  if (result.observed.min_ratio < 1.0 / c || result.observed.max_ratio > c) {
    result.status = ComparabilityStatus::hypothesis_violated;
    return result;
  }
  result.status = ComparabilityStatus::holds;
  for (int j = 0; j < n; ++j) {
    const double ratio = a(j) / b(j);
    if (ratio < 1.0 / result.c_prime || ratio > result.c_prime) {
      result.status = ComparabilityStatus::conclusion_violated;
    }
  }
  return result;
}

}  // namespace cconvex
