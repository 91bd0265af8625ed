#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cconvex/errors.hpp"

namespace cconvex {

template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using ComplexVector = CVector<double>;
using ComplexMatrix = CMatrix<double>;
using RealVector = Eigen::VectorXd;

/// Hermitian inner product <u, v> = sum_j u_j conj(v_j).
///
/// Linear in the first argument. Eigen's dot() conjugates its left operand, so
/// this is v.dot(u).
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar hermitian_inner(const Eigen::MatrixBase<DerivedU>& u,
                                          const Eigen::MatrixBase<DerivedV>& v) {
  if (u.size() != v.size()) {
    throw DimensionError("hermitian_inner: dimensions " + std::to_string(u.size()) +
                         " and " + std::to_string(v.size()) + " differ");
  }
  return v.dot(u);
}

/// Largest entry of |M^* M - I|.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real unitarity_defect(
    const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (m.rows() != m.cols()) return std::numeric_limits<Real>::infinity();
  using Square = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Square gram = m.adjoint() * m;
  return (gram - Square::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  return unitarity_defect(m) < tol;
}

/// Unitary matrix whose first column is exactly v / |v|.
///
/// The remaining columns come from a Householder reflection and span the
/// orthogonal complement of v; their phases are not normalized.
template <typename Derived>
CMatrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real> complete_to_unitary(
    const Eigen::MatrixBase<Derived>& v) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const Real norm = v.norm();
  if (v.size() == 0 || !(norm > Real(0))) {
    throw PreconditionError("complete_to_unitary: zero vector");
  }
  CMatrix<Real> column = v.template cast<std::complex<Real>>() / norm;
  Eigen::HouseholderQR<CMatrix<Real>> qr(column);
  CMatrix<Real> q = qr.householderQ();
  // q.col(0) equals column up to a unimodular factor; the other columns are
  // orthogonal to it either way.
  q.col(0) = column;
  return q;
}

/// Haar-distributed random unitary matrix.
ComplexMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng);

/// Uniform random point on the unit sphere of C^n (= R^{2n}).
ComplexVector random_unit_vector(Eigen::Index n, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Comparability of weighted bases.
//
// For orthonormal bases p, q of C^n and increasing positive weights a, b, if
//   1/c <= sum_j a_j |<X,p_j>| / sum_j b_j |<X,q_j>| <= c   for all X != 0,
// then 1/(n! c) <= a_j / b_j <= n! c for every j. The argument goes through a
// permutation sigma with prod_j |<p_j, q_sigma(j)>| >= 1/n!, which exists by
// expanding the determinant of the change-of-basis matrix.
// ---------------------------------------------------------------------------

struct PermutationWitness {
  std::vector<int> sigma;  // p_j is matched with q_{sigma[j]}
  double product = 0.0;    // prod_j |<p_j, q_sigma(j)>|
};

/// Exhaustive search over all n! permutations (n <= 8) for the largest
/// product of matched inner-product moduli. Columns of p and q are the basis
/// vectors.
PermutationWitness best_matching_permutation(const ComplexMatrix& p, const ComplexMatrix& q);

struct ComparabilityRange {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  // Smallest c with 1/c <= ratio <= c over the sample.
  double constant() const { return std::max(max_ratio, 1.0 / min_ratio); }
};

/// Range of sum a_j|<X,p_j>| / sum b_j|<X,q_j>| over `samples` random unit X
/// plus every p_j and q_j.
ComparabilityRange sampled_comparability_range(const ComplexMatrix& p, const ComplexMatrix& q,
                                               const RealVector& a, const RealVector& b,
                                               std::size_t samples, std::uint64_t seed);

enum class ComparabilityStatus {
  holds,                // hypothesis held on the sample and the conclusion holds
  hypothesis_violated,  // some sampled X breaks the c-comparability hypothesis
  conclusion_violated,  // hypothesis held but some a_j/b_j escaped [1/(n!c), n!c]
};

struct ComparabilityResult {
  ComparabilityStatus status = ComparabilityStatus::hypothesis_violated;
  PermutationWitness witness;
  ComparabilityRange observed;
  double c_prime = 0.0;  // n! * c
  bool holds() const { return status == ComparabilityStatus::holds; }
};

ComparabilityResult basis_comparability_check(const ComplexMatrix& p, const ComplexMatrix& q,
                                              const RealVector& a, const RealVector& b, double c,
                                              std::size_t samples = 10000,
                                              std::uint64_t seed = 1);

}  // namespace cconvex
