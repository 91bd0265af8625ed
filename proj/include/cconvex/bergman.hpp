#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "cconvex/domain.hpp"

namespace cconvex {

enum class GramMode { moment_exact, monte_carlo };

std::string to_string(GramMode mode);
GramMode gram_mode_from_string(const std::string& name);

inline constexpr int kMaxGramDegree = 12;
inline constexpr std::size_t kDefaultBergmanSamples = 2'000'000;

/// Polynomial degree used when none is requested: 10, 8 and 5 in dimensions
/// 1, 2 and 3, and 3 above that.
int default_degree(Eigen::Index dim);

struct GramOptions {
  int degree = -1;  // negative selects default_degree
  GramMode mode = GramMode::moment_exact;
  std::size_t samples = kDefaultBergmanSamples;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Gram matrix of the monomials phi_a(z) = prod_j ((z_j - c_j) / s_j)^(a_j),
/// |a| <= N, in L^2(D). The centre c and per-coordinate scales s come from the
/// symmetry centre (moment mode) or the bounding box (Monte Carlo mode).
struct GramModel {
  Domain domain = Domain::unit_disc();
  int degree = 0;
  GramMode mode = GramMode::moment_exact;
  std::vector<std::vector<int>> multi_indices;  // graded, then lexicographically decreasing
  ComplexVector center;
  RealVector scale;
  ComplexMatrix gram;
  double volume = 0.0;
  double volume_stderr = 0.0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;

  // Monte Carlo only: batch estimates of the Gram matrix (fixed partition of
  // the sample chunks) and the per-entry standard errors they imply.
  std::vector<ComplexMatrix> batches;
  Eigen::MatrixXd stderr_estimates;

  double jitter = 0.0;  // diagonal shift added before factorization, if any
  double min_eigenvalue = 0.0;
  Eigen::LLT<ComplexMatrix> factor;
};

/// Throws PreconditionError for unbounded domains or degree > 12,
/// UnsupportedError for moment mode on domains without closed-form moments,
/// NumericalError if the Gram matrix stays indefinite after jitter.
GramModel build_gram(const Domain& domain, const GramOptions& options);

/// As build_gram, reusing the on-disk cache in $CCONVEX_CACHE_DIR when set.
GramModel build_gram_cached(const Domain& domain, const GramOptions& options);

ComplexVector monomial_values(const GramModel& model, const ComplexVector& z);
/// Directional derivative sum_j X_j d/dz_j of every monomial at z.
ComplexVector monomial_derivatives(const GramModel& model, const ComplexVector& z,
                                   const ComplexVector& x);

struct BergmanEstimate {
  double K = 0.0;
  double M = 0.0;
  double B = 0.0;
  double K_error = 0.0;  // one standard error (Monte Carlo), zero otherwise
  double M_error = 0.0;
  double B_error = 0.0;
  int degree = 0;
  GramMode mode = GramMode::moment_exact;
  bool truncated = true;  // values come from a finite polynomial subspace
  double jitter = 0.0;
};

/// K_N(z) = b(z)* G^-1 b(z), a lower approximant of the Bergman kernel.
BergmanEstimate kernel_at(const GramModel& model, const ComplexVector& z);

/// K_N, M_N and B_N = M_N / sqrt(K_N) with
/// M_N^2 = c* G^-1 c - |b* G^-1 c|^2 / K_N, c the derivative vector.
BergmanEstimate metric_at(const GramModel& model, const ComplexVector& z, const ComplexVector& x);

/// Binary cache layout (little endian): "CCVXGRAM", version byte, key
/// (domain hash, degree, mode, samples, seed), then centre, scale, volume
/// data and the Gram and batch matrices as raw doubles. See docs/formats.md.
void save_gram(const GramModel& model, const std::filesystem::path& path);
std::optional<GramModel> load_gram(const std::filesystem::path& path, const Domain& domain,
                                   const GramOptions& options);
std::filesystem::path gram_cache_file(const std::filesystem::path& dir, const Domain& domain,
                                      const GramOptions& options);

}  // namespace cconvex
