#include "cconvex/bergman.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cconvex/detail/sampling.hpp"
#include "cconvex/domain_io.hpp"
#include "cconvex/parallel.hpp"
#include "cconvex/reference_metrics.hpp"

namespace cconvex {

namespace {

constexpr std::size_t kMaxBatches = 64;
constexpr std::uint8_t kCacheVersion = 1;
constexpr char kCacheMagic[8] = {'C', 'C', 'V', 'X', 'G', 'R', 'A', 'M'};

int resolved_degree(const Domain& domain, const GramOptions& options) {
  return options.degree < 0 ? default_degree(domain.dim()) : options.degree;
}

// All multi-indices of total degree d in n variables, lexicographically decreasing.
void append_degree(std::vector<std::vector<int>>& out, std::vector<int>& current, std::size_t position,
                   int remaining) {
  if (position + 1 == current.size()) {
    current[position] = remaining;
    out.push_back(current);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    current[position] = a;
    append_degree(out, current, position + 1, remaining - a);
  }
}

std::vector<std::vector<int>> multi_indices(std::size_t n, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(n, 0);
  for (int d = 0; d <= degree; ++d) append_degree(out, current, 0, d);
  return out;
}

// u_j^k for k = 0..degree.
ComplexMatrix coordinate_powers(const GramModel& model, const ComplexVector& z) {
  const Eigen::Index n = z.size();
  ComplexMatrix powers(n, model.degree + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex u = (z(j) - model.center(j)) / model.scale(j);
    powers(j, 0) = 1.0;
    for (int k = 1; k <= model.degree; ++k) powers(j, k) = powers(j, k - 1) * u;
  }
  return powers;
}

void require_point(const GramModel& model, const ComplexVector& z) {
  if (z.size() != model.domain.dim()) throw DimensionError("bergman: dimension mismatch");
  if (!contains(model.domain, z)) throw PreconditionError("bergman: point is not in the domain");
}

void factorize(GramModel& model) {
  model.gram = (0.5 * (model.gram + model.gram.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(model.gram, Eigen::EigenvaluesOnly);
  model.min_eigenvalue = eig.eigenvalues().minCoeff();
  model.factor.compute(model.gram);
  if (model.factor.info() == Eigen::Success) return;
  const auto dim = static_cast<double>(model.gram.rows());
  model.jitter = 1e-13 * model.gram.trace().real() / dim;
  ComplexMatrix shifted = model.gram;
  shifted.diagonal().array() += model.jitter;
  model.factor.compute(shifted);
  if (model.factor.info() != Eigen::Success) {
    throw NumericalError("bergman: Gram matrix is indefinite (too few samples for this degree?)");
  }
}

void build_moment_gram(GramModel& model) {
  if (!has_reinhardt_moments(model.domain)) {
    throw UnsupportedError("bergman: moment mode needs a Reinhardt model; use monte_carlo for " +
                           to_string(model.domain.kind()));
  }
  const auto m = static_cast<Eigen::Index>(model.multi_indices.size());
  model.gram = ComplexMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& alpha = model.multi_indices[static_cast<std::size_t>(i)];
    double scale = 1.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      scale *= std::pow(model.scale(static_cast<Eigen::Index>(j)), 2 * alpha[j]);
    }
    model.gram(i, i) = reinhardt_moment(model.domain, alpha) / scale;
  }
  model.volume = reinhardt_moment(model.domain, std::vector<int>(static_cast<std::size_t>(model.domain.dim()), 0));
}

// Per-entry standard error of the Gram matrix from the batch spread.
void entry_stderr(GramModel& model) {
  const auto m = model.gram.rows();
  const std::size_t nb = model.batches.size();
  model.stderr_estimates = Eigen::MatrixXd::Zero(m, m);
  if (nb < 2) return;
  ComplexMatrix mean = ComplexMatrix::Zero(m, m);
  for (const auto& g : model.batches) mean += g;
  mean /= static_cast<double>(nb);
  for (const auto& g : model.batches) model.stderr_estimates += (g - mean).cwiseAbs2();
  model.stderr_estimates =
      (model.stderr_estimates / (static_cast<double>(nb - 1) * static_cast<double>(nb))).cwiseSqrt();
}

void build_monte_carlo_gram(GramModel& model, const GramOptions& options) {
  const auto samples = detail::draw_chunks(model.domain, options.samples, options.seed, options.threads);
  const auto m = static_cast<Eigen::Index>(model.multi_indices.size());
  const std::size_t chunks = samples.chunks.size();
  const std::size_t nb = std::min(kMaxBatches, chunks);
  std::vector<ComplexMatrix> sums(nb);
  std::vector<std::uint64_t> proposals(nb, 0);

  parallel_for(nb, options.threads, [&](std::size_t b) {
    ComplexMatrix s = ComplexMatrix::Zero(m, m);
    for (std::size_t c = b * chunks / nb; c < (b + 1) * chunks / nb; ++c) {
      const auto& chunk = samples.chunks[c];
      ComplexMatrix values(m, chunk.points.cols());
      for (Eigen::Index p = 0; p < chunk.points.cols(); ++p) {
        values.col(p) = monomial_values(model, chunk.points.col(p));
      }
      s.noalias() += values * values.adjoint();
      proposals[b] += chunk.proposals;
    }
    sums[b] = std::move(s);
  });

  const double box = samples.box.volume();
  ComplexMatrix total = ComplexMatrix::Zero(m, m);
  std::uint64_t total_proposals = 0;
  model.batches.clear();
  for (std::size_t b = 0; b < nb; ++b) {
    total += sums[b];
    total_proposals += proposals[b];
    ComplexMatrix g = box * sums[b] / static_cast<double>(proposals[b]);
    model.batches.push_back((0.5 * (g + g.adjoint())).eval());
  }
  model.gram = box * total / static_cast<double>(total_proposals);
  model.volume = samples.volume();
  model.volume_stderr = samples.volume_stderr();
  model.sample_count = samples.accepted;

  entry_stderr(model);
}

// Sample standard error of the mean of per-batch linearized values.
double batch_stderr(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / ((n - 1.0) * n));
}

}  // namespace

std::string to_string(GramMode mode) {
  return mode == GramMode::moment_exact ? "moment_exact" : "monte_carlo";
}

GramMode gram_mode_from_string(const std::string& name) {
  if (name == "moment_exact" || name == "moment") return GramMode::moment_exact;
  if (name == "monte_carlo" || name == "mc") return GramMode::monte_carlo;
  throw std::invalid_argument("unknown Gram mode '" + name + "'");
}

int default_degree(Eigen::Index dim) {
  switch (dim) {
    case 1: return 10;
    case 2: return 8;
    case 3: return 5;
    default: return 3;
  }
}

GramModel build_gram(const Domain& domain, const GramOptions& options) {
  if (!symmetry(domain).is_bounded) throw PreconditionError("bergman: domain must be bounded");
  const int degree = resolved_degree(domain, options);
  if (degree > kMaxGramDegree) throw PreconditionError("bergman: degree above 12");

  GramModel model;
  model.domain = domain;
  model.degree = degree;
  model.mode = options.mode;
  model.multi_indices = multi_indices(static_cast<std::size_t>(domain.dim()), degree);

  const Box box = bounding_box(domain);
  model.scale.resize(domain.dim());
  for (Eigen::Index j = 0; j < domain.dim(); ++j) {
    model.scale(j) = std::max(box.half_widths()(2 * j), box.half_widths()(2 * j + 1));
  }
  if (options.mode == GramMode::moment_exact) {
    model.center = has_reinhardt_moments(domain) ? reinhardt_center(domain) : box.center();
    build_moment_gram(model);
  } else {
    if (options.samples == 0) throw PreconditionError("bergman: samples must be positive");
    model.center = box.center();
    model.seed = options.seed;
    build_monte_carlo_gram(model, options);
  }
  factorize(model);
  return model;
}

ComplexVector monomial_values(const GramModel& model, const ComplexVector& z) {
  const ComplexMatrix powers = coordinate_powers(model, z);
  ComplexVector out(static_cast<Eigen::Index>(model.multi_indices.size()));
  for (std::size_t i = 0; i < model.multi_indices.size(); ++i) {
    Complex v = 1.0;
    const auto& alpha = model.multi_indices[i];
    for (std::size_t j = 0; j < alpha.size(); ++j) v *= powers(static_cast<Eigen::Index>(j), alpha[j]);
    out(static_cast<Eigen::Index>(i)) = v;
  }
  return out;
}

ComplexVector monomial_derivatives(const GramModel& model, const ComplexVector& z, const ComplexVector& x) {
  const ComplexMatrix powers = coordinate_powers(model, z);
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(model.multi_indices.size()));
  for (std::size_t i = 0; i < model.multi_indices.size(); ++i) {
    const auto& alpha = model.multi_indices[i];
    Complex sum = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      if (alpha[k] == 0) continue;
      const auto ki = static_cast<Eigen::Index>(k);
      Complex term = x(ki) * static_cast<double>(alpha[k]) / model.scale(ki);
      for (std::size_t j = 0; j < alpha.size(); ++j) {
        term *= powers(static_cast<Eigen::Index>(j), j == k ? alpha[j] - 1 : alpha[j]);
      }
      sum += term;
    }
    out(static_cast<Eigen::Index>(i)) = sum;
  }
  return out;
}

BergmanEstimate kernel_at(const GramModel& model, const ComplexVector& z) {
  require_point(model, z);
  const ComplexVector b = monomial_values(model, z);
  const ComplexVector a = model.factor.solve(b);
  BergmanEstimate est;
  est.K = b.dot(a).real();
  if (!(est.K > 0.0) || !std::isfinite(est.K)) throw NumericalError("bergman: kernel value underflowed");
  est.degree = model.degree;
  est.mode = model.mode;
  est.jitter = model.jitter;
  std::vector<double> lin;
  for (const auto& g : model.batches) lin.push_back(a.dot(g * a).real());
  est.K_error = batch_stderr(lin);
  return est;
}

BergmanEstimate metric_at(const GramModel& model, const ComplexVector& z, const ComplexVector& x) {
  if (x.size() != model.domain.dim()) throw DimensionError("bergman: direction dimension mismatch");
  if (x.isZero(0.0)) throw PreconditionError("bergman: zero direction");
  BergmanEstimate est = kernel_at(model, z);
  const ComplexVector b = monomial_values(model, z);
  const ComplexVector c = monomial_derivatives(model, z, x);
  const ComplexVector a = model.factor.solve(b);
  const ComplexVector e = model.factor.solve(c);
  const Complex s = b.dot(e);  // b* G^-1 c
  const double cc = c.dot(e).real();
  const double K = est.K;
  const double m2 = std::max(0.0, cc - std::norm(s) / K);
  est.M = std::sqrt(m2);
  est.B = est.M / std::sqrt(K);

  if (!model.batches.empty() && est.M > 0.0) {
    std::vector<double> dm, db;
    for (const auto& g : model.batches) {
      const double d_k = -a.dot(g * a).real();
      const double d_cc = -e.dot(g * e).real();
      const Complex d_s = -a.dot(g * e);
      const double d_m2 = d_cc - (2.0 * (std::conj(s) * d_s).real() * K - std::norm(s) * d_k) / (K * K);
      const double d_m = d_m2 / (2.0 * est.M);
      dm.push_back(d_m);
      db.push_back(d_m / std::sqrt(K) - est.M * d_k / (2.0 * K * std::sqrt(K)));
    }
    est.M_error = batch_stderr(dm);
    est.B_error = batch_stderr(db);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

namespace {

struct CacheKey {
  std::uint64_t domain_hash;
  std::int32_t degree;
  std::uint8_t mode;
  std::uint64_t samples;
  std::uint64_t seed;
};

CacheKey cache_key(const Domain& domain, const GramOptions& options) {
  const bool mc = options.mode == GramMode::monte_carlo;
  return {domain_hash(domain), resolved_degree(domain, options), static_cast<std::uint8_t>(mc ? 1 : 0),
          mc ? options.samples : 0, mc ? options.seed : 0};
}

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

void put_doubles(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

bool get_doubles(std::istream& in, double* data, std::size_t count) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double))));
}

void put_matrix(std::ostream& out, const ComplexMatrix& m) {
  put_doubles(out, reinterpret_cast<const double*>(m.data()), 2 * static_cast<std::size_t>(m.size()));
}

bool get_matrix(std::istream& in, ComplexMatrix& m, Eigen::Index rows, Eigen::Index cols) {
  m.resize(rows, cols);
  return get_doubles(in, reinterpret_cast<double*>(m.data()), 2 * static_cast<std::size_t>(m.size()));
}

}  // namespace

std::filesystem::path gram_cache_file(const std::filesystem::path& dir, const Domain& domain,
                                      const GramOptions& options) {
  const CacheKey key = cache_key(domain, options);
  std::ostringstream name;
  name << "gram-" << domain_hash_hex(domain) << "-N" << key.degree << '-' << (key.mode ? "mc" : "moment")
       << "-s" << key.samples << "-seed" << key.seed << ".bin";
  return dir / name.str();
}

void save_gram(const GramModel& model, const std::filesystem::path& path) {
  GramOptions options;
  options.degree = model.degree;
  options.mode = model.mode;
  options.samples = model.mode == GramMode::monte_carlo ? model.sample_count : 0;
  options.seed = model.seed;
  const CacheKey key = cache_key(model.domain, options);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("bergman cache: cannot write " + path.string());
  out.write(kCacheMagic, sizeof(kCacheMagic));
  put(out, kCacheVersion);
  put(out, key.domain_hash);
  put(out, key.degree);
  put(out, key.mode);
  put(out, key.samples);
  put(out, key.seed);
  const auto n = static_cast<std::uint64_t>(model.domain.dim());
  const auto m = static_cast<std::uint64_t>(model.gram.rows());
  put(out, n);
  put(out, m);
  put_doubles(out, reinterpret_cast<const double*>(model.center.data()), 2 * n);
  put_doubles(out, model.scale.data(), n);
  put(out, model.volume);
  put(out, model.volume_stderr);
  put_matrix(out, model.gram);
  put(out, static_cast<std::uint64_t>(model.batches.size()));
  for (const auto& b : model.batches) put_matrix(out, b);
  if (!out) throw std::runtime_error("bergman cache: write failed for " + path.string());
}

std::optional<GramModel> load_gram(const std::filesystem::path& path, const Domain& domain,
                                   const GramOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[sizeof(kCacheMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) return std::nullopt;
  std::uint8_t version = 0;
  if (!get(in, version) || version != kCacheVersion) return std::nullopt;
  const CacheKey want = cache_key(domain, options);
  CacheKey have{};
  if (!get(in, have.domain_hash) || !get(in, have.degree) || !get(in, have.mode) || !get(in, have.samples) ||
      !get(in, have.seed)) {
    return std::nullopt;
  }
  if (have.domain_hash != want.domain_hash || have.degree != want.degree || have.mode != want.mode ||
      have.samples != want.samples || have.seed != want.seed) {
    return std::nullopt;
  }
  std::uint64_t n = 0, m = 0;
  if (!get(in, n) || !get(in, m) || n != static_cast<std::uint64_t>(domain.dim())) return std::nullopt;

  GramModel model;
  model.domain = domain;
  model.degree = have.degree;
  model.mode = options.mode;
  model.seed = have.seed;
  model.multi_indices = multi_indices(n, have.degree);
  if (model.multi_indices.size() != m) return std::nullopt;
  model.center.resize(static_cast<Eigen::Index>(n));
  model.scale.resize(static_cast<Eigen::Index>(n));
  const auto rows = static_cast<Eigen::Index>(m);
  if (!get_doubles(in, reinterpret_cast<double*>(model.center.data()), 2 * n) ||
      !get_doubles(in, model.scale.data(), n) || !get(in, model.volume) || !get(in, model.volume_stderr) ||
      !get_matrix(in, model.gram, rows, rows)) {
    return std::nullopt;
  }
  std::uint64_t nb = 0;
  if (!get(in, nb) || nb > kMaxBatches) return std::nullopt;
  model.batches.resize(nb);
  for (auto& b : model.batches) {
    if (!get_matrix(in, b, rows, rows)) return std::nullopt;
  }
  model.sample_count = have.samples;
  if (nb > 0) entry_stderr(model);
  factorize(model);
  return model;
}

GramModel build_gram_cached(const Domain& domain, const GramOptions& options) {
  const char* dir = std::getenv("CCONVEX_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return build_gram(domain, options);
  const auto path = gram_cache_file(dir, domain, options);
  if (auto cached = load_gram(path, domain, options)) return std::move(*cached);
  GramModel model = build_gram(domain, options);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  try {
    save_gram(model, path);
  } catch (const std::exception&) {
    // unwritable cache directory: keep the in-memory model
  }
  return model;
}

}  // namespace cconvex
