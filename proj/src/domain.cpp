#include "cconvex/domain.hpp"

#include <cmath>
#include <limits>

#include "cconvex/detail/sampling.hpp"
#include "cconvex/parallel.hpp"

namespace cconvex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool all_finite(const ComplexVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  }
  return true;
}

void require_positive(const RealVector& r, const char* what) {
  if (r.size() == 0) throw PreconditionError(std::string(what) + ": empty parameter list");
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (!(r(i) > 0.0) || !std::isfinite(r(i))) {
      throw PreconditionError(std::string(what) + ": radii must be positive and finite");
    }
  }
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::ball: return "ball";
    case DomainKind::polydisc: return "polydisc";
    case DomainKind::weighted_diamond: return "weighted_diamond";
    case DomainKind::complex_ellipsoid: return "complex_ellipsoid";
    case DomainKind::koebe_slit_plane: return "koebe_slit_plane";
    case DomainKind::product: return "product";
    case DomainKind::linear_image: return "linear_image";
  }
  return "unknown";
}

Domain::Domain(std::shared_ptr<const Model> model, Eigen::Index dim)
    : model_(std::move(model)), dim_(dim) {}

DomainKind Domain::kind() const { return static_cast<DomainKind>(model_->value.index()); }

const DomainVariant& Domain::variant() const { return model_->value; }

Domain Domain::ball(ComplexVector center, double radius) {
  if (center.size() == 0) throw DimensionError("ball: empty center");
  if (!all_finite(center)) throw PreconditionError("ball: non-finite center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("ball: radius must be positive");
  const auto n = center.size();
  return Domain(std::make_shared<Model>(Model{Ball{std::move(center), radius}}), n);
}

Domain Domain::unit_ball(Eigen::Index n) { return ball(ComplexVector::Zero(n), 1.0); }

Domain Domain::polydisc(ComplexVector center, RealVector radii) {
  require_positive(radii, "polydisc");
  if (center.size() != radii.size()) throw DimensionError("polydisc: center and radii differ in length");
  if (!all_finite(center)) throw PreconditionError("polydisc: non-finite center");
  const auto n = center.size();
  return Domain(std::make_shared<Model>(Model{Polydisc{std::move(center), std::move(radii)}}), n);
}

Domain Domain::weighted_diamond(RealVector radii) {
  require_positive(radii, "weighted_diamond");
  const auto n = radii.size();
  return Domain(std::make_shared<Model>(Model{WeightedDiamond{std::move(radii)}}), n);
}

Domain Domain::complex_ellipsoid(std::vector<int> exponents) {
  if (exponents.empty()) throw PreconditionError("complex_ellipsoid: empty exponent list");
  for (int m : exponents) {
    if (m < 1) throw PreconditionError("complex_ellipsoid: exponents must be positive integers");
  }
  const auto n = static_cast<Eigen::Index>(exponents.size());
  return Domain(std::make_shared<Model>(Model{ComplexEllipsoid{std::move(exponents)}}), n);
}

Domain Domain::koebe_slit_plane() {
  return Domain(std::make_shared<Model>(Model{KoebeSlitPlane{}}), 1);
}

Domain Domain::product(std::vector<Domain> factors) {
  if (factors.empty()) throw PreconditionError("product: no factors");
  Eigen::Index n = 0;
  for (const auto& f : factors) n += f.dim();
  return Domain(std::make_shared<Model>(Model{Product{std::move(factors)}}), n);
}

Domain Domain::linear_image(Domain base, ComplexMatrix map, ComplexVector shift) {
  const auto n = base.dim();
  if (map.rows() != n || map.cols() != n) throw DimensionError("linear_image: map must be n x n");
  if (shift.size() != n) throw DimensionError("linear_image: shift has wrong dimension");
  if (!all_finite(shift) || !map.allFinite()) throw PreconditionError("linear_image: non-finite data");
  Eigen::PartialPivLU<ComplexMatrix> lu(map);
  const double abs_det = std::abs(lu.determinant());
  if (!(abs_det > 1e-12)) throw PreconditionError("linear_image: map is not invertible (|det| <= 1e-12)");
  LinearImage image{std::move(base), std::move(map), std::move(shift), lu.inverse(), abs_det};
  return Domain(std::make_shared<Model>(Model{std::move(image)}), n);
}

Domain Domain::linear_image(Domain base, ComplexMatrix map) {
  const auto n = base.dim();
  return linear_image(std::move(base), std::move(map), ComplexVector::Zero(n));
}

ComplexVector Box::center() const {
  const auto n = lower.size() / 2;
  ComplexVector c(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    c(j) = Complex((lower(2 * j) + upper(2 * j)) / 2.0, (lower(2 * j + 1) + upper(2 * j + 1)) / 2.0);
  }
  return c;
}

bool contains(const Domain& domain, const ComplexVector& z) {
  if (z.size() != domain.dim()) {
    throw DimensionError("contains: point of dimension " + std::to_string(z.size()) +
                         " for domain of dimension " + std::to_string(domain.dim()));
  }
  if (!all_finite(z)) return false;
  constexpr double limit = 1.0 - kMembershipMargin;
  return std::visit(
      overloaded{
          [&](const Ball& b) { return (z - b.center).norm() / b.radius < limit; },
          [&](const Polydisc& p) {
            for (Eigen::Index j = 0; j < z.size(); ++j) {
              if (!(std::abs(z(j) - p.center(j)) / p.radii(j) < limit)) return false;
            }
            return true;
          },
          [&](const WeightedDiamond& d) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < z.size(); ++j) s += std::abs(z(j)) / d.radii(j);
            return s < limit;
          },
          [&](const ComplexEllipsoid& e) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < z.size(); ++j) {
              s += std::pow(std::abs(z(j)), 2 * e.exponents[j]);
            }
            return s < limit;
          },
          [&](const KoebeSlitPlane&) {
            const bool on_slit = std::abs(z(0).imag()) < 1e-14 && z(0).real() >= 0.25 - 1e-14;
            return !on_slit;
          },
          [&](const Product& p) {
            Eigen::Index offset = 0;
            for (const auto& f : p.factors) {
              if (!contains(f, z.segment(offset, f.dim()))) return false;
              offset += f.dim();
            }
            return true;
          },
          [&](const LinearImage& l) { return contains(l.base, l.pull_point(z)); },
      },
      domain.variant());
}

SymmetryInfo symmetry(const Domain& domain) {
  return std::visit(
      overloaded{
          [](const Ball& b) {
            const bool centered = b.center.isZero(0.0);
            return SymmetryInfo{centered, centered, true, true};
          },
          [](const Polydisc& p) {
            const bool centered = p.center.isZero(0.0);
            return SymmetryInfo{centered, centered, true, true};
          },
          [](const WeightedDiamond&) { return SymmetryInfo{true, true, true, true}; },
          [](const ComplexEllipsoid&) { return SymmetryInfo{true, true, true, true}; },
          [](const KoebeSlitPlane&) { return SymmetryInfo{false, false, false, false}; },
          [](const Product& p) {
            SymmetryInfo info{true, true, true, true};
            for (const auto& f : p.factors) {
              const auto s = symmetry(f);
              info.is_reinhardt = info.is_reinhardt && s.is_reinhardt;
              info.is_circular = info.is_circular && s.is_circular;
              info.is_convex = info.is_convex && s.is_convex;
              info.is_bounded = info.is_bounded && s.is_bounded;
            }
            return info;
          },
          [](const LinearImage& l) {
            const auto s = symmetry(l.base);
            const bool linear = l.shift.isZero(0.0);
            ComplexMatrix off = l.map;
            off.diagonal().setZero();
            const bool diagonal = off.isZero(0.0);
            return SymmetryInfo{s.is_reinhardt && linear && diagonal, s.is_circular && linear,
                                s.is_convex, s.is_bounded};
          },
      },
      domain.variant());
}

namespace {

// sup sum_j t_j |u_j| subject to sum_j t_j^(2 m_j) <= 1, t_j >= 0. The
// maximizer satisfies |u_j| = mu * 2 m_j t_j^(2 m_j - 1); bisect on log mu.
double ellipsoid_support(const std::vector<int>& m, const ComplexVector& u) {
  const auto n = u.size();
  RealVector mod = u.cwiseAbs();
  if (mod.maxCoeff() == 0.0) return 0.0;
  auto t_of = [&](double log_mu, Eigen::Index j) {
    if (mod(j) == 0.0) return 0.0;
    const double q = 2.0 * m[j] - 1.0;
    return std::exp((std::log(mod(j) / (2.0 * m[j])) - log_mu) / q);
  };
  auto excess = [&](double log_mu) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += std::pow(t_of(log_mu, j), 2 * m[j]);
    return s - 1.0;
  };
  double lo = -700.0, hi = 700.0;  // excess decreases in mu
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) lo = mid; else hi = mid;
  }
  const double log_mu = 0.5 * (lo + hi);
  double h = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) h += t_of(log_mu, j) * mod(j);
  return h;
}

}  // namespace

double support_function(const Domain& domain, const ComplexVector& u) {
  if (u.size() != domain.dim()) throw DimensionError("support_function: dimension mismatch");
  return std::visit(
      overloaded{
          [&](const Ball& b) { return hermitian_inner(b.center, u).real() + b.radius * u.norm(); },
          [&](const Polydisc& p) {
            double h = 0.0;
            for (Eigen::Index j = 0; j < u.size(); ++j) {
              h += (p.center(j) * std::conj(u(j))).real() + p.radii(j) * std::abs(u(j));
            }
            return h;
          },
          [&](const WeightedDiamond& d) { return (d.radii.array() * u.cwiseAbs().array()).maxCoeff(); },
          [&](const ComplexEllipsoid& e) { return ellipsoid_support(e.exponents, u); },
          [&](const KoebeSlitPlane&) { return kInf; },
          [&](const Product& p) {
            double h = 0.0;
            Eigen::Index offset = 0;
            for (const auto& f : p.factors) {
              h += support_function(f, u.segment(offset, f.dim()));
              offset += f.dim();
            }
            return h;
          },
          [&](const LinearImage& l) {
            return hermitian_inner(l.shift, u).real() +
                   support_function(l.base, ComplexVector(l.map.adjoint() * u));
          },
      },
      domain.variant());
}

Box bounding_box(const Domain& domain) {
  if (!symmetry(domain).is_bounded) throw PreconditionError("bounding_box: domain is unbounded");
  const auto n = domain.dim();
  Box box{RealVector(2 * n), RealVector(2 * n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    ComplexVector e = ComplexVector::Zero(n);
    e(j) = 1.0;
    box.upper(2 * j) = support_function(domain, e);
    box.lower(2 * j) = -support_function(domain, ComplexVector(-e));
    e(j) = Complex(0.0, 1.0);  // Re <w, i e_j> = Im w_j
    box.upper(2 * j + 1) = support_function(domain, e);
    box.lower(2 * j + 1) = -support_function(domain, ComplexVector(-e));
  }
  return box;
}

namespace detail {

SampleChunk propose_chunk(const Domain& domain, const Box& box, std::uint64_t seed,
                          std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = domain.dim();
  const RealVector width = box.upper - box.lower;

  SampleChunk chunk;
  std::vector<ComplexVector> accepted;
  ComplexVector z(n);
  for (std::uint32_t k = 0; k < kSampleChunkSize; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = box.lower(2 * j) + width(2 * j) * unit(rng);
      const double im = box.lower(2 * j + 1) + width(2 * j + 1) * unit(rng);
      z(j) = Complex(re, im);
    }
    if (contains(domain, z)) {
      accepted.push_back(z);
      chunk.proposal_index.push_back(k);
    }
  }
  chunk.points.resize(n, static_cast<Eigen::Index>(accepted.size()));
  for (std::size_t i = 0; i < accepted.size(); ++i) chunk.points.col(static_cast<Eigen::Index>(i)) = accepted[i];
  return chunk;
}

double ChunkedSamples::volume() const {
  return box.volume() * static_cast<double>(accepted) / static_cast<double>(proposals);
}

double ChunkedSamples::volume_stderr() const {
  const double p = static_cast<double>(accepted) / static_cast<double>(proposals);
  return box.volume() * std::sqrt(p * (1.0 - p) / static_cast<double>(proposals));
}

ChunkedSamples draw_chunks(const Domain& domain, std::size_t count, std::uint64_t seed,
                           unsigned threads) {
  if (count == 0) throw PreconditionError("sample_uniform: count must be positive");
  ChunkedSamples out;
  out.box = bounding_box(domain);
  std::uint64_t next_index = 0;
  while (out.accepted < count) {
    std::vector<SampleChunk> wave(kSampleWave);
    parallel_for(wave.size(), threads, [&](std::size_t i) {
      wave[i] = propose_chunk(domain, out.box, seed, next_index + i);
    });
    next_index += wave.size();
    for (auto& chunk : wave) {
      const auto have = static_cast<std::size_t>(chunk.points.cols());
      if (out.accepted + have >= count) {
        const auto keep = count - out.accepted;
        if (keep > 0) {
          chunk.proposals = chunk.proposal_index[keep - 1] + 1ULL;
          chunk.points.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(keep));
          chunk.proposal_index.resize(keep);
          out.accepted += keep;
          out.proposals += chunk.proposals;
          out.chunks.push_back(std::move(chunk));
        }
        break;
      }
      out.accepted += have;
      out.proposals += chunk.proposals;
      out.chunks.push_back(std::move(chunk));
    }
    const double ratio = static_cast<double>(out.accepted) / static_cast<double>(out.proposals);
    if (out.proposals >= 100000 && ratio < kMinAcceptance) {
      throw SamplingError("sample_uniform: acceptance ratio " + std::to_string(ratio) +
                          " below 1e-4; bounding box too loose");
    }
  }
  return out;
}

}  // namespace detail

SampleSet sample_uniform(const Domain& domain, std::size_t count, std::uint64_t seed,
                         unsigned threads) {
  const auto chunks = detail::draw_chunks(domain, count, seed, threads);
  SampleSet set;
  set.points.reserve(count);
  for (const auto& chunk : chunks.chunks) {
    for (Eigen::Index i = 0; i < chunk.points.cols(); ++i) set.points.emplace_back(chunk.points.col(i));
  }
  set.volume = chunks.volume();
  set.volume_stderr = chunks.volume_stderr();
  set.proposals = chunks.proposals;
  return set;
}

}  // namespace cconvex
