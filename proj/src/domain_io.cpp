#include "cconvex/domain_io.hpp"

#include <cstdio>

namespace cconvex {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const Json& require(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError(std::string("domain json: missing key '") + key + "'");
  }
  return obj.at(key);
}

RealVector reals_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("domain json: expected an array of reals");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError("domain json: expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json reals_to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

Json complex_to_json(Complex value) { return Json::array({value.real(), value.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw SchemaError("expected a complex number as [re, im] or a real number");
}

Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("expected a non-empty array of complex numbers");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("expected a non-empty array of matrix rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto first = vector_from_json(j[0]);
  ComplexMatrix m(rows, first.size());
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = vector_from_json(j[static_cast<std::size_t>(r)]);
    if (row.size() != m.cols()) throw SchemaError("matrix rows differ in length");
    m.row(r) = row.transpose();
  }
  return m;
}

Json domain_to_json(const Domain& domain) {
  Json params = std::visit(
      overloaded{
          [](const Ball& b) { return Json{{"center", vector_to_json(b.center)}, {"radius", b.radius}}; },
          [](const Polydisc& p) {
            return Json{{"center", vector_to_json(p.center)}, {"radii", reals_to_json(p.radii)}};
          },
          [](const WeightedDiamond& d) { return Json{{"radii", reals_to_json(d.radii)}}; },
          [](const ComplexEllipsoid& e) { return Json{{"exponents", e.exponents}}; },
          [](const KoebeSlitPlane&) { return Json::object(); },
          [](const Product& p) {
            Json factors = Json::array();
            for (const auto& f : p.factors) factors.push_back(domain_to_json(f));
            return Json{{"factors", factors}};
          },
          [](const LinearImage& l) {
            return Json{{"base", domain_to_json(l.base)},
                        {"map", matrix_to_json(l.map)},
                        {"shift", vector_to_json(l.shift)}};
          },
      },
      domain.variant());
  return Json{{"variant", to_string(domain.kind())}, {"params", params}};
}

Domain domain_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("domain json: expected an object");
  const auto variant = require(j, "variant").get<std::string>();
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  if (!params.is_object()) throw SchemaError("domain json: 'params' must be an object");

  if (variant == "ball") {
    const double radius = params.contains("radius") ? params.at("radius").get<double>() : 1.0;
    if (params.contains("center")) return Domain::ball(vector_from_json(params.at("center")), radius);
    const auto dim = require(params, "dim").get<Eigen::Index>();
    return Domain::ball(ComplexVector::Zero(dim), radius);
  }
  if (variant == "polydisc") {
    RealVector radii = reals_from_json(require(params, "radii"));
    ComplexVector center = params.contains("center") ? vector_from_json(params.at("center"))
                                                     : ComplexVector::Zero(radii.size());
    return Domain::polydisc(std::move(center), std::move(radii));
  }
  if (variant == "weighted_diamond") return Domain::weighted_diamond(reals_from_json(require(params, "radii")));
  if (variant == "complex_ellipsoid") {
    const auto& e = require(params, "exponents");
    if (!e.is_array()) throw SchemaError("complex_ellipsoid: 'exponents' must be an array");
    std::vector<int> exponents;
    for (const auto& m : e) {
      if (!m.is_number_integer()) throw SchemaError("complex_ellipsoid: exponents must be integers");
      exponents.push_back(m.get<int>());
    }
    return Domain::complex_ellipsoid(std::move(exponents));
  }
  if (variant == "koebe_slit_plane") return Domain::koebe_slit_plane();
  if (variant == "product") {
    const auto& f = require(params, "factors");
    if (!f.is_array()) throw SchemaError("product: 'factors' must be an array");
    std::vector<Domain> factors;
    for (const auto& item : f) factors.push_back(domain_from_json(item));
    return Domain::product(std::move(factors));
  }
  if (variant == "linear_image") {
    Domain base = domain_from_json(require(params, "base"));
    ComplexMatrix map = matrix_from_json(require(params, "map"));
    ComplexVector shift = params.contains("shift") ? vector_from_json(params.at("shift"))
                                                   : ComplexVector::Zero(base.dim());
    return Domain::linear_image(std::move(base), std::move(map), std::move(shift));
  }
  throw SchemaError("domain json: unknown variant '" + variant + "'");
}

std::uint64_t domain_hash(const Domain& domain) {
  const std::string text = domain_to_json(domain).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string domain_hash_hex(const Domain& domain) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(domain_hash(domain)));
  return buf;
}

}  // namespace cconvex
