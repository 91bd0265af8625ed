#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cconvex/domain.hpp"

namespace cconvex {

using Json = nlohmann::json;

// Complex numbers are written as [re, im]; readers also accept a bare real.
Json complex_to_json(Complex value);
Complex complex_from_json(const Json& j);
Json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j);
Json matrix_to_json(const ComplexMatrix& m);  // list of rows
ComplexMatrix matrix_from_json(const Json& j);

/// {"variant": <name>, "params": {...}}; see docs/formats.md.
Json domain_to_json(const Domain& domain);

/// Throws std::invalid_argument (or a subclass) on schema violations.
Domain domain_from_json(const Json& j);

/// FNV-1a hash of the canonical serialization.
std::uint64_t domain_hash(const Domain& domain);
std::string domain_hash_hex(const Domain& domain);

}  // namespace cconvex
