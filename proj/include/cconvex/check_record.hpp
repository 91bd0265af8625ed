#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "cconvex/linalg.hpp"

namespace cconvex {

/// One verified inequality instance: lower - tol <= value <= upper + tol.
/// One-sided checks use an infinite bound on the absent side.
struct CheckRecord {
  std::string check;
  std::string domain_hash;
  std::size_t index = 0;  // position of the record in its report
  std::optional<std::size_t> point_index;
  std::optional<std::size_t> vector_index;
  ComplexVector z;
  std::optional<ComplexVector> x;
  double lower = -std::numeric_limits<double>::infinity();
  double value = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::optional<double> error_bar;
  std::optional<double> wall_seconds;
  std::string note;
  bool pass = false;
};

inline bool within(double lower, double value, double upper, double tolerance) {
  return lower - tolerance <= value && value <= upper + tolerance;
}

inline void settle(CheckRecord& record) {
  record.pass = within(record.lower, record.value, record.upper, record.tolerance);
}

}  // namespace cconvex
