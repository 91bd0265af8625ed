#pragma once

#include <stdexcept>
#include <string>

namespace cconvex {

// Mismatched vector/matrix/domain dimensions.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A configuration or serialized document does not match its schema.
struct SchemaError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A documented precondition does not hold (point outside the domain, zero
// direction, non-unitary basis, unbounded domain where one is required, ...).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The requested quantity has no implementation for this domain variant.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed to reach its accuracy contract.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejection sampling accepted too few proposals.
struct SamplingError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace cconvex
