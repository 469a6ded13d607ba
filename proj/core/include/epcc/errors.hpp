#pragma once

#include <stdexcept>
#include <string>

namespace epcc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched vector/matrix dimensions or out-of-range sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A response or bank with zero variance; constant profiles are a data
/// quality failure upstream of the chart, not a value we propagate as NaN.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// A calibration target that cannot be met (negative discriminant,
/// C_h^2 < 0, requested root outside its convexity range, or an
/// ambiguous two-root request).
class InfeasibleCalibrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace epcc
