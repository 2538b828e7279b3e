#pragma once

#include <stdexcept>
#include <string>

namespace cbs {

/// Bad arguments, malformed files, invalid configuration. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation that cannot proceed numerically. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A tuple that does not determine a model (coincident points, rank-deficient
/// design matrix). Callers inside the samplers catch this and resample.
class DegenerateTupleError : public NumericalError {
 public:
  explicit DegenerateTupleError(const std::string& what) : NumericalError(what) {}
};

/// Raised by generate_sample after too many consecutive degenerate refits;
/// the pipeline reacts by drawing a fresh initialization.
class SampleFailure : public NumericalError {
 public:
  explicit SampleFailure(const std::string& what) : NumericalError(what) {}
};

}  // namespace cbs
