#pragma once

#include <stdexcept>
#include <string>

namespace cauchygof {

// Common base so callers can catch everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside its documented domain (beta <= 0, a <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// The sample cannot be standardized, e.g. a zero half-interquartile range.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

// Input data could not be turned into a usable sample.
class DataError : public Error {
 public:
  using Error::Error;
};

// An iterative estimator failed to converge. Carries the best iterate found.
class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, double best_location,
                    double best_scale)
      : Error(what), best_location(best_location), best_scale(best_scale) {}

  double best_location;
  double best_scale;
};

// A numerical integral did not reach its tolerance. Carries the estimate.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate, double error)
      : Error(what), estimate(estimate), error(error) {}

  double estimate;
  double error;
};

}  // namespace cauchygof
