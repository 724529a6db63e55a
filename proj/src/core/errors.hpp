#ifndef SPHEREPROX_ERRORS_HPP
#define SPHEREPROX_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace sphereprox {

// Error taxonomy shared by the whole core. The C ABI layer maps each class
// to one status code, so new classes need a matching code in sphereprox.h.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments that violate a precondition (non-unit coordinates, alpha outside
// [0,1], schedules of the wrong shape, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

// Antipodal or near-antipodal configurations where the connecting geodesic
// (and hence interpolation, projection, log map) stops being unique.
class DegenerateGeodesicError : public Error {
 public:
  using Error::Error;
};

// Evaluation or differentiation requested outside the admissible domain,
// or on a function that is infinite there.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation is well defined but only implemented for a restricted setting
// (grid oracles and tie-set searches exist for 3d ambient space only).
class NotImplementedError : public Error {
 public:
  using Error::Error;
};

// Iterative solver ran out of budget before hitting its tolerance. Carries
// the best iterate found so callers can keep partial results.
class ConvergenceFailureError : public Error {
 public:
  ConvergenceFailureError(const std::string& what, std::vector<double> best)
      : Error(what), best_iterate(std::move(best)) {}
  std::vector<double> best_iterate;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

// Filesystem trouble while reading configs or writing outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sphereprox

#endif
