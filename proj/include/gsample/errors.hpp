#ifndef GSAMPLE_ERRORS_HPP
#define GSAMPLE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gsample {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph, matrix shape or index.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A filter response or parameter outside its valid domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is numerically singular.
class RankError : public Error {
 public:
  using Error::Error;
};

/// The sampled nodes cannot identify the requested frequency band.
class ObservabilityError : public Error {
 public:
  using Error::Error;
};

/// A stopping criterion or constraint cannot be met.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double best_cost)
      : Error(what), best_cost_(best_cost) {}
  explicit InfeasibleError(const std::string& what)
      : InfeasibleError(what, 0.0) {}

  double best_cost() const { return best_cost_; }

 private:
  double best_cost_;
};

/// NaN/Inf produced during an iterative computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsample

#endif  // GSAMPLE_ERRORS_HPP
