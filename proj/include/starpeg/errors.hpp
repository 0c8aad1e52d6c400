#ifndef STARPEG_ERRORS_HPP
#define STARPEG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace starpeg {

// Input or precondition violations (bad coefficients, radius out of range, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The multi-start search found nothing although an existence theorem
// guarantees a solution: the seed grid was too coarse.
class SolverCoverageFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenericityFailure : public std::runtime_error {
 public:
  GenericityFailure(const std::string& what, int count, bool degenerate_family)
      : std::runtime_error(what), count_(count), degenerate_family_(degenerate_family) {}

  int count() const { return count_; }
  bool degenerate_family() const { return degenerate_family_; }

 private:
  int count_;
  bool degenerate_family_;
};

class PositivityLost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrackingLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InjectivityRadiusExceeded : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EvennessRequired : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateConfiguration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace starpeg

#endif  // STARPEG_ERRORS_HPP
