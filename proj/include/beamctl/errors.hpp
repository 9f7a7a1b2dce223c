#pragma once

#include <stdexcept>
#include <string>

namespace beamctl {

/// Bad argument to a public operation (M = 0, non-reduced fraction, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Control region that does not fit inside (0,1).
class InvalidRegion : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dual-space weight sin^2(mu_m xi) vanished.
class DegenerateWeight : public std::domain_error {
 public:
  DegenerateWeight(const std::string& what, int mode)
      : std::domain_error(what), mode_(mode) {}
  int mode() const { return mode_; }

 private:
  int mode_;
};

/// Sampled input too coarse for the requested computation.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gramian singular to working tolerance and no regularization was given.
class NonInvertibleGramian : public std::runtime_error {
 public:
  NonInvertibleGramian(const std::string& what, int mode)
      : std::runtime_error(what), mode_(mode) {}
  /// Mode index carrying the largest share of the near-null eigenvector.
  int mode() const { return mode_; }

 private:
  int mode_;
};

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace beamctl
