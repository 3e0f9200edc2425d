#pragma once

#include <stdexcept>
#include <string>

namespace cmplab {

/// Dimension mismatch between environment, policy, reward or distribution.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation needs a strictly positive (interior) environment or matrix.
class InteriorityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// m^n exceeds the configured enumeration cap.
class EnumerationCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Finite horizon T=1 with an initial distribution lacking full support.
class DegenerateHorizonError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Linear solve or iterative method failed to produce a usable answer.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (environment file, config, report).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmplab
