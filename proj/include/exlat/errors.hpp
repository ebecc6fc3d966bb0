#pragma once

#include <stdexcept>

namespace exlat {

/// A computation could not produce a meaningful result for its input (too
/// few samples, no surviving critical points, inconsistent extrema, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant was violated.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace exlat
