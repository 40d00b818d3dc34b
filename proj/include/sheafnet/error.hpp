#pragma once

#include <stdexcept>
#include <string>

namespace sheafnet {

/// Malformed input documents, unknown identifiers, dimension mismatches.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural law was violated (antisymmetry, functoriality, classification).
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive enumeration would exceed its configured bound.
class BoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extended-real arithmetic with no defined value, such as -inf minus -inf.
class IndeterminateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace sheafnet
