#pragma once

#include <stdexcept>
#include <string>

namespace tileopt {

/// Bad input: malformed documents, invalid nests, unsupported parameters.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A search or enumeration was refused because it exceeds its guard.
class LimitError : public InputError {
public:
  using InputError::InputError;
};

/// Something that should be impossible happened (solver failure, duality
/// gap, oracle mismatch).
class InternalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace tileopt
