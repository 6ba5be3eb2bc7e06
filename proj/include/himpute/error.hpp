#pragma once

#include <stdexcept>
#include <string>

namespace himpute {

/// Malformed input file. The message names the offending line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates an operation's precondition (too few observations,
/// shape mismatch, out-of-range parameter).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace himpute
