#pragma once

#include <stdexcept>
#include <string>

namespace netcom {

/// Caller passed a value outside an operation's contract (dimension mismatch, bad index, ...).
class argument_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An internal invariant was violated (e.g. decoding with a singular combined matrix).
class integrity_error : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Channel or timing estimation could not produce a result from the given observation.
class estimation_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration key or value; the message names the offending key.
class usage_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input (matrix blocks, catalog files, CSV).
class parse_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A Monte Carlo run had to stop (e.g. too many stalled rounds at one Eb/N0 point).
class simulation_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace netcom
