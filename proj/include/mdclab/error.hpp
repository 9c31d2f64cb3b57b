#pragma once

#include <stdexcept>
#include <string>

namespace mdclab {

/// Base class for all library errors. A failed integrity check is *not* an
/// error (open_verify reports reject as a normal outcome); errors signal
/// misuse, bad input, or exceeded capacities.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Width mismatch between operands, or a width unsupported by the operation.
class width_error : public error {
 public:
  using error::error;
};

/// Index or parameter outside an operation's documented range.
class bounds_error : public error {
 public:
  using error::error;
};

/// Capacity exceeded: table cipher too wide, message over the mode's block
/// limit, sequence-number space exhausted.
class capacity_error : public error {
 public:
  using error::error;
};

/// Inconsistent or unsupported configuration (cipher backend, IV policy).
class config_error : public error {
 public:
  using error::error;
};

/// Malformed serialized data (ciphertext container, hex strings).
class format_error : public error {
 public:
  using error::error;
};

}  // namespace mdclab
