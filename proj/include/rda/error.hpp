#pragma once

#include <stdexcept>
#include <string>

namespace rda {

/// Violated precondition or malformed value (bad index, bad parameter range,
/// dimension mismatch, inputs exceeding a documented capacity).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation with no defined result on the given inputs: KL support
/// violation, degenerate projection, empty grid intersection, undefined
/// transition-matrix row, non-finite training state.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data file (wrong magic, wrong record size, inconsistent counts).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Underlying read/write failure (missing file, truncated stream).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rda
