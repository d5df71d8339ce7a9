#pragma once

#include <stdexcept>
#include <string>

namespace qoptics {

// Base for every error raised by the library. Numerical failures (zero
// states, cutoff leakage) and structural failures (labels, shapes) derive
// from it so front ends can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Duplicate or malformed mode labels.
class LabelError : public Error {
 public:
  using Error::Error;
};

// Operands with different mode labels, order or cutoffs.
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

// Unknown mode, photon number out of range, invalid partition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Normalizing a state whose norm is below the zero threshold.
class ZeroStateError : public Error {
 public:
  using Error::Error;
};

// Truncation would discard more probability than the leakage budget allows.
class CutoffError : public Error {
 public:
  using Error::Error;
};

}  // namespace qoptics
