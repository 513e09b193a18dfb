#pragma once

#include <stdexcept>
#include <string>

namespace regforge {

// Base class for all toolkit errors. Subclasses name the failure mode so
// callers (and the CLI exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class NotHurwitz : public Error {
 public:
  using Error::Error;
};

class NotStabilizable : public Error {
 public:
  using Error::Error;
};

class NotDetectable : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class InvalidFrequencies : public Error {
 public:
  using Error::Error;
};

class ResolventPole : public Error {
 public:
  using Error::Error;
};

class NonRealResidue : public Error {
 public:
  using Error::Error;
};

class TransmissionZero : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class HashMismatch : public Error {
 public:
  using Error::Error;
};

class StepRejected : public Error {
 public:
  using Error::Error;
};

}  // namespace regforge
