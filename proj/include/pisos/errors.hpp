#pragma once

#include <stdexcept>
#include <string>

namespace pisos {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A product of two expressions that both carry decision variables.
class AffineDegreeViolation : public Error {
 public:
  using Error::Error;
};

class InvalidBounds : public Error {
 public:
  using Error::Error;
};

class UnboundDecisionVar : public Error {
 public:
  using Error::Error;
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class IntervalMismatch : public Error {
 public:
  using Error::Error;
};

class BadInterval : public Error {
 public:
  using Error::Error;
};

// Program used in the wrong lifecycle state (e.g. declaring after solve).
class StateError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class InfeasibleNoSolution : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace pisos
