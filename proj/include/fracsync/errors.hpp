#pragma once

#include <stdexcept>
#include <string>

namespace fracsync {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A derivative order outside (0, 1].
class InvalidOrder : public Error {
public:
  using Error::Error;
};

/// Parameters for which the requested analysis has no well-defined answer.
class DegenerateParameters : public Error {
public:
  using Error::Error;
};

/// A prescribed closed-loop eigenvalue that is not strictly negative.
class InvalidGain : public Error {
public:
  using Error::Error;
};

/// Argument outside the supported evaluation domain.
class DomainExceeded : public Error {
public:
  using Error::Error;
};

class MissingErrors : public Error {
public:
  using Error::Error;
};

class GridMismatch : public Error {
public:
  using Error::Error;
};

class ZeroInitialSeparation : public Error {
public:
  using Error::Error;
};

class DegenerateEigenvalue : public Error {
public:
  using Error::Error;
};

}  // namespace fracsync
