#pragma once

#include <stdexcept>
#include <string>

namespace echomap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input geometry too degenerate to define the requested object.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class SourceOutsideRoom : public Error {
 public:
  using Error::Error;
};

class MicOutsideRoom : public Error {
 public:
  using Error::Error;
};

class CoincidentSourceMic : public Error {
 public:
  using Error::Error;
};

/// Every sample of an impulse response sits below the absolute floor.
class EmptySignal : public Error {
 public:
  using Error::Error;
};

/// Microphone triple is (nearly) collinear; the trilateration system is singular.
class SingularGeometry : public Error {
 public:
  using Error::Error;
};

/// The planner exhausted its stop budget without closing the room.
class MaxStepsExceeded : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace echomap
