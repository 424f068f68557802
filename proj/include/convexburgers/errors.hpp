#pragma once

#include <stdexcept>
#include <string>

namespace convexburgers {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Initial data was not Galilean-normalized before integration.
class NonZeroMean : public Error {
 public:
  using Error::Error;
};

class InvalidTime : public Error {
 public:
  using Error::Error;
};

class TimeOutOfRange : public Error {
 public:
  using Error::Error;
};

// The inner sup of the conjugate is not concave and multistart disagrees.
class NonConcaveInner : public Error {
 public:
  using Error::Error;
};

class StateOutOfDomain : public Error {
 public:
  using Error::Error;
};

// A dual field violates d_x W <= 1 where it carries flux.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

class BadOptions : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace convexburgers
