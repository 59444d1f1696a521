#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynalloc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed numeric input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Parameters or scenario settings that cannot be used to build a run.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. time outside a trajectory).
class DomainError : public Error {
 public:
  using Error::Error;
};

class IdentificationError : public Error {
 public:
  using Error::Error;
};

/// Two traces cannot be compared tick by tick.
class ComparisonError : public Error {
 public:
  using Error::Error;
};

/// A simulation produced a non-finite value.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t tick)
      : Error(what + " (tick " + std::to_string(tick) + ")"), tick_(tick) {}

  std::size_t tick() const noexcept { return tick_; }

 private:
  std::size_t tick_;
};

}  // namespace dynalloc
