#pragma once

#include <stdexcept>
#include <string>

namespace bqr {

// Every failure the library reports derives from bqr::Error so callers can
// catch one type at the command boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class InsufficientDraws : public Error {
 public:
  using Error::Error;
};

class EmptyDraws : public Error {
 public:
  using Error::Error;
};

class MissingColumn : public Error {
 public:
  using Error::Error;
};

class NonBinaryOutcome : public Error {
 public:
  using Error::Error;
};

class EmptyAfterFiltering : public Error {
 public:
  using Error::Error;
};

class ZeroVariance : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised by a chain driver when a sweep fails; keeps the iteration index.
class ChainError : public Error {
 public:
  ChainError(long iteration, const std::string& what)
      : Error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace bqr
