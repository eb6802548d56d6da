#pragma once

#include <stdexcept>
#include <string>

namespace weilks {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition does not hold for the given input.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Scalars from towers that cannot be reconciled, or a request that would
// need more than two quadratic generators.
class TowerError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero") {}
};

// A bilinear/Hermitian form turned out to be degenerate. `index` is the
// first basis position of the radical that was hit.
class DegenerateForm : public Error {
 public:
  DegenerateForm(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// A bounded search (alpha candidates, idempotent factors) found nothing.
// Not a refutation.
class SearchExhausted : public Error {
 public:
  using Error::Error;
};

// An internal exact identity failed to hold. Always indicates a bug.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace weilks
