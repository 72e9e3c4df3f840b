#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shiftlab {

// Index or window outside the declared range of an object.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An operation was called on an object that does not satisfy its
// requirements (e.g. inverting a unilateral shift).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed specification text. `position` is a 0-based character offset.
class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t position, const std::string& message)
      : std::invalid_argument("at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace shiftlab
