#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace repind {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula or constraint text. `position` is a 0-based offset
/// into the parsed string.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A knowledge base lies outside the domain of an inference procedure
/// (for example, maximum entropy is not attained).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configured resource limit (DNF size, scan limit, cycle cap) was hit.
class LimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace repind
