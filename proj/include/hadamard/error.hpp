#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hadamard {

// Shapes of two operands are incompatible.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix entry or a computed quantity is NaN/Inf.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ||X|| = 0 where a relative quantity is requested.
class ZeroInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// optimal_step called with a zero gradient.
class ZeroGradientError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Budget R < 2 for the identity construction.
class BudgetTooSmallError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. `line` is 1-based; 0 when the location is a byte
// offset (binary PGM) stored in `offset`.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset = 0)
      : std::runtime_error(what), line_(line), offset_(offset) {}
  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

}  // namespace hadamard
