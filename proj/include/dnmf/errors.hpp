#ifndef DNMF_ERRORS_HPP_
#define DNMF_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnmf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible matrix/vector shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or argument values (bad k, negative lambda, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Objects used together that do not belong together (tape vs. model).
class StateError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; carries 1-based line and column of the offending cell.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(msg), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A coefficient row collapsed to zero; that factor is unidentifiable.
class DegenerateDictionaryError : public Error {
 public:
  DegenerateDictionaryError(const std::string& msg, std::size_t row)
      : Error(msg), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// Solver ran out of iterations; carries the best iterate found so far.
class IterationLimitError : public Error {
 public:
  IterationLimitError(const std::string& msg, std::vector<double> best)
      : Error(msg), best_(std::move(best)) {}
  const std::vector<double>& best_iterate() const { return best_; }

 private:
  std::vector<double> best_;
};

}  // namespace dnmf

#endif  // DNMF_ERRORS_HPP_
