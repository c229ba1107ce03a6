#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mwsp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or structurally unusable input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Token that is not an integer, reported with its 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Cross-file inconsistency such as an edge leaving its graph.
class IntegrityError : public Error {
 public:
  IntegrityError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a structure that must be consistent by construction is not.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mwsp
