#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lapsparse {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied data does not hold.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A text input could not be parsed. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The request exceeds a configured resource guard (e.g. the dense limit).
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace lapsparse
