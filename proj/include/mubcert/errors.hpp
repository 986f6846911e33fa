#pragma once

#include <stdexcept>
#include <string>

namespace mubcert {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A configured cap (degree, basis size, matrix dimension, bit size) was hit.
// `progress` records how far the computation got, e.g. the last completed degree.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::string cap, long progress = -1)
      : Error(what), cap_(std::move(cap)), progress_(progress) {}
  const std::string& cap() const { return cap_; }
  long progress() const { return progress_; }

 private:
  std::string cap_;
  long progress_;
};

}  // namespace mubcert
