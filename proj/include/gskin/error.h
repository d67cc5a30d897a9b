#pragma once

#include <stdexcept>
#include <string>

namespace gskin {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: dimension mismatches, violated invariants, out-of-range
// values. The CLI maps these to its input-validation exit code.
struct ValidationError : Error {
  using Error::Error;
};

// Malformed file content. Carries the 1-based line number when known.
struct ParseError : ValidationError {
  ParseError(const std::string& path, long line, const std::string& what)
      : ValidationError(path + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  explicit ParseError(const std::string& what) : ValidationError(what), line_number(0) {}
  long line_number;
};

// Filesystem failures (missing file, unwritable path).
struct IoError : Error {
  using Error::Error;
};

}  // namespace gskin
