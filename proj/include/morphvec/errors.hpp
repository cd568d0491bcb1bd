#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace morphvec {

// Malformed input data. Line numbers are 1-based; 0 means "not line specific".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(format(source, line, what)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line, const std::string& what) {
    std::string out = source;
    if (line > 0) out += ":" + std::to_string(line);
    if (!out.empty()) out += ": ";
    return out + what;
  }

  std::size_t line_;
};

// A scheme or pipeline was asked to run without something it needs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failures (open, write) carrying the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace morphvec
