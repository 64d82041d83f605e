#pragma once

#include <stdexcept>
#include <string>

namespace relcloud {

/// Invalid argument values (bad probabilities, empty inputs, matrix shape).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Instance exceeds a documented hard limit of an exponential routine.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An id does not resolve against the universe/document it points into.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input document; `path()` names the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace relcloud
