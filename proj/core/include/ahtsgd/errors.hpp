#ifndef AHTSGD_ERRORS_HPP
#define AHTSGD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ahtsgd {

// Invalid argument to a library call (out-of-range alpha, eta <= 0, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A curvature probe produced non-finite values; callers may fall back to
// the last valid sharpness.
class CurvatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A training step produced a non-finite loss or otherwise diverged.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `offset` is the byte position that failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long long offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  long long offset() const { return offset_; }

 private:
  long long offset_;
};

// Filesystem failure, carries the path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ahtsgd

#endif  // AHTSGD_ERRORS_HPP
