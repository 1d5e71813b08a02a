#ifndef PSAGA_ERROR_HPP
#define PSAGA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psaga {

/// Invalid caller-supplied argument (bad fraction, unknown loss, mu >= L, ...).
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed LIBSVM input. Carries the 1-based line number of the offending line.
class parse_error : public std::runtime_error {
 public:
  parse_error(std::size_t line, const std::string &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An iterative routine failed to reach its tolerance. For the logistic prox the
/// last root bracket is attached so callers can inspect how far it got.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string &what, double lo = 0.0, double hi = 0.0)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}

  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

}  // namespace psaga

#endif
