#pragma once

#include <stdexcept>
#include <string>

namespace bems {

// Invalid physical or domain inputs; message names the offending field.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad run configuration: normalizers, schedules, file parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse: step after done, composing a reward for the rule-based
// condition, aggregating an empty list.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical failure: fixed-point non-convergence, non-finite losses.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File/CSV parse failure; message carries row/column context.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bems
