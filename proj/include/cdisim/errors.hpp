#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace cdisim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query fell outside the validity window of a model.
class RangeError : public Error {
 public:
  RangeError(std::string axis, double value, double lo, double hi)
      : Error(format(axis, value, lo, hi)), axis_(std::move(axis)), value_(value), lo_(lo), hi_(hi) {}

  const std::string& axis() const { return axis_; }
  double value() const { return value_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  static std::string format(const std::string& axis, double value, double lo, double hi) {
    std::ostringstream os;
    os.precision(17);
    os << axis << " = " << value << " outside valid range [" << lo << ", " << hi << "]";
    return os.str();
  }

  std::string axis_;
  double value_, lo_, hi_;
};

/// Arguments violate a mathematical precondition (e.g. signal above pump frequency).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An object could not be built because its invariants do not hold.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Width requested of a signal that has no peak.
class UndefinedWidthError : public Error {
 public:
  using Error::Error;
};

/// Input sampled too coarsely for the requested analysis.
class SamplingError : public Error {
 public:
  SamplingError(const std::string& what, double required_step_um)
      : Error(what), required_step_um_(required_step_um) {}
  double required_step_um() const { return required_step_um_; }

 private:
  double required_step_um_;
};

/// No admissible point exists in a search domain.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Configuration text failed to parse or validate.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, int line, const std::string& message)
      : Error(format(field, line, message)), field_(field), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& message) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    if (!field.empty()) os << "'" << field << "': ";
    os << message;
    return os.str();
  }

  std::string field_;
  int line_;
};

}  // namespace cdisim
