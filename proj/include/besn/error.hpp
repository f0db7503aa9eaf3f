#pragma once

#include <stdexcept>
#include <string>

namespace besn {

// Broad failure classes; the CLI maps these onto exit codes.
enum class ErrorKind {
  Usage,      // bad flags or inconsistent configuration
  Data,       // unreadable/invalid input files, manifests, samples
  Numerical,  // factorization failure, non-finite values
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(ErrorKind::Usage, "invalid config field '" + field + "': " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
      : Error(ErrorKind::Usage, what + ": expected " + std::to_string(expected) +
                                    ", got " + std::to_string(actual)) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Numerical: return 4;
  }
  return 1;
}

}  // namespace besn
