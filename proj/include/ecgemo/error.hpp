#pragma once

#include <stdexcept>
#include <string>

namespace ecgemo {

/// Category of a failure, mapped one-to-one onto CLI exit codes.
enum class ErrorKind { Usage = 1, Io = 2, Data = 3, Config = 4 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Invalid argument to a library operation (bad cutoff, even tap count, ...).
class ParameterError : public Error {
public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Operation called on an object that is not in a usable state.
class UsageError : public Error {
public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Malformed or semantically invalid input data.
class DataError : public Error {
public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Io: return "io";
    case ErrorKind::Data: return "data";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace ecgemo
