#pragma once

#include <stdexcept>
#include <string>

namespace numclaim {

// Exit-code bearing error categories shared by the library and the CLI.
enum class ErrorKind { Config, Data, Service };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class ServiceError : public Error {
 public:
  explicit ServiceError(const std::string& what) : Error(ErrorKind::Service, what) {}
};

// 0 success, 2 config, 3 data, 4 external service.
constexpr int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Service: return 4;
  }
  return 1;
}

}  // namespace numclaim
