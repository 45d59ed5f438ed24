#pragma once

#include <stdexcept>
#include <string>

namespace aml {

// Error taxonomy shared by the C API and the CLI; enum values double as
// process exit codes.
enum class ErrorKind {
  config = 2,
  data = 3,
  train = 4,
  assertion = 5,
  internal = 70,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string &m) : Error(ErrorKind::config, m) {}
};

struct DataError : Error {
  explicit DataError(const std::string &m) : Error(ErrorKind::data, m) {}
};

struct TrainError : Error {
  explicit TrainError(const std::string &m) : Error(ErrorKind::train, m) {}
};

struct AssertionError : Error {
  explicit AssertionError(const std::string &m) : Error(ErrorKind::assertion, m) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string &m) : Error(ErrorKind::internal, m) {}
};

// Rethrows with a context prefix, preserving the error kind.
[[noreturn]] inline void rethrow_tagged(const Error &e, const std::string &context) {
  const std::string msg = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::config: throw ConfigError(msg);
    case ErrorKind::data: throw DataError(msg);
    case ErrorKind::train: throw TrainError(msg);
    case ErrorKind::assertion: throw AssertionError(msg);
    case ErrorKind::internal: break;
  }
  throw InternalError(msg);
}

}  // namespace aml
