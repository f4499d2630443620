#pragma once

#include <stdexcept>
#include <string>

namespace sarcasm {

enum class ErrorKind {
  Io,              // file missing or unreadable
  Parse,           // malformed input bytes
  InvalidArgument, // precondition violated by the caller
  Config,          // invalid configuration value or combination
  NotFound,        // lookup miss where a value is mandatory
  Runtime,         // failure inside a computation stage
};

/// Exception carrying a machine-readable kind and an optional pipeline stage tag.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string stage = {})
      : std::runtime_error(stage.empty() ? message : "[" + stage + "] " + message),
        kind_(kind),
        stage_(std::move(stage)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorKind kind_;
  std::string stage_;
};

}  // namespace sarcasm
