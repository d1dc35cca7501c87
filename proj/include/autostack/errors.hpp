#pragma once

#include <stdexcept>
#include <string>

namespace autostack {

// All library failures throw Error. `code` is a stable machine-readable tag
// (e.g. "UnknownLetter", "StepLimitExceeded"); `what()` carries the details.
struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

[[noreturn]] inline void raise(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace autostack
