#pragma once

#include <stdexcept>
#include <string>

namespace mldiff {

// Precondition violated by the caller (odd n, empty sample, negative count...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. The message names the offending row/column.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (family, framework) pair missing from the hyperparameter registry.
class NotInRegistry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// External adapter failed: bad exit status, timeout, or malformed predictions.
// diagnostics() holds the captured stdout/stderr of the adapter process.
class AdapterError : public std::runtime_error {
 public:
  enum class Kind { launch, exit_status, timeout, malformed };

  AdapterError(Kind kind, const std::string& what, std::string diagnostics = {})
      : std::runtime_error(what), kind_(kind), diagnostics_(std::move(diagnostics)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  Kind kind_;
  std::string diagnostics_;
};

}  // namespace mldiff
