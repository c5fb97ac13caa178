#pragma once

#include <stdexcept>
#include <string>

namespace tripurpose {

// Failure categories surfaced to callers. The CLI maps these onto process
// exit codes, so every throw site picks the kind deliberately.
enum class ErrorKind {
  Io,                    // unreadable or unwritable file
  CorruptInput,          // too many malformed rows to trust the file
  Schema,                // structurally wrong file contents
  Config,                // bad configuration or arguments
  DegenerateDistribution,// all-zero or non-finite probability input
  InvalidObjective,      // NaN objective handed to the optimizer
  IncompleteInference,   // unlabeled staypoint where labels are required
  EmptyCorpus,           // operation needs at least one staypoint
  StageDependency,       // required upstream artifact missing
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message) {
  throw Error(kind, std::move(message));
}

}  // namespace tripurpose
