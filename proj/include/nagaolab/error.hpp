#pragma once

#include <stdexcept>
#include <string>

namespace nagaolab {

// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  parse,          // malformed polynomial / transform / config
  bad_curve,      // non-squarefree or out-of-range curve model
  bad_prime,      // a prime of bad reduction was passed to a trace routine
  cap_exceeded,   // a configured size cap was hit
  cache_corrupt,  // a trace cache file failed validation
  domain,         // precondition violated by the caller
  internal        // an invariant that should be impossible was broken
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nagaolab
