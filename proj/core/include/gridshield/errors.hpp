#pragma once

#include <stdexcept>
#include <string>

namespace gridshield {

/// Malformed or inconsistent input (grid, override, CAS list or plan files).
class InputError : public std::runtime_error {
 public:
  enum class Kind { syntax, reference, domain };

  InputError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// The LP engine failed to certify an optimal dispatch.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No admissible attack set remains under the active exclusion cuts.
class ExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A brute-force routine refused an input beyond its size guard.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridshield
