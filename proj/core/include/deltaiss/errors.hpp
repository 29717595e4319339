#pragma once

#include <stdexcept>
#include <string>

namespace deltaiss {

// Base for everything this library throws on purpose. `kind()` is a stable
// machine-readable tag; `what()` is for humans.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& msg) : Error("dimension-mismatch", msg) {}
};

struct InvalidDegreeRangeError : Error {
  explicit InvalidDegreeRangeError(const std::string& msg) : Error("invalid-degree-range", msg) {}
};

struct ZeroDegreeEntryError : Error {
  explicit ZeroDegreeEntryError(const std::string& msg) : Error("zero-degree-entry", msg) {}
};

struct NonfiniteStateError : Error {
  NonfiniteStateError(const std::string& msg, double when)
      : Error("nonfinite-state", msg), time(when) {}
  double time;
};

struct IdenticalInitialConditionsError : Error {
  explicit IdenticalInitialConditionsError(const std::string& msg)
      : Error("identical-initial-conditions", msg) {}
};

struct DuplicateNameError : Error {
  explicit DuplicateNameError(const std::string& msg) : Error("duplicate-name", msg) {}
};

struct UndeclaredVariableError : Error {
  explicit UndeclaredVariableError(const std::string& msg)
      : Error("reference-to-undeclared-variable", msg) {}
};

struct InconsistentEqualitiesError : Error {
  InconsistentEqualitiesError(const std::string& msg, int row, double residual)
      : Error("inconsistent-equalities", msg), worst_row(row), worst_residual(residual) {}
  int worst_row;
  double worst_residual;
};

struct MissingAssignmentError : Error {
  explicit MissingAssignmentError(const std::string& msg)
      : Error("missing-variable-assignment", msg) {}
};

struct NumericalFailureError : Error {
  explicit NumericalFailureError(const std::string& msg) : Error("numerical-failure", msg) {}
};

struct RichnessError : Error {
  explicit RichnessError(const std::string& msg) : Error("rank-precondition-violated", msg) {}
};

struct DegreeTooLowError : Error {
  explicit DegreeTooLowError(const std::string& msg) : Error("degree-too-low", msg) {}
};

struct InfeasibleError : Error {
  InfeasibleError(const std::string& msg, double achieved_margin, std::string worst_block)
      : Error("sdp-infeasible", msg),
        margin(achieved_margin),
        most_violated(std::move(worst_block)) {}
  double margin;
  std::string most_violated;
};

struct VerificationFailedError : Error {
  explicit VerificationFailedError(const std::string& msg)
      : Error("verification-failed", msg) {}
};

struct MissingRhoBoundError : Error {
  explicit MissingRhoBoundError(const std::string& msg) : Error("missing-rho-bound", msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("config-error", msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("io-error", msg) {}
};

}  // namespace deltaiss
