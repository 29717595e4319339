#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>

#include "deltaiss/json_support.hpp"

namespace deltaiss::plant {

// Open-loop excitation signal description. Realized signals are pure
// functions of (spec, t): counter-based RNG, so evaluation order never
// matters and identical seeds give identical signals on every platform.
struct ExcitationSpec {
  enum class Kind { Multisine, PiecewiseConstant };

  Kind kind = Kind::Multisine;
  Eigen::VectorXd amplitude;  // per-channel bound; a zero entry means that
                              // channel is deliberately unexcited
  int num_frequencies = 8;    // multisine
  double hold_period = 0.5;   // piecewise-constant
  std::uint64_t seed = 0;

  void validate() const;

  json to_json() const;
  static ExcitationSpec from_json(const json& j);
};

using InputSignal = std::function<Eigen::VectorXd(double)>;

// Deterministic continuous-time signal for the given spec.
InputSignal realize(const ExcitationSpec& spec);

std::string kind_name(ExcitationSpec::Kind kind);
ExcitationSpec::Kind kind_from_name(const std::string& name);

}  // namespace deltaiss::plant
