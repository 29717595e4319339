#pragma once

#include <optional>
#include <vector>

#include "deltaiss/verify/closed_loop.hpp"

namespace deltaiss::verify {

// Integrated decay bound along a trace:
//   identical inputs:  V(t) <= V(0) e^{-eps t} (1 + slack)
//   differing inputs:  V(t) <= [V(0) e^{-eps t}
//                               + (rho/eps) sup|du|^2 (1 - e^{-eps t})] (1 + slack)
struct GronwallResult {
  bool pass = false;
  double worst_margin = 0.0;      // min over samples of bound - V
  double worst_margin_rel = 0.0;  // relative to the bound scale
  double first_violation_time = -1.0;

  json to_json() const;
};

GronwallResult gronwall_check(const PairTrace& trace, double epsilon,
                              std::optional<double> rho_bound, double slack = 0.05);

// Aggregate convergence summary over many traces (sorted by id before
// aggregation so reports are deterministic).
struct TraceSummary {
  std::uint64_t id = 0;
  double initial_norm = 0.0;
  double terminal_norm = 0.0;
  double monotone_after = 0.0;  // first time after which |x - x~| is
                                // non-increasing within the tolerance band
};

struct ConvergenceReport {
  std::vector<TraceSummary> traces;
  double worst_terminal_ratio = 0.0;  // max terminal/initial over the set
  bool all_converged = false;

  json to_json() const;
};

ConvergenceReport convergence_report(const std::vector<PairTrace>& traces,
                                     double band = 1e-9);

}  // namespace deltaiss::verify
