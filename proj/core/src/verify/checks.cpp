#include "deltaiss/verify/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deltaiss/errors.hpp"

namespace deltaiss::verify {

json GronwallResult::to_json() const {
  return json{{"pass", pass},
              {"worst_margin", worst_margin},
              {"worst_margin_rel", worst_margin_rel},
              {"first_violation_time", first_violation_time}};
}

GronwallResult gronwall_check(const PairTrace& trace, double epsilon,
                              std::optional<double> rho_bound, double slack) {
  if (trace.samples() < 1) throw ConfigError("empty trace");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");

  const double input_scale = std::max(
      1.0, std::max(trace.u_hat.cwiseAbs().maxCoeff(), trace.u_hat_tilde.cwiseAbs().maxCoeff()));
  const bool same_inputs = trace.inputs_identical(1e-13 * input_scale);
  if (!same_inputs && !rho_bound.has_value())
    throw MissingRhoBoundError(
        "external inputs differ: the decay bound needs the gain rho, so supply an "
        "input-matrix norm bound");

  double sup_du2 = 0.0;
  if (!same_inputs) {
    for (int k = 0; k < trace.samples(); ++k)
      sup_du2 = std::max(sup_du2, (trace.u_hat.col(k) - trace.u_hat_tilde.col(k)).squaredNorm());
  }

  const double v0 = trace.lyapunov(0);
  GronwallResult out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  out.worst_margin_rel = std::numeric_limits<double>::infinity();
  bool violated = false;
  for (int k = 0; k < trace.samples(); ++k) {
    const double t = trace.times(k);
    double bound = v0 * std::exp(-epsilon * t);
    if (!same_inputs)
      bound += (*rho_bound / epsilon) * sup_du2 * (1.0 - std::exp(-epsilon * t));
    bound *= 1.0 + slack;
    const double margin = bound - trace.lyapunov(k);
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_margin_rel = margin / std::max(bound, 1e-300);
    }
    if (margin < 0.0 && !violated) {
      violated = true;
      out.first_violation_time = t;
    }
  }
  out.pass = !violated;
  return out;
}

json ConvergenceReport::to_json() const {
  json traces_json = json::array();
  for (const auto& t : traces)
    traces_json.push_back(json{{"id", t.id},
                               {"initial_norm", t.initial_norm},
                               {"terminal_norm", t.terminal_norm},
                               {"monotone_after", t.monotone_after}});
  return json{{"traces", std::move(traces_json)},
              {"worst_terminal_ratio", worst_terminal_ratio},
              {"all_converged", all_converged}};
}

ConvergenceReport convergence_report(const std::vector<PairTrace>& traces, double band) {
  if (traces.empty()) throw ConfigError("convergence report needs at least one trace");
  std::vector<const PairTrace*> sorted;
  sorted.reserve(traces.size());
  for (const auto& t : traces) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](const PairTrace* a, const PairTrace* b) { return a->id < b->id; });

  ConvergenceReport report;
  report.worst_terminal_ratio = 0.0;
  bool all_ok = true;
  for (const PairTrace* t : sorted) {
    TraceSummary s;
    s.id = t->id;
    s.initial_norm = t->diff_norm(0);
    s.terminal_norm = t->diff_norm(t->samples() - 1);
    const double floor = 1e-15 * std::max(s.initial_norm, 1e-300);
    int first_ok = 0;
    for (int k = t->samples() - 2; k >= 0; --k) {
      if (t->diff_norm(k + 1) > t->diff_norm(k) * (1.0 + band) + floor) {
        first_ok = k + 1;
        break;
      }
    }
    s.monotone_after = t->times(first_ok);

    double ratio = 0.0;
    if (s.initial_norm > 0.0)
      ratio = s.terminal_norm / s.initial_norm;
    else if (s.terminal_norm > 0.0)
      ratio = std::numeric_limits<double>::infinity();
    report.worst_terminal_ratio = std::max(report.worst_terminal_ratio, ratio);
    all_ok = all_ok && ratio < 1.0;
    report.traces.push_back(s);
  }
  // A pair that starts identical and stays identical counts as converged
  // (its ratio is zero).
  report.all_converged = all_ok;
  return report;
}

}  // namespace deltaiss::verify
