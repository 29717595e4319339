#pragma once

#include "deltaiss/plant/data_batch.hpp"
#include "deltaiss/synthesis/certificate.hpp"

namespace deltaiss::verify {

// A-posteriori re-verification of a stored certificate against raw data:
// recomputes every condition residual from scratch and cross-checks the
// stored metric eigenvalue bounds. Diagnostic only; never throws on failure.
struct RecheckReport {
  synthesis::ConditionReport fresh;
  bool fingerprint_match = false;
  double alpha_lower_delta = 0.0;
  double alpha_upper_delta = 0.0;
  double controller_consistency = 0.0;  // stored K vs inputs * Y(x) * P
  double stored_vs_fresh_drift = 0.0;   // worst |stored residual - fresh residual|
  bool pass = false;

  json to_json() const;
};

RecheckReport recheck_certificate(const synthesis::Certificate& cert,
                                  const plant::BatchPair& pair,
                                  const poly::MonomialDictionary& dict);

}  // namespace deltaiss::verify
