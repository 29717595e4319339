#pragma once

#include <Eigen/Dense>

#include "deltaiss/plant/data_batch.hpp"
#include "deltaiss/poly/dictionary.hpp"

namespace deltaiss::plant {

// Sampled states pushed through the dictionary: column k is F(x(t0 + k*tau)).
struct LiftedData {
  Eigen::MatrixXd lifted;  // N x T
  int rank = 0;
  Eigen::VectorXd singular_values;
  double condition_number = 0.0;  // sigma_1 / sigma_N; inf when rank < N
};

struct RankOptions {
  // Singular values above max(N, T) * eps * sigma_max count toward the rank;
  // a non-negative override replaces that threshold with an absolute one.
  double absolute_threshold = -1.0;
};

LiftedData lift(const DataBatch& batch, const poly::MonomialDictionary& dict,
                const RankOptions& opts = {});

// Data-richness diagnostics for a pair. Never throws.
struct RichnessReport {
  bool rank_ok = false;
  int required_rank = 0;
  int rank_primary = 0;
  int rank_sibling = 0;
  double condition_primary = 0.0;
  double condition_sibling = 0.0;

  json to_json() const;
};

RichnessReport richness_check(const BatchPair& pair, const poly::MonomialDictionary& dict,
                              const RankOptions& opts = {}) noexcept;

}  // namespace deltaiss::plant
