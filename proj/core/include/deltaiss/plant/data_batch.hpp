#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>

#include "deltaiss/plant/excitation.hpp"
#include "deltaiss/plant/poly_system.hpp"

namespace deltaiss::plant {

enum class DerivativeSource { Exact, ForwardDifference };

std::string derivative_source_name(DerivativeSource s);
DerivativeSource derivative_source_from_name(const std::string& name);

// One sampled input-state trajectory: inputs (m x T), states (n x T) and
// state derivatives (n x T) at t0 + k*tau.
struct DataBatch {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd states;
  Eigen::MatrixXd derivs;
  double tau = 0.0;
  double t0 = 0.0;
  DerivativeSource source = DerivativeSource::Exact;

  int sample_count() const { return static_cast<int>(states.cols()); }
  int state_dim() const { return static_cast<int>(states.rows()); }
  int input_dim() const { return static_cast<int>(inputs.rows()); }
  void validate() const;
};

// Two trajectories of the same plant under the identical realized input but
// different initial conditions.
struct BatchPair {
  DataBatch batch;
  DataBatch sibling;
  ExcitationSpec excitation;

  void validate() const;
  std::string fingerprint() const;
};

struct CollectOptions {
  double t0 = 0.0;
  int substeps = 100;  // internal RK4 steps per sampling period
};

// Samples both trajectories on t0 + k*tau, k = 0..T-1. With forward
// differences the dense simulation extends one extra sample.
BatchPair collect_pair(const PolySystem& sys, const ExcitationSpec& exc,
                       const Eigen::VectorXd& x0, const Eigen::VectorXd& x0_tilde, int T,
                       double tau, DerivativeSource source, const CollectOptions& opts = {});

// Bundle layout: <dir>/batch.csv, <dir>/sibling.csv, <dir>/meta.json.
void save_bundle(const BatchPair& pair, const std::filesystem::path& dir);
BatchPair load_bundle(const std::filesystem::path& dir);

void write_batch_csv(const DataBatch& batch, const std::filesystem::path& file);
DataBatch read_batch_csv(const std::filesystem::path& file, int state_dim, int input_dim);

}  // namespace deltaiss::plant
