#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "deltaiss/plant/data_batch.hpp"
#include "deltaiss/plant/poly_system.hpp"
#include "deltaiss/synthesis/config.hpp"
#include "toml_lite.hpp"

namespace deltaiss::tools {

struct DataConfig {
  int samples = 300;
  double tau = 0.1;
  double t0 = 0.0;
  int substeps = 100;
  std::uint64_t seed = 42;
  Eigen::VectorXd x0;
  Eigen::VectorXd x0_tilde;
  plant::DerivativeSource source = plant::DerivativeSource::Exact;
  plant::ExcitationSpec excitation;
};

struct VerifyConfig {
  int pairs = 20;
  double horizon = 20.0;
  double step = 0.01;
  double range = 10.0;  // initial conditions drawn from the +-range box
  std::uint64_t seed = 7;
  std::string signal = "trig3";
  std::string signal_tilde;  // empty means identical to `signal`
  Eigen::VectorXd signal_constant;
  double signal_amplitude = 1.0;
  double gronwall_slack = 0.05;
  double convergence_band = 1e-9;
};

struct RunConfig {
  poly::MonomialDictionary dictionary = poly::MonomialDictionary::enumerate(1, 1, 1);
  bool dictionary_given = false;
  DataConfig data;
  synthesis::SynthesisConfig synthesis;
  VerifyConfig verify;
};

// Parses the run config (dictionary/data/synthesis/verify sections). The
// plant lives in its own file so the synthesis stage can be handed a config
// with no road back to the true dynamics.
RunConfig parse_run_config(const TomlDocument& doc, int state_dim_hint, int input_dim_hint);

plant::PolySystem parse_plant_file(const std::string& path);

// Named external-input signals for verification runs.
plant::InputSignal make_signal(const std::string& name, const VerifyConfig& cfg, int input_dim,
                               std::uint64_t seed_salt);

}  // namespace deltaiss::tools
