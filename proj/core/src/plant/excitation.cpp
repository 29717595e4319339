#include "deltaiss/plant/excitation.hpp"

#include <cmath>

#include "deltaiss/errors.hpp"
#include "deltaiss/hashing.hpp"

namespace deltaiss::plant {

namespace {

// sqrt of the first few primes: pairwise incommensurate frequencies.
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

void ExcitationSpec::validate() const {
  if (amplitude.size() < 1) throw ConfigError("excitation amplitude must have one entry per channel");
  for (Eigen::Index i = 0; i < amplitude.size(); ++i)
    if (!(amplitude(i) >= 0.0)) throw ConfigError("excitation amplitudes must be non-negative");
  if (kind == Kind::Multisine) {
    if (num_frequencies < 1 || num_frequencies > 16)
      throw ConfigError("multisine frequency count must be in [1, 16]");
  } else {
    if (!(hold_period > 0.0)) throw ConfigError("hold period must be positive");
  }
}

InputSignal realize(const ExcitationSpec& spec) {
  spec.validate();
  const int m = static_cast<int>(spec.amplitude.size());
  if (spec.kind == ExcitationSpec::Kind::Multisine) {
    const int nf = spec.num_frequencies;
    Eigen::MatrixXd phases(m, nf);
    Eigen::VectorXd freqs(nf);
    for (int k = 0; k < nf; ++k) freqs(k) = std::sqrt(static_cast<double>(kPrimes[k]));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < nf; ++k)
        phases(i, k) = 2.0 * M_PI *
                       uniform01(splitmix64(mix_seed(spec.seed, static_cast<std::uint64_t>(i),
                                                     static_cast<std::uint64_t>(k))));
    Eigen::VectorXd amp = spec.amplitude;
    return [m, nf, phases, freqs, amp](double t) {
      Eigen::VectorXd u(m);
      for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < nf; ++k) s += std::sin(freqs(k) * t + phases(i, k));
        u(i) = amp(i) * s / static_cast<double>(nf);
      }
      return u;
    };
  }
  const double hold = spec.hold_period;
  const Eigen::VectorXd amp = spec.amplitude;
  const std::uint64_t seed = spec.seed;
  return [m, hold, amp, seed](double t) {
    const auto idx = static_cast<std::uint64_t>(std::floor(std::max(t, 0.0) / hold));
    Eigen::VectorXd u(m);
    for (int i = 0; i < m; ++i) {
      const double r = uniform01(splitmix64(mix_seed(seed, idx, static_cast<std::uint64_t>(i))));
      u(i) = amp(i) * (2.0 * r - 1.0);
    }
    return u;
  };
}

std::string kind_name(ExcitationSpec::Kind kind) {
  return kind == ExcitationSpec::Kind::Multisine ? "multisine" : "piecewise-constant";
}

ExcitationSpec::Kind kind_from_name(const std::string& name) {
  if (name == "multisine") return ExcitationSpec::Kind::Multisine;
  if (name == "piecewise-constant") return ExcitationSpec::Kind::PiecewiseConstant;
  throw ConfigError("unknown excitation kind '" + name + "'");
}

json ExcitationSpec::to_json() const {
  return json{{"kind", kind_name(kind)},
              {"amplitude", vector_to_json(amplitude)},
              {"num_frequencies", num_frequencies},
              {"hold_period", hold_period},
              {"seed", seed}};
}

ExcitationSpec ExcitationSpec::from_json(const json& j) {
  ExcitationSpec spec;
  spec.kind = kind_from_name(j.at("kind").get<std::string>());
  spec.amplitude = vector_from_json(j.at("amplitude"));
  spec.num_frequencies = j.value("num_frequencies", 8);
  spec.hold_period = j.value("hold_period", 0.5);
  spec.seed = j.value("seed", std::uint64_t{0});
  return spec;
}

}  // namespace deltaiss::plant
