#include "run_config.hpp"

#include <cmath>

#include "deltaiss/errors.hpp"
#include "deltaiss/hashing.hpp"

namespace deltaiss::tools {

RunConfig parse_run_config(const TomlDocument& doc, int state_dim_hint, int input_dim_hint) {
  RunConfig out;

  // [dictionary]
  const std::string mode = doc.text("dictionary", "mode", "");
  if (mode == "enumerate") {
    const int n = doc.integer("dictionary", "state_dim", state_dim_hint);
    if (n < 1) throw ConfigError("[dictionary] state_dim must be given (or derivable)");
    out.dictionary = poly::MonomialDictionary::enumerate(
        n, doc.integer("dictionary", "d_min", 1), doc.integer("dictionary", "d_max", 2));
    out.dictionary_given = true;
  } else if (mode == "explicit") {
    std::vector<poly::Monomial> entries;
    for (const auto& row : doc.int_rows("dictionary", "entries"))
      entries.emplace_back(row);
    if (entries.empty()) throw ConfigError("[dictionary] entries must be non-empty");
    const int nvars = entries.front().nvars();
    out.dictionary = poly::MonomialDictionary::from_entries(nvars, std::move(entries));
    out.dictionary_given = true;
  } else if (!mode.empty()) {
    throw ConfigError("[dictionary] mode must be 'enumerate' or 'explicit'");
  }

  // [data]
  auto& d = out.data;
  d.samples = doc.integer("data", "T", d.samples);
  if (d.samples < 1) throw ConfigError("[data] T must be at least 1");
  d.tau = doc.number("data", "tau", d.tau);
  if (!(d.tau > 0.0)) throw ConfigError("[data] tau must be positive");
  d.t0 = doc.number("data", "t0", d.t0);
  d.substeps = doc.integer("data", "substeps", d.substeps);
  d.seed = static_cast<std::uint64_t>(doc.number("data", "seed", static_cast<double>(d.seed)));
  if (doc.has("data", "x0")) d.x0 = doc.vector("data", "x0");
  if (doc.has("data", "x0_tilde")) d.x0_tilde = doc.vector("data", "x0_tilde");
  d.source = plant::derivative_source_from_name(
      doc.text("data", "derivative_source", "exact"));
  d.excitation.kind = plant::kind_from_name(doc.text("data", "excitation", "multisine"));
  if (doc.has("data", "amplitude")) {
    d.excitation.amplitude = doc.vector("data", "amplitude");
  } else if (input_dim_hint > 0) {
    d.excitation.amplitude = Eigen::VectorXd::Ones(input_dim_hint);
  }
  d.excitation.num_frequencies = doc.integer("data", "num_frequencies", 8);
  d.excitation.hold_period = doc.number("data", "hold_period", 0.5);
  d.excitation.seed = d.seed;

  // [synthesis]
  auto& s = out.synthesis;
  s.epsilon = doc.number("synthesis", "epsilon", s.epsilon);
  s.vartheta = doc.number("synthesis", "vartheta", s.vartheta);
  s.y_degree = doc.integer("synthesis", "y_degree", s.y_degree);
  s.psd_floor = doc.number("synthesis", "psd_floor", s.psd_floor);
  s.verify_tol = doc.number("synthesis", "verify_tol", s.verify_tol);
  s.row_scaling = doc.boolean("synthesis", "row_scaling", s.row_scaling);
  s.auto_retry = doc.boolean("synthesis", "auto_retry", s.auto_retry);
  s.solver.tol_feas = doc.number("synthesis", "tol_feas", s.solver.tol_feas);
  s.solver.tol_gap = doc.number("synthesis", "tol_gap", s.solver.tol_gap);
  s.solver.margin_cap = doc.number("synthesis", "margin_cap", s.solver.margin_cap);
  s.solver.trust_radius = doc.number("synthesis", "trust_radius", s.solver.trust_radius);
  if (doc.has("synthesis", "rank_tol")) {
    s.rank.absolute_threshold = doc.number("synthesis", "rank_tol", -1.0);
    s.solver.presolve.rank_tol = s.rank.absolute_threshold;
  }
  if (doc.has("synthesis", "B_norm_bound"))
    s.input_matrix_norm_bound = doc.number("synthesis", "B_norm_bound", 0.0);
  if (out.dictionary_given) s.dict = out.dictionary;

  // [verify]
  auto& v = out.verify;
  v.pairs = doc.integer("verify", "pairs", v.pairs);
  v.horizon = doc.number("verify", "horizon", v.horizon);
  v.step = doc.number("verify", "step", v.step);
  v.range = doc.number("verify", "range", v.range);
  v.seed = static_cast<std::uint64_t>(doc.number("verify", "seed", static_cast<double>(v.seed)));
  v.signal = doc.text("verify", "signal", v.signal);
  v.signal_tilde = doc.text("verify", "signal_tilde", v.signal_tilde);
  v.signal_amplitude = doc.number("verify", "signal_amplitude", v.signal_amplitude);
  if (doc.has("verify", "signal_constant"))
    v.signal_constant = doc.vector("verify", "signal_constant");
  v.gronwall_slack = doc.number("verify", "gronwall_slack", v.gronwall_slack);
  v.convergence_band = doc.number("verify", "convergence_band", v.convergence_band);
  if (v.pairs < 1) throw ConfigError("[verify] pairs must be at least 1");
  if (!(v.horizon > 0.0) || !(v.step > 0.0))
    throw ConfigError("[verify] horizon and step must be positive");
  return out;
}

plant::PolySystem parse_plant_file(const std::string& path) {
  const TomlDocument doc = TomlDocument::parse_file(path);
  const std::string builtin = doc.text("plant", "builtin", "");
  if (builtin == "spacecraft") return plant::spacecraft_system();
  if (!builtin.empty()) throw ConfigError("unknown builtin plant '" + builtin + "'");

  const Eigen::MatrixXd a = doc.matrix("plant", "A");
  const Eigen::MatrixXd b = doc.matrix("plant", "B");
  std::vector<poly::Monomial> entries;
  for (const auto& row : doc.int_rows("plant", "dictionary")) entries.emplace_back(row);
  if (entries.empty()) throw ConfigError("[plant] dictionary must be non-empty");
  auto dict = poly::MonomialDictionary::from_entries(
      static_cast<int>(entries.front().nvars()), entries);
  // from_entries sorts canonically; permute the A columns accordingly.
  Eigen::MatrixXd a_sorted(a.rows(), a.cols());
  if (static_cast<int>(entries.size()) != dict.size() || a.cols() != dict.size())
    throw ConfigError("[plant] A columns must match the dictionary entries");
  for (int k = 0; k < dict.size(); ++k) {
    bool found = false;
    for (std::size_t orig = 0; orig < entries.size(); ++orig) {
      if (dict.entry(k) == entries[orig]) {
        a_sorted.col(k) = a.col(static_cast<Eigen::Index>(orig));
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("[plant] dictionary entries must be unique");
  }
  return plant::PolySystem(a_sorted, b, std::move(dict));
}

plant::InputSignal make_signal(const std::string& name, const VerifyConfig& cfg, int input_dim,
                               std::uint64_t seed_salt) {
  if (name == "zero" || name.empty()) {
    return [input_dim](double) { return Eigen::VectorXd::Zero(input_dim); };
  }
  if (name == "trig3") {
    if (input_dim != 3)
      throw ConfigError("signal 'trig3' needs a 3-channel input, got " +
                        std::to_string(input_dim));
    return [](double t) {
      Eigen::VectorXd u(3);
      u << std::sin(3.0 * t), std::cos(2.0 * t), std::sin(t) * std::sin(t);
      return u;
    };
  }
  if (name == "constant") {
    Eigen::VectorXd c = cfg.signal_constant;
    if (c.size() == 0) c = Eigen::VectorXd::Zero(input_dim);
    if (c.size() != input_dim)
      throw ConfigError("[verify] signal_constant has wrong channel count");
    return [c](double) { return c; };
  }
  if (name == "multisine") {
    plant::ExcitationSpec spec;
    spec.kind = plant::ExcitationSpec::Kind::Multisine;
    spec.amplitude = Eigen::VectorXd::Constant(input_dim, cfg.signal_amplitude);
    spec.seed = mix_seed(cfg.seed, seed_salt);
    return plant::realize(spec);
  }
  throw ConfigError("unknown signal '" + name +
                    "' (available: zero, trig3, constant, multisine)");
}

}  // namespace deltaiss::tools
