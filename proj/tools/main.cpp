#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "deltaiss/errors.hpp"
#include "deltaiss/hashing.hpp"
#include "deltaiss/plant/lift.hpp"
#include "deltaiss/synthesis/synthesize.hpp"
#include "deltaiss/verify/checks.hpp"
#include "deltaiss/verify/recheck.hpp"
#include "run_config.hpp"

namespace deltaiss::tools {

// Exit-code contract, stable across versions.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRichness = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerification = 4;

int dispatch(int argc, char** argv);

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::uint64_t file_hash(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return 0;
  Fnv1a h;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  return h.digest();
}

void write_manifest(const fs::path& dir, const std::string& command, std::uint64_t seed,
                    const std::vector<fs::path>& outputs, const json& extra = json::object()) {
  json files = json::object();
  for (const auto& p : outputs) {
    Fnv1a h;
    h.update(file_hash(p));
    files[p.filename().string()] = h.hex();
  }
  json manifest{{"tool", "deltaiss"},
                {"version", kVersion},
                {"command", command},
                {"seed", seed},
                {"files", std::move(files)}};
  for (const auto& [k, v] : extra.items()) manifest[k] = v;
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

void prepare_out_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir / "manifest.json") || fs::exists(dir / "meta.json")) {
    if (!force)
      throw ConfigError("output directory '" + dir.string() +
                        "' already holds a run; pass --force to overwrite");
  }
  fs::create_directories(dir);
}

struct CommonArgs {
  std::string config_file;
  std::string out_dir = "out";
  bool force = false;
  std::int64_t seed = -1;  // overrides config seeds when >= 0
};

RunConfig load_run_config(const CommonArgs& args, int state_dim_hint, int input_dim_hint) {
  TomlDocument doc = args.config_file.empty()
                         ? TomlDocument::parse_string("", "<empty>")
                         : TomlDocument::parse_file(args.config_file);
  RunConfig cfg = parse_run_config(doc, state_dim_hint, input_dim_hint);
  if (args.seed >= 0) {
    cfg.data.seed = static_cast<std::uint64_t>(args.seed);
    cfg.data.excitation.seed = cfg.data.seed;
    cfg.verify.seed = mix_seed(static_cast<std::uint64_t>(args.seed), 0x76657269ULL);
  }
  return cfg;
}

Eigen::VectorXd default_start(int n, double scale, std::uint64_t seed, std::uint64_t salt) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i)
    x(i) = scale * (2.0 * uniform01(splitmix64(mix_seed(seed, salt,
                                                        static_cast<std::uint64_t>(i)))) -
                    1.0);
  return x;
}

int cmd_collect(const CommonArgs& args, const std::string& plant_file) {
  const plant::PolySystem sys = parse_plant_file(plant_file);
  RunConfig cfg = load_run_config(args, sys.state_dim(), sys.input_dim());

  auto& d = cfg.data;
  if (d.excitation.amplitude.size() == 0)
    d.excitation.amplitude = Eigen::VectorXd::Ones(sys.input_dim());
  if (d.excitation.amplitude.size() != sys.input_dim())
    throw ConfigError("[data] amplitude channel count does not match the plant input");
  if (d.x0.size() == 0) d.x0 = default_start(sys.state_dim(), 0.5, d.seed, 1);
  if (d.x0_tilde.size() == 0) d.x0_tilde = default_start(sys.state_dim(), 0.5, d.seed, 2);

  const plant::BatchPair pair =
      plant::collect_pair(sys, d.excitation, d.x0, d.x0_tilde, d.samples, d.tau, d.source,
                          plant::CollectOptions{d.t0, d.substeps});

  prepare_out_dir(args.out_dir, args.force);
  plant::save_bundle(pair, args.out_dir);
  write_manifest(args.out_dir, "collect", d.seed,
                 {fs::path(args.out_dir) / "batch.csv", fs::path(args.out_dir) / "sibling.csv",
                  fs::path(args.out_dir) / "meta.json"},
                 json{{"fingerprint", pair.fingerprint()}});
  std::cout << "collected " << d.samples << " samples (tau " << d.tau << ") into "
            << args.out_dir << "\n";
  return kExitOk;
}

int cmd_synthesize(const CommonArgs& args, const std::string& bundle_dir,
                   double epsilon_override, double vartheta_override,
                   double b_norm_bound) {
  const plant::BatchPair pair = plant::load_bundle(bundle_dir);
  RunConfig cfg = load_run_config(args, pair.batch.state_dim(), pair.batch.input_dim());
  if (!cfg.dictionary_given)
    throw ConfigError("synthesis needs a [dictionary] section in the run config");

  synthesis::SynthesisConfig scfg = cfg.synthesis;
  scfg.dict = cfg.dictionary;
  if (epsilon_override > 0.0) scfg.epsilon = epsilon_override;
  if (vartheta_override > 0.0) scfg.vartheta = vartheta_override;
  if (b_norm_bound > 0.0) scfg.input_matrix_norm_bound = b_norm_bound;

  const auto t_start = std::chrono::steady_clock::now();
  const synthesis::Certificate cert = synthesis::synthesize(pair, scfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  prepare_out_dir(args.out_dir, args.force);
  const fs::path cert_file = fs::path(args.out_dir) / "certificate.json";
  const fs::path report_file = fs::path(args.out_dir) / "residual_report.json";
  cert.save(cert_file);
  {
    std::ofstream out(report_file);
    out << cert.residual_report.to_json().dump(2) << "\n";
  }
  write_manifest(args.out_dir, "synthesize", cfg.data.seed, {cert_file, report_file},
                 json{{"elapsed_seconds", elapsed},
                      {"solver_margin", cert.solver_margin},
                      {"data_fingerprint", cert.data_fingerprint}});
  std::cout << "certificate written to " << cert_file.string() << " (margin "
            << cert.solver_margin << ", " << elapsed << " s)\n";
  return kExitOk;
}

// Stored-field consistency: catches a tampered or corrupted certificate file
// before any simulation effort.
void check_certificate_integrity(const synthesis::Certificate& cert) {
  const int n = static_cast<int>(cert.P.rows());
  const double metric =
      (cert.P * cert.theta - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd decay = cert.sigma + cert.sigma.transpose() +
                                cert.vartheta * Eigen::MatrixXd::Identity(n, n) +
                                cert.epsilon * cert.theta;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (decay + decay.transpose()), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(
      0.5 * (cert.P + cert.P.transpose()), Eigen::EigenvaluesOnly);
  const double tol = cert.residual_report.tol > 0.0 ? cert.residual_report.tol : 1e-6;
  const double eig_tol = 1e-6 * std::max(1.0, cert.alpha_upper);
  if (metric > std::max(tol, 1e-8) || es.eigenvalues().maxCoeff() > tol ||
      std::abs(ep.eigenvalues().minCoeff() - cert.alpha_lower) > eig_tol ||
      std::abs(ep.eigenvalues().maxCoeff() - cert.alpha_upper) > eig_tol)
    throw VerificationFailedError(
        "certificate file is internally inconsistent (tampered or corrupted)");
}

int cmd_verify(const CommonArgs& args, const std::string& cert_file,
               const std::string& plant_file, bool paper_range, double b_norm_bound) {
  const synthesis::Certificate cert = synthesis::Certificate::load(cert_file);
  check_certificate_integrity(cert);
  const plant::PolySystem sys = parse_plant_file(plant_file);
  RunConfig cfg = load_run_config(args, sys.state_dim(), sys.input_dim());
  auto& v = cfg.verify;
  if (paper_range) v.range = 2.0e4;

  const std::string tilde_name = v.signal_tilde.empty() ? v.signal : v.signal_tilde;
  const plant::InputSignal u_hat = make_signal(v.signal, v, sys.input_dim(), 1);
  const plant::InputSignal u_hat_tilde = make_signal(tilde_name, v, sys.input_dim(), 2);
  const bool same_signal = v.signal_tilde.empty() || v.signal_tilde == v.signal;

  std::optional<double> rho;
  if (b_norm_bound > 0.0)
    rho = b_norm_bound * b_norm_bound / cert.vartheta;
  else if (cert.rho_bound.has_value())
    rho = cert.rho_bound;
  if (!same_signal && !rho.has_value())
    throw ConfigError(
        "the two external inputs differ, so the decay bound needs the gain rho = "
        "||B||^2 / vartheta; pass --B-norm-bound");

  prepare_out_dir(args.out_dir, args.force);
  std::vector<verify::PairTrace> traces;
  std::vector<verify::GronwallResult> gronwall;
  std::vector<fs::path> outputs;
  bool all_pass = true;
  for (int k = 0; k < v.pairs; ++k) {
    const Eigen::VectorXd x0 =
        default_start(sys.state_dim(), v.range, v.seed, 2 * static_cast<std::uint64_t>(k) + 1);
    Eigen::VectorXd x0_tilde =
        default_start(sys.state_dim(), v.range, v.seed, 2 * static_cast<std::uint64_t>(k) + 2);
    if (x0 == x0_tilde) x0_tilde.array() += 1e-3;
    verify::PairTrace trace =
        verify::simulate_closed_loop_pair(sys, cert, x0, x0_tilde, u_hat, u_hat_tilde,
                                          v.horizon, v.step, static_cast<std::uint64_t>(k));
    const verify::GronwallResult g =
        verify::gronwall_check(trace, cert.epsilon, rho, v.gronwall_slack);
    all_pass = all_pass && g.pass;

    const fs::path trace_file =
        fs::path(args.out_dir) / ("trace_" + std::to_string(k) + ".csv");
    std::FILE* f = std::fopen(trace_file.string().c_str(), "w");
    if (f == nullptr) throw IoError("cannot write '" + trace_file.string() + "'");
    std::fprintf(f, "t");
    for (int i = 1; i <= sys.state_dim(); ++i) std::fprintf(f, ",x_%d", i);
    for (int i = 1; i <= sys.state_dim(); ++i) std::fprintf(f, ",xt_%d", i);
    std::fprintf(f, ",V,diff_norm\n");
    for (int s = 0; s < trace.samples(); ++s) {
      std::fprintf(f, "%.17g", trace.times(s));
      for (int i = 0; i < sys.state_dim(); ++i) std::fprintf(f, ",%.17g", trace.x(i, s));
      for (int i = 0; i < sys.state_dim(); ++i) std::fprintf(f, ",%.17g", trace.x_tilde(i, s));
      std::fprintf(f, ",%.17g,%.17g\n", trace.lyapunov(s), trace.diff_norm(s));
    }
    std::fclose(f);
    outputs.push_back(trace_file);
    gronwall.push_back(g);
    traces.push_back(std::move(trace));
  }

  const verify::ConvergenceReport report =
      verify::convergence_report(traces, v.convergence_band);

  // Long-format series for log-scale plotting.
  const fs::path long_file = fs::path(args.out_dir) / "convergence_long.csv";
  {
    std::FILE* f = std::fopen(long_file.string().c_str(), "w");
    if (f == nullptr) throw IoError("cannot write '" + long_file.string() + "'");
    std::fprintf(f, "trace,t,diff_norm\n");
    for (const auto& trace : traces)
      for (int s = 0; s < trace.samples(); ++s)
        std::fprintf(f, "%llu,%.17g,%.17g\n",
                     static_cast<unsigned long long>(trace.id), trace.times(s),
                     trace.diff_norm(s));
    std::fclose(f);
  }
  const fs::path conv_file = fs::path(args.out_dir) / "convergence.json";
  {
    json conv = report.to_json();
    json gron = json::array();
    for (const auto& g : gronwall) gron.push_back(g.to_json());
    conv["gronwall"] = std::move(gron);
    conv["gronwall_all_pass"] = all_pass;
    std::ofstream out(conv_file);
    out << conv.dump(2) << "\n";
  }
  outputs.push_back(long_file);
  outputs.push_back(conv_file);
  write_manifest(args.out_dir, "verify", v.seed, outputs,
                 json{{"pairs", v.pairs}, {"range", v.range}});

  std::cout << "verified " << v.pairs << " closed-loop pairs: decay bound "
            << (all_pass ? "PASS" : "FAIL") << ", worst terminal ratio "
            << report.worst_terminal_ratio << "\n";
  if (!all_pass || (same_signal && !report.all_converged)) return kExitVerification;
  return kExitOk;
}

int cmd_recheck(const std::string& cert_file, const std::string& bundle_dir) {
  const synthesis::Certificate cert = synthesis::Certificate::load(cert_file);
  const plant::BatchPair pair = plant::load_bundle(bundle_dir);
  const verify::RecheckReport report = verify::recheck_certificate(cert, pair, cert.dict);
  if (!report.fingerprint_match)
    std::cerr << "warning: bundle fingerprint differs from the certificate's data "
                 "fingerprint\n";
  std::cout << report.to_json().dump(2) << "\n";
  return report.pass ? kExitOk : kExitVerification;
}

int cmd_demo_spacecraft(const CommonArgs& args, int samples_override) {
  const std::uint64_t seed = args.seed >= 0 ? static_cast<std::uint64_t>(args.seed) : 42;
  const fs::path dir = args.out_dir;
  prepare_out_dir(dir, args.force);

  const int samples = samples_override > 0 ? samples_override : 300;
  {
    std::ofstream plant_toml(dir / "plant.toml");
    plant_toml << "[plant]\nbuiltin = \"spacecraft\"\n";
  }
  {
    std::ofstream run(dir / "run.toml");
    run << "[dictionary]\n"
           "mode = \"explicit\"\n"
           "entries = [[1,0,0],[0,1,0],[0,0,1],[2,0,0],[1,1,0],[1,0,1],[0,1,1]]\n"
           "\n[data]\n"
           "T = " << samples << "\n"
           "tau = 0.1\n"
           "seed = " << seed << "\n"
           "x0 = [0.6, -0.4, 0.5]\n"
           "x0_tilde = [-0.3, 0.5, -0.2]\n"
           "derivative_source = \"exact\"\n"
           "excitation = \"multisine\"\n"
           "amplitude = [60.0, 60.0, 90.0]\n"
           "\n[synthesis]\n"
           "epsilon = 0.9\n"
           "vartheta = 0.44\n"
           "\n[verify]\n"
           "pairs = 20\n"
           "horizon = 20.0\n"
           "step = 0.01\n"
           "range = 10.0\n"
           "signal = \"trig3\"\n"
           "seed = " << mix_seed(seed, 0x76657269ULL) << "\n";
  }

  CommonArgs stage = args;
  stage.config_file = (dir / "run.toml").string();
  stage.force = true;
  stage.seed = -1;  // seeds now live in the generated config

  stage.out_dir = (dir / "bundle").string();
  int rc = cmd_collect(stage, (dir / "plant.toml").string());
  if (rc != kExitOk) return rc;

  stage.out_dir = (dir / "synthesis").string();
  rc = cmd_synthesize(stage, (dir / "bundle").string(), 0.0, 0.0, 0.0);
  if (rc != kExitOk) return rc;

  stage.out_dir = (dir / "verification").string();
  rc = cmd_verify(stage, (dir / "synthesis" / "certificate.json").string(),
                  (dir / "plant.toml").string(), false, 0.0);
  if (rc != kExitOk) return rc;

  // Recheck against the collected bundle for good measure.
  rc = cmd_recheck((dir / "synthesis" / "certificate.json").string(),
                   (dir / "bundle").string());
  if (rc != kExitOk) return rc;

  const synthesis::Certificate cert =
      synthesis::Certificate::load(dir / "synthesis" / "certificate.json");
  json conv;
  {
    std::ifstream in(dir / "verification" / "convergence.json");
    conv = json::parse(in);
  }
  json summary{
      {"plant", "spacecraft (inertias 200, 200, 300)"},
      {"samples", samples},
      {"tau", 0.1},
      {"epsilon", cert.epsilon},
      {"vartheta", cert.vartheta},
      {"expected",
       json{{"certificate", "feasible and verified"},
            {"pairs", "all trajectory pairs contract under identical external input"}}},
      {"achieved",
       json{{"solver_margin", cert.solver_margin},
            {"decay_lambda_max", cert.residual_report.decay_lambda_max},
            {"alpha_lower", cert.alpha_lower},
            {"alpha_upper", cert.alpha_upper},
            {"gronwall_all_pass", conv.value("gronwall_all_pass", false)},
            {"worst_terminal_ratio", conv.value("worst_terminal_ratio", 1.0)},
            {"all_converged", conv.value("all_converged", false)}}}};
  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
  }
  {
    std::ofstream out(dir / "summary.txt");
    out << "spacecraft demo\n"
        << "  samples: " << samples << " at tau = 0.1\n"
        << "  epsilon = " << cert.epsilon << ", vartheta = " << cert.vartheta << "\n"
        << "  certificate: feasible, margin " << cert.solver_margin << "\n"
        << "  decay lambda_max: " << cert.residual_report.decay_lambda_max << "\n"
        << "  metric eigenvalue range: [" << cert.alpha_lower << ", " << cert.alpha_upper
        << "]\n"
        << "  closed-loop pairs: "
        << (conv.value("gronwall_all_pass", false) ? "all within the decay bound"
                                                   : "decay bound violated")
        << ", worst terminal ratio " << conv.value("worst_terminal_ratio", 1.0) << "\n";
  }
  write_manifest(dir, "demo-spacecraft", seed,
                 {dir / "summary.json", dir / "summary.txt"});
  std::cout << "demo complete; summary at " << (dir / "summary.txt").string() << "\n";
  return kExitOk;
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"data-driven synthesis of incremental-stability certificates and controllers"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--seed", common.seed, "override config seeds");

  std::string plant_file, bundle_dir, cert_file;
  double epsilon_override = 0.0, vartheta_override = 0.0, b_norm_bound = 0.0;
  bool paper_range = false;
  int samples_override = 0;

  auto add_common = [&common](CLI::App* cmd, bool with_config = true) {
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_flag("--force", common.force, "overwrite an existing run directory");
    if (with_config) cmd->add_option("--config", common.config_file, "run config (TOML)");
  };

  CLI::App* collect = app.add_subcommand("collect", "sample an input-state trajectory pair");
  collect->add_option("--plant", plant_file, "plant description file")->required();
  add_common(collect);

  CLI::App* synth = app.add_subcommand("synthesize", "solve for a certificate and controller");
  synth->add_option("--bundle", bundle_dir, "collected data bundle directory")->required();
  synth->add_option("--epsilon", epsilon_override, "decay rate override");
  synth->add_option("--vartheta", vartheta_override, "Young split override");
  synth->add_option("--B-norm-bound", b_norm_bound,
                    "input-matrix norm bound; enables the gain value rho");
  add_common(synth);

  CLI::App* verify_cmd = app.add_subcommand("verify", "closed-loop verification of a certificate");
  verify_cmd->add_option("--certificate", cert_file, "certificate file")->required();
  verify_cmd->add_option("--plant", plant_file, "plant description file")->required();
  verify_cmd->add_flag("--paper-range", paper_range,
                       "draw initial conditions from the +-2e4 box (heavy gains; desk-scale "
                       "integrator settings may struggle)");
  verify_cmd->add_option("--B-norm-bound", b_norm_bound,
                         "input-matrix norm bound for differing external inputs");
  add_common(verify_cmd);

  CLI::App* recheck = app.add_subcommand("recheck", "re-verify a certificate against raw data");
  recheck->add_option("--certificate", cert_file, "certificate file")->required();
  recheck->add_option("--bundle", bundle_dir, "collected data bundle directory")->required();

  CLI::App* demo = app.add_subcommand("demo-spacecraft", "end-to-end spacecraft study");
  demo->add_option("--T", samples_override, "sample-count override (default 300)");
  add_common(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (collect->parsed()) return cmd_collect(common, plant_file);
  if (synth->parsed())
    return cmd_synthesize(common, bundle_dir, epsilon_override, vartheta_override,
                          b_norm_bound);
  if (verify_cmd->parsed())
    return cmd_verify(common, cert_file, plant_file, paper_range, b_norm_bound);
  if (recheck->parsed()) return cmd_recheck(cert_file, bundle_dir);
  if (demo->parsed()) return cmd_demo_spacecraft(common, samples_override);
  return kExitConfig;
}

}  // namespace deltaiss::tools

int main(int argc, char** argv) {
  using namespace deltaiss;
  try {
    return tools::dispatch(argc, argv);
  } catch (const RichnessError& e) {
    std::cerr << "error (data richness): " << e.what() << "\n";
    return tools::kExitRichness;
  } catch (const InfeasibleError& e) {
    std::cerr << "error (infeasible): " << e.what() << "\n";
    return tools::kExitInfeasible;
  } catch (const NumericalFailureError& e) {
    std::cerr << "error (solver): " << e.what() << "\n";
    return tools::kExitInfeasible;
  } catch (const VerificationFailedError& e) {
    std::cerr << "error (verification): " << e.what() << "\n";
    return tools::kExitVerification;
  } catch (const Error& e) {
    std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
    return tools::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tools::kExitConfig;
  }
}
