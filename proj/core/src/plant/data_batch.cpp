#include "deltaiss/plant/data_batch.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "deltaiss/errors.hpp"
#include "deltaiss/hashing.hpp"
#include "deltaiss/plant/simulate.hpp"

namespace deltaiss::plant {

std::string derivative_source_name(DerivativeSource s) {
  return s == DerivativeSource::Exact ? "exact" : "forward-difference";
}

DerivativeSource derivative_source_from_name(const std::string& name) {
  if (name == "exact") return DerivativeSource::Exact;
  if (name == "forward-difference") return DerivativeSource::ForwardDifference;
  throw ConfigError("unknown derivative source '" + name + "'");
}

void DataBatch::validate() const {
  const auto T = states.cols();
  if (inputs.cols() != T || derivs.cols() != T)
    throw DimensionError("batch matrices must share the sample count");
  if (derivs.rows() != states.rows())
    throw DimensionError("derivative rows must match state rows");
  if (!(tau > 0.0)) throw ConfigError("sampling period must be positive");
}

void BatchPair::validate() const {
  batch.validate();
  sibling.validate();
  if (batch.sample_count() != sibling.sample_count())
    throw DimensionError("pair batches must share the sample count");
  if (batch.inputs != sibling.inputs)
    throw ConfigError("pair batches must share the realized input");
  if (batch.states.col(0) == sibling.states.col(0))
    throw IdenticalInitialConditionsError("pair trajectories start from the same state");
}

std::string BatchPair::fingerprint() const {
  Fnv1a h;
  h.update(batch.inputs);
  h.update(batch.states);
  h.update(batch.derivs);
  h.update(sibling.states);
  h.update(sibling.derivs);
  h.update(batch.tau);
  h.update(batch.t0);
  h.update(static_cast<std::uint64_t>(batch.source));
  return h.hex();
}

namespace {

DataBatch sample_one(const PolySystem& sys, const InputSignal& input_abs,
                     const Eigen::VectorXd& x0, int T, double tau, DerivativeSource source,
                     const CollectOptions& opts) {
  DataBatch out;
  out.tau = tau;
  out.t0 = opts.t0;
  out.source = source;
  out.inputs.resize(sys.input_dim(), T);
  out.states.resize(sys.state_dim(), T);
  out.derivs.resize(sys.state_dim(), T);

  const int extra = source == DerivativeSource::ForwardDifference ? 1 : 0;
  const int spans = T - 1 + extra;
  for (int k = 0; k < T; ++k) out.inputs.col(k) = input_abs(opts.t0 + k * tau);

  if (spans == 0) {
    out.states.col(0) = x0;
    out.derivs.col(0) = sys.field(x0, out.inputs.col(0));
    return out;
  }

  InputSignal input_rel = [&input_abs, &opts](double s) { return input_abs(opts.t0 + s); };
  const double horizon = spans * tau;
  const double step = tau / static_cast<double>(opts.substeps);
  Trajectory dense = simulate(sys, input_rel, x0, horizon, step);

  for (int k = 0; k < T; ++k) {
    const int idx = k * opts.substeps;
    out.states.col(k) = dense.states.col(idx);
    if (source == DerivativeSource::Exact) {
      out.derivs.col(k) = dense.derivs.col(idx);
    } else {
      out.derivs.col(k) =
          (dense.states.col(idx + opts.substeps) - dense.states.col(idx)) / tau;
    }
  }
  return out;
}

}  // namespace

BatchPair collect_pair(const PolySystem& sys, const ExcitationSpec& exc,
                       const Eigen::VectorXd& x0, const Eigen::VectorXd& x0_tilde, int T,
                       double tau, DerivativeSource source, const CollectOptions& opts) {
  if (T < 1) throw ConfigError("sample count must be at least 1");
  if (!(tau > 0.0)) throw ConfigError("sampling period must be positive");
  if (opts.substeps < 1) throw ConfigError("substeps must be at least 1");
  if (x0.size() != sys.state_dim() || x0_tilde.size() != sys.state_dim())
    throw DimensionError("initial condition dimension mismatch");
  if (x0 == x0_tilde)
    throw IdenticalInitialConditionsError("the two data trajectories need distinct starts");

  const InputSignal input = realize(exc);
  BatchPair pair;
  pair.excitation = exc;
  pair.batch = sample_one(sys, input, x0, T, tau, source, opts);
  pair.sibling = sample_one(sys, input, x0_tilde, T, tau, source, opts);
  pair.validate();
  return pair;
}

namespace {

void write_csv_row(std::FILE* f, double t, const Eigen::VectorXd& u, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& xdot) {
  std::fprintf(f, "%.17g", t);
  for (Eigen::Index i = 0; i < u.size(); ++i) std::fprintf(f, ",%.17g", u(i));
  for (Eigen::Index i = 0; i < x.size(); ++i) std::fprintf(f, ",%.17g", x(i));
  for (Eigen::Index i = 0; i < xdot.size(); ++i) std::fprintf(f, ",%.17g", xdot(i));
  std::fprintf(f, "\n");
}

}  // namespace

void write_batch_csv(const DataBatch& batch, const std::filesystem::path& file) {
  std::FILE* f = std::fopen(file.string().c_str(), "w");
  if (f == nullptr) throw IoError("cannot open '" + file.string() + "' for writing");
  std::fprintf(f, "t");
  for (int i = 1; i <= batch.input_dim(); ++i) std::fprintf(f, ",u_%d", i);
  for (int i = 1; i <= batch.state_dim(); ++i) std::fprintf(f, ",x_%d", i);
  for (int i = 1; i <= batch.state_dim(); ++i) std::fprintf(f, ",xdot_%d", i);
  std::fprintf(f, "\n");
  for (int k = 0; k < batch.sample_count(); ++k)
    write_csv_row(f, batch.t0 + k * batch.tau, batch.inputs.col(k), batch.states.col(k),
                  batch.derivs.col(k));
  std::fclose(f);
}

DataBatch read_batch_csv(const std::filesystem::path& file, int state_dim, int input_dim) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV '" + file.string() + "'");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    const std::size_t expected = 1 + static_cast<std::size_t>(input_dim + 2 * state_dim);
    if (row.size() != expected)
      throw IoError("CSV row width mismatch in '" + file.string() + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("CSV has no data rows: '" + file.string() + "'");

  DataBatch batch;
  const int T = static_cast<int>(rows.size());
  batch.inputs.resize(input_dim, T);
  batch.states.resize(state_dim, T);
  batch.derivs.resize(state_dim, T);
  for (int k = 0; k < T; ++k) {
    int c = 1;
    for (int i = 0; i < input_dim; ++i) batch.inputs(i, k) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(c++)];
    for (int i = 0; i < state_dim; ++i) batch.states(i, k) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(c++)];
    for (int i = 0; i < state_dim; ++i) batch.derivs(i, k) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(c++)];
  }
  batch.t0 = rows[0][0];
  batch.tau = T > 1 ? rows[1][0] - rows[0][0] : 1.0;
  return batch;
}

void save_bundle(const BatchPair& pair, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_batch_csv(pair.batch, dir / "batch.csv");
  write_batch_csv(pair.sibling, dir / "sibling.csv");
  json meta{{"T", pair.batch.sample_count()},
            {"tau", pair.batch.tau},
            {"t0", pair.batch.t0},
            {"state_dim", pair.batch.state_dim()},
            {"input_dim", pair.batch.input_dim()},
            {"derivative_source", derivative_source_name(pair.batch.source)},
            {"excitation", pair.excitation.to_json()},
            {"scaling", nullptr},
            {"fingerprint", pair.fingerprint()}};
  std::ofstream out(dir / "meta.json");
  if (!out) throw IoError("cannot write bundle metadata in '" + dir.string() + "'");
  out << meta.dump(2) << "\n";
}

BatchPair load_bundle(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw IoError("no bundle metadata at '" + (dir / "meta.json").string() + "'");
  json meta = json::parse(in);
  const int state_dim = meta.at("state_dim").get<int>();
  const int input_dim = meta.at("input_dim").get<int>();
  BatchPair pair;
  pair.batch = read_batch_csv(dir / "batch.csv", state_dim, input_dim);
  pair.sibling = read_batch_csv(dir / "sibling.csv", state_dim, input_dim);
  pair.batch.tau = pair.sibling.tau = meta.at("tau").get<double>();
  pair.batch.t0 = pair.sibling.t0 = meta.at("t0").get<double>();
  pair.batch.source = pair.sibling.source =
      derivative_source_from_name(meta.at("derivative_source").get<std::string>());
  if (meta.contains("excitation") && !meta.at("excitation").is_null())
    pair.excitation = ExcitationSpec::from_json(meta.at("excitation"));
  pair.validate();
  const std::string stored = meta.value("fingerprint", std::string{});
  if (!stored.empty() && stored != pair.fingerprint())
    throw IoError("bundle fingerprint mismatch: files were modified after collection");
  return pair;
}

}  // namespace deltaiss::plant
