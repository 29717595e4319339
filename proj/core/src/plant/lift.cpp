#include "deltaiss/plant/lift.hpp"

#include <limits>

#include "deltaiss/errors.hpp"

namespace deltaiss::plant {

LiftedData lift(const DataBatch& batch, const poly::MonomialDictionary& dict,
                const RankOptions& opts) {
  if (dict.state_dim() != batch.state_dim())
    throw DimensionError("dictionary and batch state dimensions differ");
  const int N = dict.size();
  const int T = batch.sample_count();
  LiftedData out;
  out.lifted.resize(N, T);
  for (int k = 0; k < T; ++k) out.lifted.col(k) = dict.evaluate(batch.states.col(k));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(out.lifted);
  out.singular_values = svd.singularValues();
  const double sigma_max = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  const double threshold =
      opts.absolute_threshold >= 0.0
          ? opts.absolute_threshold
          : std::max(N, T) * std::numeric_limits<double>::epsilon() * sigma_max;
  out.rank = 0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > threshold) ++out.rank;
  if (out.rank >= N && out.singular_values(N - 1) > 0.0)
    out.condition_number = sigma_max / out.singular_values(N - 1);
  else
    out.condition_number = std::numeric_limits<double>::infinity();
  return out;
}

json RichnessReport::to_json() const {
  return json{{"rank_ok", rank_ok},
              {"required_rank", required_rank},
              {"rank_primary", rank_primary},
              {"rank_sibling", rank_sibling},
              {"condition_primary", condition_primary},
              {"condition_sibling", condition_sibling}};
}

RichnessReport richness_check(const BatchPair& pair, const poly::MonomialDictionary& dict,
                              const RankOptions& opts) noexcept {
  RichnessReport report;
  report.required_rank = dict.size();
  try {
    const LiftedData a = lift(pair.batch, dict, opts);
    const LiftedData b = lift(pair.sibling, dict, opts);
    report.rank_primary = a.rank;
    report.rank_sibling = b.rank;
    report.condition_primary = a.condition_number;
    report.condition_sibling = b.condition_number;
    report.rank_ok = a.rank == dict.size() && b.rank == dict.size();
  } catch (const std::exception&) {
    report.rank_ok = false;
  }
  return report;
}

}  // namespace deltaiss::plant
