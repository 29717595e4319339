#include "deltaiss/sdp/presolve.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "deltaiss/errors.hpp"
#include "deltaiss/hashing.hpp"

namespace deltaiss::sdp {

namespace {

struct DisjointSet {
  explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
  std::vector<int> parent;
};

int numeric_rank(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols,
                 double rank_tol) {
  if (sv.size() == 0) return 0;
  const double sigma_max = sv(0);
  const double threshold =
      rank_tol >= 0.0
          ? rank_tol
          : static_cast<double>(std::max(rows, cols)) *
                std::numeric_limits<double>::epsilon() * sigma_max;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++rank;
  return rank;
}

// PSD floors as plain LMI blocks (margin*I - X <= 0) so the rewrite over the
// visible set treats everything uniformly.
std::vector<LmiBlock> all_blocks(const SdpProblem& p) {
  std::vector<LmiBlock> blocks = p.lmi_blocks();
  for (const auto& floor : p.psd_floors()) {
    const auto& v = p.variable(floor.variable);
    LmiBlock block;
    block.dim = v.rows;
    block.label = v.name + "_floor";
    block.constant = floor.margin * Eigen::MatrixXd::Identity(v.rows, v.rows);
    for (int i = 0; i < v.rows; ++i) {
      for (int j = i; j < v.rows; ++j) {
        Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(v.rows, v.rows);
        coeff(i, j) -= 0.5;
        coeff(j, i) -= 0.5;
        if (i == j) coeff(i, i) = -1.0;
        block.terms.push_back(LmiTerm{floor.variable, SdpProblem::sym_entry(v.rows, i, j), coeff});
      }
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace

Eigen::VectorXd SdpReduction::Decomposition::minnorm_solve(const Eigen::VectorXd& b) const {
  if (rank == 0) return Eigen::VectorXd::Zero(vmat.rows());
  const Eigen::VectorXd scaled =
      sv.head(rank).cwiseInverse().asDiagonal() * (u.leftCols(rank).transpose() * b);
  return vmat.leftCols(rank) * scaled;
}

Eigen::MatrixXd SdpReduction::Decomposition::left_null() const {
  return u.rightCols(u.cols() - rank);
}

SdpReduction presolve_eliminate(const SdpProblem& problem, const PresolveOptions& opts) {
  SdpReduction red;
  red.original_ = problem;
  const int total = problem.scalar_count();

  // Visible set: scalars appearing in any LMI block or PSD floor.
  const std::vector<LmiBlock> blocks = all_blocks(problem);
  std::vector<char> is_visible(static_cast<std::size_t>(total), 0);
  for (const auto& b : blocks)
    for (const auto& t : b.terms)
      is_visible[static_cast<std::size_t>(problem.flat_index(t.variable, t.entry))] = 1;
  for (int i = 0; i < total; ++i)
    if (is_visible[static_cast<std::size_t>(i)]) red.visible_.push_back(i);
  std::vector<int> visible_pos(static_cast<std::size_t>(total), -1);
  for (std::size_t k = 0; k < red.visible_.size(); ++k)
    visible_pos[static_cast<std::size_t>(red.visible_[k])] = static_cast<int>(k);
  const int ns = static_cast<int>(red.visible_.size());

  // Split each equality row into visible and eliminated parts, accumulating
  // duplicate (variable, entry) references.
  struct Row {
    std::vector<std::pair<int, double>> qpart;  // flat index -> coeff
    Eigen::VectorXd spart;                      // dense over the visible set
    double rhs = 0.0;
    int id = 0;
  };
  std::vector<Row> rows;
  rows.reserve(problem.equalities().size());
  {
    std::unordered_map<int, double> acc;
    int id = 0;
    for (const auto& eq : problem.equalities()) {
      acc.clear();
      for (const auto& t : eq.terms) acc[problem.flat_index(t.variable, t.entry)] += t.coeff;
      Row row;
      row.spart = Eigen::VectorXd::Zero(ns);
      row.rhs = eq.rhs;
      row.id = id++;
      for (const auto& [idx, coeff] : acc) {
        if (coeff == 0.0) continue;
        if (visible_pos[static_cast<std::size_t>(idx)] >= 0)
          row.spart(visible_pos[static_cast<std::size_t>(idx)]) += coeff;
        else
          row.qpart.emplace_back(idx, coeff);
      }
      std::sort(row.qpart.begin(), row.qpart.end());
      rows.push_back(std::move(row));
    }
  }

  // Connected components over the eliminated scalars.
  DisjointSet dsu(total);
  for (const auto& row : rows)
    for (std::size_t k = 1; k < row.qpart.size(); ++k)
      dsu.unite(row.qpart[0].first, row.qpart[k].first);

  std::unordered_map<int, std::vector<int>> comp_rows;  // root -> row ids
  for (const auto& row : rows)
    if (!row.qpart.empty()) comp_rows[dsu.find(row.qpart[0].first)].push_back(row.id);

  // Pooled constraints on the visible set: pure visible rows plus the
  // rank-deficiency directions of every component. Induced rows carry a
  // noise estimate so the pool's own rank decision can ignore directions
  // below their accuracy.
  struct PoolRow {
    Eigen::VectorXd coeffs;
    double rhs;
    double noise;
    std::string provenance;
  };
  std::vector<PoolRow> pool;
  for (const auto& row : rows)
    if (row.qpart.empty())
      pool.push_back(
          PoolRow{row.spart, row.rhs, 0.0, "equality row " + std::to_string(row.id)});

  // Deterministic component order: by smallest eliminated index.
  std::vector<std::pair<int, std::vector<int>>> ordered_components;
  {
    std::unordered_map<int, int> root_min;
    for (const auto& [root, ids] : comp_rows) {
      int mn = total;
      for (int rid : ids)
        mn = std::min(mn, rows[static_cast<std::size_t>(rid)].qpart[0].first);
      root_min[root] = mn;
    }
    for (auto& [root, ids] : comp_rows) ordered_components.emplace_back(root_min[root], ids);
    std::sort(ordered_components.begin(), ordered_components.end());
  }

  // Identical elimination blocks (common when one data matrix pins many
  // variable groups) share a single decomposition.
  struct CacheEntry {
    Eigen::MatrixXd key;
    std::shared_ptr<const SdpReduction::Decomposition> dec;
  };
  std::unordered_map<std::uint64_t, std::vector<CacheEntry>> cache;

  int eliminated_nullity = 0;
  int eliminated_rank = 0;

  for (const auto& [mn, row_ids] : ordered_components) {
    (void)mn;
    SdpReduction::Component comp;
    {
      std::vector<int> qset;
      for (int rid : row_ids)
        for (const auto& [idx, c] : rows[static_cast<std::size_t>(rid)].qpart) qset.push_back(idx);
      std::sort(qset.begin(), qset.end());
      qset.erase(std::unique(qset.begin(), qset.end()), qset.end());
      comp.qvars = std::move(qset);
    }
    std::unordered_map<int, int> qpos;
    for (std::size_t k = 0; k < comp.qvars.size(); ++k)
      qpos[comp.qvars[k]] = static_cast<int>(k);

    const int nrows = static_cast<int>(row_ids.size());
    const int nq = static_cast<int>(comp.qvars.size());
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(nrows, nq);
    comp.visible = Eigen::MatrixXd::Zero(nrows, ns);
    comp.rhs = Eigen::VectorXd::Zero(nrows);
    for (int r = 0; r < nrows; ++r) {
      const Row& row = rows[static_cast<std::size_t>(row_ids[static_cast<std::size_t>(r)])];
      for (const auto& [idx, c] : row.qpart) e(r, qpos[idx]) = c;
      comp.visible.row(r) = row.spart.transpose();
      comp.rhs(r) = row.rhs;
    }
    // Row equilibration (an equation-scaling identity): keeps the rank
    // decision meaningful when rows mix very different data magnitudes.
    for (int r = 0; r < nrows; ++r) {
      double scale = std::max(e.row(r).cwiseAbs().maxCoeff(), std::abs(comp.rhs(r)));
      if (ns > 0) scale = std::max(scale, comp.visible.row(r).cwiseAbs().maxCoeff());
      if (scale > 0.0) {
        e.row(r) /= scale;
        comp.visible.row(r) /= scale;
        comp.rhs(r) /= scale;
      }
    }

    // Shared decomposition lookup by exact content.
    std::shared_ptr<const SdpReduction::Decomposition> dec;
    Fnv1a h;
    h.update(e);
    auto& bucket = cache[h.digest()];
    for (const auto& entry : bucket)
      if (entry.key.rows() == e.rows() && entry.key.cols() == e.cols() && entry.key == e)
        dec = entry.dec;
    if (!dec) {
      auto fresh = std::make_shared<SdpReduction::Decomposition>();
      Eigen::BDCSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullU | Eigen::ComputeThinV);
      fresh->u = svd.matrixU();
      fresh->vmat = svd.matrixV();
      fresh->sv = svd.singularValues();
      fresh->rank = numeric_rank(fresh->sv, e.rows(), e.cols(), opts.rank_tol);
      dec = fresh;
      bucket.push_back(CacheEntry{e, dec});
    }
    comp.dec = dec;
    eliminated_nullity += nq - dec->rank;
    eliminated_rank += dec->rank;

    const Eigen::MatrixXd w = dec->left_null();  // nrows x (nrows - rank)
    const double coupling_scale =
        comp.visible.size() > 0 ? comp.visible.cwiseAbs().maxCoeff() : 0.0;
    const double rhs_scale = comp.rhs.size() > 0 ? comp.rhs.cwiseAbs().maxCoeff() : 0.0;
    // The computed null directions carry an angle error of about
    // eps * kappa(E), so induced rows below that level are numerical zeros.
    const double kappa =
        dec->rank > 0 ? dec->sv(0) / dec->sv(dec->rank - 1) : 1.0;
    const double drop_tol = std::max(
        opts.compat_drop_tol, 1e4 * std::numeric_limits<double>::epsilon() * kappa);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      Eigen::VectorXd coeffs = comp.visible.transpose() * w.col(c);
      const double rhs = w.col(c).dot(comp.rhs);
      const double coeff_mag = coeffs.size() > 0 ? coeffs.cwiseAbs().maxCoeff() : 0.0;
      if (coeff_mag <= drop_tol * coupling_scale &&
          std::abs(rhs) <= drop_tol * std::max(coupling_scale, rhs_scale))
        continue;
      pool.push_back(PoolRow{std::move(coeffs), rhs, drop_tol * coupling_scale,
                             "rank-deficiency of elimination block starting at equality row " +
                                 std::to_string(row_ids.front())});
    }
    red.components_.push_back(std::move(comp));
  }

  // Solve the pooled system on the visible set.
  const int np = static_cast<int>(pool.size());
  Eigen::MatrixXd cmat = Eigen::MatrixXd::Zero(np, ns);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(np);
  for (int r = 0; r < np; ++r) {
    cmat.row(r) = pool[static_cast<std::size_t>(r)].coeffs.transpose();
    d(r) = pool[static_cast<std::size_t>(r)].rhs;
  }

  int pool_rank = 0;
  if (ns == 0) {
    red.visible_particular_.resize(0);
    red.visible_null_.resize(0, 0);
    for (int r = 0; r < np; ++r)
      if (std::abs(d(r)) > opts.consistency_tol)
        throw InconsistentEqualitiesError(
            "equality system is inconsistent (" + pool[static_cast<std::size_t>(r)].provenance +
                ", residual " + std::to_string(std::abs(d(r))) + ")",
            r, std::abs(d(r)));
  } else if (np == 0) {
    red.visible_particular_ = Eigen::VectorXd::Zero(ns);
    red.visible_null_ = Eigen::MatrixXd::Identity(ns, ns);
  } else {
    // Singular values below the accuracy of the noisiest contributing row
    // cannot be trusted to pin anything.
    double sigma_floor = 0.0;
    for (const auto& row : pool) sigma_floor = std::max(sigma_floor, 10.0 * row.noise);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(cmat, Eigen::ComputeThinU | Eigen::ComputeFullV);
    pool_rank = 0;
    {
      const auto& sv = svd.singularValues();
      const double base = opts.rank_tol >= 0.0
                              ? opts.rank_tol
                              : std::max(np, ns) * std::numeric_limits<double>::epsilon() *
                                    (sv.size() > 0 ? sv(0) : 0.0);
      const double threshold = std::max(base, sigma_floor);
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > threshold) ++pool_rank;
    }
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(pool_rank);
    if (pool_rank > 0)
      scaled = svd.singularValues().head(pool_rank).cwiseInverse().asDiagonal() *
               (svd.matrixU().leftCols(pool_rank).transpose() * d);
    red.visible_particular_ = svd.matrixV().leftCols(pool_rank) * scaled;
    const Eigen::VectorXd resid = cmat * red.visible_particular_ - d;
    Eigen::Index worst = 0;
    const double worst_abs = resid.size() > 0 ? resid.cwiseAbs().maxCoeff(&worst) : 0.0;
    if (worst_abs > std::max(opts.consistency_tol, sigma_floor))
      throw InconsistentEqualitiesError(
          "equality system is inconsistent (" +
              pool[static_cast<std::size_t>(worst)].provenance + ", residual " +
              std::to_string(worst_abs) + ")",
          static_cast<int>(worst), worst_abs);
    red.visible_null_ = svd.matrixV().rightCols(ns - pool_rank);
  }
  red.reduced_vars_ = static_cast<int>(red.visible_null_.cols());

  // Unknowns untouched by both the LMIs and the equalities stay free.
  int unconstrained = 0;
  {
    std::vector<char> in_row(static_cast<std::size_t>(total), 0);
    for (const auto& row : rows)
      for (const auto& [idx, c] : row.qpart) in_row[static_cast<std::size_t>(idx)] = 1;
    for (int i = 0; i < total; ++i)
      if (!is_visible[static_cast<std::size_t>(i)] && !in_row[static_cast<std::size_t>(i)])
        ++unconstrained;
  }
  red.equality_rank_ = eliminated_rank + pool_rank;
  red.free_parameters_ = eliminated_nullity + unconstrained + red.reduced_vars_;

  // Rewrite every block over the reduced decision vector.
  SdpProblem reduced;
  const int r = red.reduced_vars_;
  int vvar = -1;
  if (r > 0) vvar = reduced.declare_free("v", r, 1);
  for (const auto& b : blocks) {
    LmiBlock nb;
    nb.dim = b.dim;
    nb.label = b.label;
    nb.constant = b.constant;
    std::vector<Eigen::MatrixXd> var_coeff(static_cast<std::size_t>(r),
                                           Eigen::MatrixXd::Zero(b.dim, b.dim));
    for (const auto& t : b.terms) {
      const int flat = problem.flat_index(t.variable, t.entry);
      const int pos = visible_pos[static_cast<std::size_t>(flat)];
      nb.constant += red.visible_particular_(pos) * t.coeff;
      for (int j = 0; j < r; ++j) {
        const double w = red.visible_null_(pos, j);
        if (w != 0.0) var_coeff[static_cast<std::size_t>(j)] += w * t.coeff;
      }
    }
    for (int j = 0; j < r; ++j)
      if (!var_coeff[static_cast<std::size_t>(j)].isZero(0.0))
        nb.terms.push_back(LmiTerm{vvar, j, var_coeff[static_cast<std::size_t>(j)]});
    reduced.add_lmi(std::move(nb));
  }
  red.reduced_ = std::move(reduced);
  return red;
}

Eigen::VectorXd SdpReduction::recover_flat(const Eigen::VectorXd& v) const {
  if (v.size() != reduced_vars_)
    throw DimensionError("reduced decision vector has wrong length");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(original_.scalar_count());
  Eigen::VectorXd zs = visible_particular_;
  if (reduced_vars_ > 0) zs += visible_null_ * v;

  // The pooled constraint rows carry numerical noise, while each component's
  // own decomposition states the same consistency requirement to full
  // precision. One least-squares correction within the remaining freedom
  // removes the first-order error; the constraints are linear, so a single
  // step suffices and the recovery map stays affine in v.
  if (reduced_vars_ > 0 && !components_.empty()) {
    int total_null = 0;
    for (const auto& comp : components_)
      total_null += static_cast<int>(comp.dec->u.cols()) - comp.dec->rank;
    if (total_null > 0) {
      Eigen::MatrixXd gain(total_null, reduced_vars_);
      Eigen::VectorXd target(total_null);
      int at = 0;
      for (const auto& comp : components_) {
        const Eigen::MatrixXd w = comp.dec->left_null();
        const int k = static_cast<int>(w.cols());
        if (k == 0) continue;
        target.segment(at, k) = w.transpose() * (comp.rhs - comp.visible * zs);
        gain.middleRows(at, k) = w.transpose() * comp.visible * visible_null_;
        at += k;
      }
      if (at > 0) {
        const Eigen::VectorXd dv = gain.topRows(at)
                                       .bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                                       .solve(target.head(at));
        const Eigen::VectorXd step = visible_null_ * dv;
        if (step.allFinite() &&
            step.cwiseAbs().maxCoeff() <= 1e-2 * (1.0 + zs.cwiseAbs().maxCoeff()))
          zs += step;
      }
    }
  }

  for (std::size_t k = 0; k < visible_.size(); ++k)
    z(visible_[k]) = zs(static_cast<Eigen::Index>(k));
  for (const auto& comp : components_) {
    Eigen::VectorXd rhs = comp.rhs;
    if (zs.size() > 0) rhs -= comp.visible * zs;
    const Eigen::VectorXd y = comp.dec->minnorm_solve(rhs);
    for (std::size_t k = 0; k < comp.qvars.size(); ++k)
      z(comp.qvars[k]) = y(static_cast<Eigen::Index>(k));
  }
  return z;
}

std::map<std::string, Eigen::MatrixXd> SdpReduction::recover(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd z = recover_flat(v);
  std::map<std::string, Eigen::MatrixXd> out;
  for (int i = 0; i < original_.variable_count(); ++i)
    out[original_.variable(i).name] = original_.unpack(i, z);
  return out;
}

}  // namespace deltaiss::sdp
