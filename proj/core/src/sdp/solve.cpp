#include "deltaiss/sdp/solve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "deltaiss/errors.hpp"

namespace deltaiss::sdp {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    default: return "numerical-failure";
  }
}

namespace {

// One cone block of the margin program:  base + sum_j y_j * coeff_j  must be
// negative definite, where y = (v_0 .. v_{r-1}, t).
struct Block {
  Eigen::MatrixXd base;
  std::vector<std::pair<int, Eigen::MatrixXd>> coeffs;
  std::string label;
  bool counts_margin = false;  // true for problem blocks, false for bounds

  Eigen::MatrixXd eval(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd m = base;
    for (const auto& [j, a] : coeffs) m += y(j) * a;
    return m;
  }
};

double lambda_max(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double lambda_min(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// -logdet(-L) if -L is PD, +inf otherwise.
double neg_logdet(const Eigen::MatrixXd& l) {
  Eigen::LLT<Eigen::MatrixXd> llt(-l);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) sum += std::log(llt.matrixL()(i, i));
  return -2.0 * sum;
}

}  // namespace

json SolverStats::to_json() const {
  return json{{"newton_iterations", newton_iterations},
              {"final_mu", final_mu},
              {"margin", margin},
              {"max_equality_residual", max_equality_residual},
              {"worst_block_eig", worst_block_eig},
              {"most_violated", most_violated},
              {"reduced_variables", reduced_variables},
              {"free_parameters", free_parameters}};
}

json SdpSolution::to_json() const {
  json assign = json::object();
  for (const auto& [name, value] : assignment) assign[name] = matrix_to_json(value);
  return json{{"status", status_name(status)}, {"assignment", std::move(assign)},
              {"stats", stats.to_json()}};
}

SdpSolution SdpSolution::from_json(const json& j) {
  SdpSolution s;
  const auto status = j.at("status").get<std::string>();
  s.status = status == "feasible"    ? SolveStatus::Feasible
             : status == "infeasible" ? SolveStatus::Infeasible
                                      : SolveStatus::NumericalFailure;
  for (const auto& [name, value] : j.at("assignment").items())
    s.assignment[name] = matrix_from_json(value);
  if (j.contains("stats")) {
    const auto& st = j.at("stats");
    s.stats.margin = st.value("margin", 0.0);
    s.stats.newton_iterations = st.value("newton_iterations", 0);
    s.stats.final_mu = st.value("final_mu", 0.0);
    s.stats.max_equality_residual = st.value("max_equality_residual", 0.0);
    s.stats.worst_block_eig = st.value("worst_block_eig", 0.0);
    s.stats.most_violated = st.value("most_violated", std::string{});
    s.stats.reduced_variables = st.value("reduced_variables", 0);
    s.stats.free_parameters = st.value("free_parameters", 0);
  }
  return s;
}

SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts) {
  const SdpReduction reduction = presolve_eliminate(problem, opts.presolve);
  const SdpProblem& reduced = reduction.reduced_problem();
  const int r = reduction.reduced_variable_count();
  const int t_index = r;
  const int ny = r + 1;

  // Assemble margin-program blocks over y = (v, t).
  std::vector<Block> blocks;
  int cone_dim = 0;
  for (const auto& lmi : reduced.lmi_blocks()) {
    Block b;
    b.base = lmi.constant;
    b.label = lmi.label.empty() ? "lmi_" + std::to_string(blocks.size()) : lmi.label;
    b.counts_margin = true;
    for (const auto& term : lmi.terms) b.coeffs.emplace_back(term.entry, term.coeff);
    b.coeffs.emplace_back(t_index, Eigen::MatrixXd::Identity(lmi.dim, lmi.dim));
    cone_dim += lmi.dim;
    blocks.push_back(std::move(b));
  }
  {
    Block cap;  // t <= margin_cap
    cap.base = Eigen::MatrixXd::Constant(1, 1, -opts.margin_cap);
    cap.coeffs.emplace_back(t_index, Eigen::MatrixXd::Constant(1, 1, 1.0));
    cap.label = "margin_cap";
    blocks.push_back(std::move(cap));
    cone_dim += 1;
  }
  for (int j = 0; j < r; ++j) {  // |v_j| <= trust_radius
    Block up, dn;
    up.base = dn.base = Eigen::MatrixXd::Constant(1, 1, -opts.trust_radius);
    up.coeffs.emplace_back(j, Eigen::MatrixXd::Constant(1, 1, 1.0));
    dn.coeffs.emplace_back(j, Eigen::MatrixXd::Constant(1, 1, -1.0));
    up.label = dn.label = "trust_v" + std::to_string(j);
    blocks.push_back(std::move(up));
    blocks.push_back(std::move(dn));
    cone_dim += 2;
  }

  SdpSolution out;
  out.stats.reduced_variables = r;
  out.stats.free_parameters = reduction.free_parameter_count();

  Eigen::VectorXd y = Eigen::VectorXd::Zero(ny);
  bool converged = true;

  if (r == 0) {
    // No decision freedom beyond the margin itself.
    double t = opts.margin_cap;
    for (const auto& b : blocks)
      if (b.counts_margin) t = std::min(t, -lambda_max(b.base));
    y(t_index) = t;
  } else {
    double t0 = opts.margin_cap - 1.0;
    for (const auto& b : blocks)
      if (b.counts_margin) t0 = std::min(t0, -lambda_max(b.base) - 1.0);
    y(t_index) = t0;

    Eigen::VectorXd c = Eigen::VectorXd::Zero(ny);
    c(t_index) = -1.0;  // maximize t

    const double mu_min = std::max(opts.tol_gap / cone_dim, 1e-14);
    double mu = opts.mu0 * std::max(1.0, std::abs(t0));
    int outer = 0;
    int total_newton = 0;

    auto phi = [&](const Eigen::VectorXd& yy, double m) {
      double val = c.dot(yy);
      for (const auto& b : blocks) {
        const double nl = neg_logdet(b.eval(yy));
        if (std::isinf(nl)) return std::numeric_limits<double>::infinity();
        val += m * nl;
      }
      return val;
    };

    while (outer < opts.max_outer) {
      ++outer;
      const bool final_stage = mu <= mu_min;
      const double center_tol = final_stage ? 1e-6 * mu : 1e-2 * mu;

      for (int it = 0; it < opts.max_newton; ++it) {
        ++total_newton;
        Eigen::VectorXd grad = c;
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(ny, ny);
        bool ok = true;
        for (const auto& b : blocks) {
          const Eigen::MatrixXd s = -b.eval(y);
          Eigen::LLT<Eigen::MatrixXd> llt(s);
          if (llt.info() != Eigen::Success) {
            ok = false;
            break;
          }
          const Eigen::MatrixXd sinv =
              llt.solve(Eigen::MatrixXd::Identity(s.rows(), s.cols()));
          std::vector<std::pair<int, Eigen::MatrixXd>> prods;
          prods.reserve(b.coeffs.size());
          for (const auto& [j, a] : b.coeffs) {
            prods.emplace_back(j, sinv * a);
            grad(j) += mu * prods.back().second.trace();
          }
          for (std::size_t p = 0; p < prods.size(); ++p)
            for (std::size_t q = p; q < prods.size(); ++q) {
              const double h =
                  mu * (prods[p].second.array() * prods[q].second.transpose().array()).sum();
              hess(prods[p].first, prods[q].first) += h;
              if (prods[p].first != prods[q].first) hess(prods[q].first, prods[p].first) += h;
            }
        }
        if (!ok) {
          converged = false;
          break;
        }

        hess.diagonal().array() += 1e-13 * std::max(1.0, hess.trace() / ny);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        Eigen::VectorXd d = ldlt.solve(-grad);
        const double decrement2 = -grad.dot(d);
        if (!(decrement2 > center_tol)) break;

        double alpha = 1.0;
        const double phi0 = phi(y, mu);
        for (int ls = 0; ls < 60; ++ls) {
          const Eigen::VectorXd cand = y + alpha * d;
          const double val = phi(cand, mu);
          if (std::isfinite(val) && val <= phi0 + 1e-4 * alpha * grad.dot(d)) {
            y = cand;
            break;
          }
          alpha *= 0.5;
          if (ls == 59) {
            converged = false;
            it = opts.max_newton;  // stalled
          }
        }
        if (!converged) break;
      }

      if (!converged || final_stage) break;
      mu = std::max(mu * opts.mu_shrink, mu_min);
    }
    out.stats.newton_iterations = total_newton;
    out.stats.final_mu = mu;
  }

  const double margin = y(t_index);
  out.stats.margin = margin;

  Eigen::VectorXd v(r);
  for (int j = 0; j < r; ++j) v(j) = y(j);
  const Eigen::VectorXd z = reduction.recover_flat(v);
  for (int i = 0; i < problem.variable_count(); ++i)
    out.assignment[problem.variable(i).name] = problem.unpack(i, z);

  // Verify the recovered point against the declared problem from scratch.
  // Equality residuals are measured as backward errors: relative to each
  // row's coefficient scale, so acceptance does not depend on how the
  // caller scaled the equations.
  double max_eq = 0.0;
  for (const auto& eq : problem.equalities()) {
    double lhs = 0.0;
    double row_scale = std::abs(eq.rhs);
    for (const auto& t : eq.terms) {
      lhs += t.coeff * z(problem.flat_index(t.variable, t.entry));
      row_scale = std::max(row_scale, std::abs(t.coeff));
    }
    max_eq = std::max(max_eq, std::abs(lhs - eq.rhs) / std::max(1.0, row_scale));
  }
  out.stats.max_equality_residual = max_eq;

  double worst_eig = -std::numeric_limits<double>::infinity();
  std::string worst_label;
  for (const auto& lmi : problem.lmi_blocks()) {
    Eigen::MatrixXd m = lmi.constant;
    for (const auto& t : lmi.terms) m += z(problem.flat_index(t.variable, t.entry)) * t.coeff;
    const double eig = lambda_max(m);
    if (eig > worst_eig) {
      worst_eig = eig;
      worst_label = lmi.label.empty() ? "lmi" : lmi.label;
    }
  }
  for (const auto& floor : problem.psd_floors()) {
    const auto& info = problem.variable(floor.variable);
    const double eig = floor.margin - lambda_min(out.assignment.at(info.name));
    if (eig > worst_eig) {
      worst_eig = eig;
      worst_label = info.name + "_floor";
    }
  }
  if (std::isinf(worst_eig)) worst_eig = 0.0;  // no cone constraints at all
  out.stats.worst_block_eig = worst_eig;
  out.stats.most_violated = worst_label;

  if (margin > 0.0 && max_eq <= opts.tol_feas && worst_eig <= opts.tol_feas) {
    out.status = SolveStatus::Feasible;
  } else if (converged && margin <= 0.0) {
    out.status = SolveStatus::Infeasible;
  } else {
    out.status = SolveStatus::NumericalFailure;
  }
  return out;
}

}  // namespace deltaiss::sdp
