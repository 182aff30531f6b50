#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "coopdea/errors.hpp"
#include "coopdea/solvers.hpp"

namespace coopdea::solvers {

namespace {

using game::Coalition;

Eigen::VectorXd incidence(Coalition s, std::size_t k) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) v(static_cast<Eigen::Index>(i)) = game::contains(s, i) ? 1.0 : 0.0;
  return v;
}

// Orthonormal basis of the span of settled coalition incidence vectors.
class SpanBasis {
 public:
  explicit SpanBasis(std::size_t dim) : dim_(dim) {}

  std::size_t rank() const { return basis_.size(); }

  bool contains(Coalition s) const {
    const Eigen::VectorXd a = incidence(s, dim_);
    return residual(a).norm() <= 1e-9 * a.norm();
  }

  // Returns false if s is already in the span.
  bool add(Coalition s) {
    const Eigen::VectorXd a = incidence(s, dim_);
    Eigen::VectorXd r = residual(a);
    const double norm = r.norm();
    if (norm <= 1e-9 * a.norm()) return false;
    basis_.push_back(r / norm);
    return true;
  }

 private:
  // Gram-Schmidt projection applied twice for stability.
  Eigen::VectorXd residual(const Eigen::VectorXd& a) const {
    Eigen::VectorXd r = a;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis_) r -= q.dot(r) * q;
    }
    return r;
  }

  std::size_t dim_;
  std::vector<Eigen::VectorXd> basis_;
};

struct Settled {
  Coalition coalition;
  double value;  // x(S) is held at this level
};

}  // namespace

SolutionVector nucleolus(const game::TuGame& game, const NucleolusOptions& options) {
  const std::size_t k = game.players();
  if (k > kMaxExactPlayers) {
    throw SizeLimitError("nucleolus limited to " + std::to_string(kMaxExactPlayers) + " players, got " +
                         std::to_string(k));
  }
  SolutionVector result;
  result.kind = SolutionConcept::kNucleolus;
  const double grand = game.grand_value();
  if (k == 1) {
    result.x = {grand};
    return result;
  }

  const Coalition all = game.grand();
  std::vector<double> singleton(k);
  double singleton_total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    singleton[i] = game.value(Coalition{1} << i);
    singleton_total += singleton[i];
  }
  const double scale = std::max(1.0, std::abs(grand));
  if (singleton_total > grand + options.solver.tolerances.feasibility * scale) {
    throw InputError("imputation set is empty: singleton values exceed v(N)");
  }

  std::vector<Coalition> open;
  open.reserve(static_cast<std::size_t>(all) - 1);
  for (Coalition s = 1; s < all; ++s) open.push_back(s);

  std::vector<Settled> settled;
  SpanBasis span(k);
  span.add(all);

  std::vector<double> row(k + 1);
  while (true) {
    std::vector<double> objective(k + 1, 0.0);
    objective[k] = 1.0;
    lp::LpProblem problem(lp::Sense::kMaximize, std::move(objective));
    // x_i >= v({i}) keeps the search inside the imputation set; epsilon is free.
    for (std::size_t i = 0; i < k; ++i) problem.set_lower_bound(i, singleton[i]);
    problem.set_free(k);
    problem.reserve_constraints(open.size() + settled.size() + 1);

    for (Coalition s : open) {
      for (std::size_t i = 0; i < k; ++i) row[i] = game::contains(s, i) ? 1.0 : 0.0;
      row[k] = -1.0;
      problem.add_constraint(row, lp::Relation::kGreaterEqual, game.value(s));
    }
    row[k] = 0.0;
    for (const Settled& fixed : settled) {
      for (std::size_t i = 0; i < k; ++i) row[i] = game::contains(fixed.coalition, i) ? 1.0 : 0.0;
      problem.add_constraint(row, lp::Relation::kEqual, fixed.value);
    }
    std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
    problem.add_constraint(row, lp::Relation::kEqual, grand);

    const lp::LpSolution solution = lp::solve_lp(problem, options.solver);
    if (!solution.optimal()) {
      throw SolverError(std::string("nucleolus program is ") + lp::to_string(solution.status));
    }
    ++result.iterations;
    const double epsilon = solution.values[k];
    if (!result.epsilon) result.epsilon = epsilon;
    result.x.assign(solution.values.begin(), solution.values.begin() + static_cast<std::ptrdiff_t>(k));

    // Coalitions with a positive shadow price are tight in every optimum.
    std::vector<Coalition> newly_settled;
    for (std::size_t idx = 0; idx < open.size(); ++idx) {
      if (std::abs(solution.duals[idx]) <= options.dual_tolerance) continue;
      double surplus = -epsilon - game.value(open[idx]);
      for (std::size_t i = 0; i < k; ++i) {
        if (game::contains(open[idx], i)) surplus += result.x[i];
      }
      if (std::abs(surplus) <= options.slack_tolerance * scale) newly_settled.push_back(open[idx]);
    }
    if (newly_settled.empty()) throw SolverError("nucleolus: no coalition could be settled");

    for (Coalition s : newly_settled) {
      ++result.fixed_coalitions;
      if (span.add(s)) settled.push_back({s, game.value(s) + epsilon});
    }
    if (span.rank() == k) break;

    std::vector<Coalition> still_open;
    still_open.reserve(open.size());
    for (Coalition s : open) {
      if (!span.contains(s)) still_open.push_back(s);
    }
    open = std::move(still_open);
    if (open.empty()) break;
  }
  return result;
}

}  // namespace coopdea::solvers
