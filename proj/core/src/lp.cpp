#include "coopdea/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "coopdea/errors.hpp"

namespace coopdea::lp {

const char* to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

LpProblem::LpProblem(Sense sense, std::vector<double> objective)
    : sense_(sense), objective_(std::move(objective)), lower_(objective_.size(), 0.0) {
  for (double c : objective_) {
    if (!std::isfinite(c)) throw std::invalid_argument("LpProblem: non-finite objective coefficient");
  }
}

std::size_t LpProblem::add_constraint(std::span<const double> coeffs, Relation relation, double rhs) {
  if (coeffs.size() != num_variables()) {
    throw std::invalid_argument("LpProblem: constraint has " + std::to_string(coeffs.size()) +
                                " coefficients, expected " + std::to_string(num_variables()));
  }
  if (!std::isfinite(rhs) ||
      !std::all_of(coeffs.begin(), coeffs.end(), [](double a) { return std::isfinite(a); })) {
    throw std::invalid_argument("LpProblem: non-finite constraint data");
  }
  coeffs_.insert(coeffs_.end(), coeffs.begin(), coeffs.end());
  relations_.push_back(relation);
  rhs_.push_back(rhs);
  return rhs_.size() - 1;
}

void LpProblem::set_lower_bound(std::size_t var, double bound) {
  if (var >= num_variables()) throw std::invalid_argument("LpProblem: variable index out of range");
  if (std::isnan(bound) || bound == std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("LpProblem: lower bound must be finite or -infinity");
  }
  lower_[var] = bound;
}

void LpProblem::reserve_constraints(std::size_t rows) {
  coeffs_.reserve(rows * num_variables());
  relations_.reserve(rows);
  rhs_.reserve(rows);
}

double max_violation(const LpProblem& problem, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < problem.num_variables(); ++j) {
    worst = std::max(worst, problem.lower_bound(j) - x[j]);
  }
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    auto row = problem.row(i);
    double activity = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) activity += row[j] * x[j];
    const double gap = activity - problem.rhs(i);
    switch (problem.relation(i)) {
      case Relation::kLessEqual:
        worst = std::max(worst, gap);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, -gap);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(gap));
        break;
    }
  }
  return worst;
}

namespace {

enum class ColumnKind : std::uint8_t { kRow, kSurplus, kArtificial };

struct Column {
  ColumnKind kind;
  // +1 / -1: orientation of a row column (the row is used as o * a_i x <= o * b_i).
  std::int8_t orient;
  std::uint32_t index;
};

enum class PhaseResult { kOptimal, kUnbounded };

// Revised simplex on the dual of the primal problem, written in standard form
//
//   min g^T w   s.t.  M w = h,  w >= 0.
//
// The primal is first brought to max form with variables shifted to
// x' = x - l >= 0 (or free). M has one row per primal variable and one column
// per oriented primal row, plus a negated identity column for each bounded
// variable. Row j of M is scaled by sigma_j so that h = sigma * c >= 0.
// The simplex multipliers pi give back the primal point x'_j = sigma_j pi_j,
// and the reduced cost of a row column is the primal slack of that row.
class DualStandardForm {
 public:
  DualStandardForm(const LpProblem& problem, const SolverOptions& options, bool zero_objective)
      : problem_(problem),
        options_(options),
        rows_(problem.num_variables()),
        shifted_rhs_(problem.num_constraints()),
        sigma_(rows_, 1.0),
        h_(rows_),
        primal_(rows_, 0.0),
        pi_(rows_) {
    const double obj_sign = problem.sense() == Sense::kMaximize ? 1.0 : -1.0;
    for (std::size_t j = 0; j < rows_; ++j) {
      const double c = zero_objective ? 0.0 : obj_sign * problem.objective()[j];
      sigma_[j] = c < 0.0 ? -1.0 : 1.0;
      h_(static_cast<Eigen::Index>(j)) = sigma_[j] * c;
    }
    for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
      auto row = problem.row(i);
      double b = problem.rhs(i);
      for (std::size_t j = 0; j < rows_; ++j) {
        if (std::isfinite(problem.lower_bound(j))) b -= row[j] * problem.lower_bound(j);
      }
      shifted_rhs_[i] = b;
      const auto idx = static_cast<std::uint32_t>(i);
      switch (problem.relation(i)) {
        case Relation::kLessEqual:
          columns_.push_back({ColumnKind::kRow, 1, idx});
          break;
        case Relation::kGreaterEqual:
          columns_.push_back({ColumnKind::kRow, -1, idx});
          break;
        case Relation::kEqual:
          columns_.push_back({ColumnKind::kRow, 1, idx});
          columns_.push_back({ColumnKind::kRow, -1, idx});
          break;
      }
    }
    for (std::size_t j = 0; j < rows_; ++j) {
      if (std::isfinite(problem.lower_bound(j))) {
        columns_.push_back({ColumnKind::kSurplus, 1, static_cast<std::uint32_t>(j)});
      }
    }
    first_artificial_ = columns_.size();
    for (std::size_t j = 0; j < rows_; ++j) {
      columns_.push_back({ColumnKind::kArtificial, 1, static_cast<std::uint32_t>(j)});
      basis_.push_back(first_artificial_ + j);
    }
    in_basis_.assign(columns_.size(), false);
    for (std::size_t b : basis_) in_basis_[b] = true;
  }

  // Phase one: minimize the sum of artificials. Returns false if the dual
  // program is infeasible.
  bool phase_one() {
    phase_ = 1;
    if (run() != PhaseResult::kOptimal) throw SolverError("simplex: phase one cannot be unbounded");
    double infeasibility = 0.0;
    double scale = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      scale = std::max(scale, std::abs(h_(static_cast<Eigen::Index>(r))));
      if (is_artificial(basis_[r])) infeasibility += std::abs(beta_(static_cast<Eigen::Index>(r)));
    }
    if (infeasibility > options_.tolerances.feasibility * scale) return false;
    drive_out_artificials();
    return true;
  }

  PhaseResult phase_two() {
    phase_ = 2;
    return run();
  }

  std::size_t iterations() const { return iterations_; }

  // Primal point in the original variables.
  std::vector<double> primal_values() const {
    std::vector<double> x(rows_);
    for (std::size_t j = 0; j < rows_; ++j) {
      const double lb = problem_.lower_bound(j);
      x[j] = primal_[j] + (std::isfinite(lb) ? lb : 0.0);
    }
    return x;
  }

  std::vector<double> shadow_prices() const {
    const double obj_sign = problem_.sense() == Sense::kMaximize ? 1.0 : -1.0;
    std::vector<double> duals(problem_.num_constraints(), 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const Column& col = columns_[basis_[r]];
      if (col.kind != ColumnKind::kRow) continue;
      duals[col.index] += obj_sign * col.orient * beta_(static_cast<Eigen::Index>(r));
    }
    return duals;
  }

 private:
  bool is_artificial(std::size_t col) const { return col >= first_artificial_; }

  double cost(std::size_t col) const {
    const Column& c = columns_[col];
    if (phase_ == 1) return c.kind == ColumnKind::kArtificial ? 1.0 : 0.0;
    if (c.kind == ColumnKind::kRow) return c.orient * shifted_rhs_[c.index];
    return 0.0;
  }

  Eigen::VectorXd column(std::size_t col) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_));
    const Column& c = columns_[col];
    switch (c.kind) {
      case ColumnKind::kRow: {
        auto row = problem_.row(c.index);
        for (std::size_t j = 0; j < rows_; ++j) v(static_cast<Eigen::Index>(j)) = sigma_[j] * c.orient * row[j];
        break;
      }
      case ColumnKind::kSurplus:
        v(c.index) = -sigma_[c.index];
        break;
      case ColumnKind::kArtificial:
        v(c.index) = 1.0;
        break;
    }
    return v;
  }

  // Reduced cost g_col - pi^T M_col, using the current primal point.
  double reduced_cost(std::size_t col) const {
    const Column& c = columns_[col];
    switch (c.kind) {
      case ColumnKind::kRow: {
        auto row = problem_.row(c.index);
        double activity = 0.0;
        for (std::size_t j = 0; j < rows_; ++j) activity += row[j] * primal_[j];
        return cost(col) - c.orient * activity;
      }
      case ColumnKind::kSurplus:
        return primal_[c.index];
      case ColumnKind::kArtificial:
        return cost(col) - pi_(c.index);
    }
    return 0.0;
  }

  void factorize() {
    const auto n = static_cast<Eigen::Index>(rows_);
    Eigen::MatrixXd basis_matrix(n, n);
    for (std::size_t r = 0; r < rows_; ++r) basis_matrix.col(static_cast<Eigen::Index>(r)) = column(basis_[r]);
    lu_.compute(basis_matrix);
    if (!(std::abs(lu_.determinant()) > 0.0) || lu_.rcond() < 1e-14) {
      throw SolverError("simplex: basis became singular");
    }
    beta_ = lu_.solve(h_);
    Eigen::VectorXd basic_costs(n);
    for (std::size_t r = 0; r < rows_; ++r) basic_costs(static_cast<Eigen::Index>(r)) = cost(basis_[r]);
    pi_ = lu_.transpose().solve(basic_costs);
    for (std::size_t j = 0; j < rows_; ++j) primal_[j] = sigma_[j] * pi_(static_cast<Eigen::Index>(j));
  }

  PhaseResult run() {
    const double dual_tol = 0.1 * options_.tolerances.feasibility;
    const double pivot_tol = options_.tolerances.pivot;
    std::size_t degenerate_run = 0;
    while (true) {
      if (iterations_ >= options_.max_iterations) {
        throw SolverError("simplex: iteration limit of " + std::to_string(options_.max_iterations) +
                          " reached");
      }
      factorize();
      const bool bland = degenerate_run >= options_.bland_threshold;

      std::size_t entering = columns_.size();
      double best = -dual_tol;
      for (std::size_t col = 0; col < first_artificial_; ++col) {
        if (in_basis_[col]) continue;
        const double d = reduced_cost(col);
        if (d < best) {
          entering = col;
          best = d;
          if (bland) break;
        }
      }
      if (entering == columns_.size()) return PhaseResult::kOptimal;

      const Eigen::VectorXd alpha = lu_.solve(column(entering));
      std::size_t leave_row = rows_;
      double best_ratio = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = alpha(static_cast<Eigen::Index>(r));
        if (a <= pivot_tol) continue;
        const double ratio = std::max(beta_(static_cast<Eigen::Index>(r)), 0.0) / a;
        if (leave_row == rows_ || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
          leave_row = r;
          best_ratio = ratio;
          continue;
        }
        if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
          // Tie: Bland takes the lowest basic column, otherwise prefer the
          // larger pivot element.
          const bool take = bland ? basis_[r] < basis_[leave_row]
                                  : a > alpha(static_cast<Eigen::Index>(leave_row));
          if (take) {
            leave_row = r;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (leave_row == rows_) return PhaseResult::kUnbounded;

      degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
      in_basis_[basis_[leave_row]] = false;
      in_basis_[entering] = true;
      basis_[leave_row] = entering;
      ++iterations_;
    }
  }

  // Replace artificials still basic at zero level by structural columns. An
  // artificial that cannot be pivoted out marks a redundant row and stays.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      factorize();
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_));
      unit(static_cast<Eigen::Index>(r)) = 1.0;
      const Eigen::VectorXd rho = lu_.transpose().solve(unit);
      for (std::size_t col = 0; col < first_artificial_; ++col) {
        if (in_basis_[col]) continue;
        if (std::abs(rho.dot(column(col))) > 1e-7) {
          in_basis_[basis_[r]] = false;
          in_basis_[col] = true;
          basis_[r] = col;
          break;
        }
      }
    }
    factorize();
  }

  const LpProblem& problem_;
  const SolverOptions& options_;
  std::size_t rows_;
  std::vector<double> shifted_rhs_;
  std::vector<double> sigma_;
  Eigen::VectorXd h_;
  std::vector<Column> columns_;
  std::size_t first_artificial_ = 0;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
  int phase_ = 1;
  std::size_t iterations_ = 0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd beta_;
  std::vector<double> primal_;
  Eigen::VectorXd pi_;
};

void finish(const LpProblem& problem, const SolverOptions& options, LpSolution& solution) {
  const auto& x = solution.values;
  solution.objective_value = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) solution.objective_value += problem.objective()[j] * x[j];
  solution.tight.assign(problem.num_constraints(), false);
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    auto row = problem.row(i);
    double activity = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) activity += row[j] * x[j];
    solution.tight[i] = std::abs(activity - problem.rhs(i)) <= options.tolerances.feasibility;
  }
  const double violation = max_violation(problem, x);
  if (violation > options.tolerances.feasibility) {
    throw SolverError("simplex: optimal point violates constraints by " + std::to_string(violation));
  }
}

// With no variables every constraint reads 0 (rel) b.
LpSolution solve_empty(const LpProblem& problem, const SolverOptions& options) {
  LpSolution solution;
  solution.status = Status::kOptimal;
  const double tol = options.tolerances.feasibility;
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    const double b = problem.rhs(i);
    const bool ok = (problem.relation(i) == Relation::kLessEqual && b >= -tol) ||
                    (problem.relation(i) == Relation::kGreaterEqual && b <= tol) ||
                    (problem.relation(i) == Relation::kEqual && std::abs(b) <= tol);
    if (!ok) solution.status = Status::kInfeasible;
  }
  if (solution.optimal()) {
    solution.duals.assign(problem.num_constraints(), 0.0);
    finish(problem, options, solution);
  }
  return solution;
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const SolverOptions& options) {
  if (problem.num_variables() == 0) return solve_empty(problem, options);

  LpSolution solution;
  DualStandardForm dual(problem, options, /*zero_objective=*/false);
  if (!dual.phase_one()) {
    // The dual is infeasible, so the primal is unbounded or infeasible. The
    // dual of the zero-objective primal is always feasible and tells them apart.
    DualStandardForm check(problem, options, /*zero_objective=*/true);
    check.phase_one();
    const PhaseResult result = check.phase_two();
    solution.status = result == PhaseResult::kUnbounded ? Status::kInfeasible : Status::kUnbounded;
    solution.iterations = dual.iterations() + check.iterations();
    return solution;
  }
  const PhaseResult result = dual.phase_two();
  solution.iterations = dual.iterations();
  if (result == PhaseResult::kUnbounded) {
    solution.status = Status::kInfeasible;
    return solution;
  }
  solution.status = Status::kOptimal;
  solution.values = dual.primal_values();
  solution.duals = dual.shadow_prices();
  finish(problem, options, solution);
  return solution;
}

}  // namespace coopdea::lp
