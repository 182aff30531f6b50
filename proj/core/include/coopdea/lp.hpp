#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace coopdea::lp {

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };
enum class Status { kOptimal, kInfeasible, kUnbounded };

const char* to_string(Status status);

struct Tolerances {
  double feasibility = 1e-8;
  double objective = 1e-7;
  double pivot = 1e-10;
};

struct SolverOptions {
  Tolerances tolerances;
  // Number of consecutive degenerate pivots after which entering columns are
  // chosen by Bland's rule until the objective moves again.
  std::size_t bland_threshold = 50;
  std::size_t max_iterations = 1'000'000;
};

// A dense linear program
//
//   optimize  c^T x
//   s.t.      a_i^T x  (<= | = | >=)  b_i
//             x_j >= l_j            (l_j = 0 by default, -inf for free)
//
// Constraint rows are stored contiguously, so problems with many rows and few
// columns (coalition programs) stay compact.
class LpProblem {
 public:
  LpProblem(Sense sense, std::vector<double> objective);

  // Throws std::invalid_argument on a length mismatch or a non-finite value.
  std::size_t add_constraint(std::span<const double> coeffs, Relation relation, double rhs);

  // A bound of -infinity makes the variable free.
  void set_lower_bound(std::size_t var, double bound);
  void set_free(std::size_t var) { set_lower_bound(var, -std::numeric_limits<double>::infinity()); }

  void reserve_constraints(std::size_t rows);

  Sense sense() const { return sense_; }
  std::size_t num_variables() const { return objective_.size(); }
  std::size_t num_constraints() const { return rhs_.size(); }
  std::span<const double> objective() const { return objective_; }
  std::span<const double> row(std::size_t i) const {
    return {coeffs_.data() + i * num_variables(), num_variables()};
  }
  Relation relation(std::size_t i) const { return relations_[i]; }
  double rhs(std::size_t i) const { return rhs_[i]; }
  double lower_bound(std::size_t var) const { return lower_[var]; }

 private:
  Sense sense_;
  std::vector<double> objective_;
  std::vector<double> coeffs_;
  std::vector<Relation> relations_;
  std::vector<double> rhs_;
  std::vector<double> lower_;
};

struct LpSolution {
  Status status = Status::kInfeasible;
  double objective_value = 0.0;
  std::vector<double> values;
  // tight[i] is set iff |a_i^T x - b_i| <= feasibility tolerance.
  std::vector<bool> tight;
  // Shadow prices: sensitivity of the optimal objective to each b_i.
  std::vector<double> duals;
  std::size_t iterations = 0;

  bool optimal() const { return status == Status::kOptimal; }
};

// Two-phase revised simplex. Deterministic: the same problem always yields
// bit-identical output. Infeasible and unbounded programs are reported through
// the status; exhausting max_iterations or hitting a singular basis throws
// coopdea::SolverError.
LpSolution solve_lp(const LpProblem& problem, const SolverOptions& options = {});

// Largest violation of any constraint or lower bound at x.
double max_violation(const LpProblem& problem, std::span<const double> x);

}  // namespace coopdea::lp
