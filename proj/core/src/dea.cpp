#include "coopdea/dea.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <thread>

#include "coopdea/errors.hpp"

namespace coopdea::dea {

DmuPanel::DmuPanel(std::vector<std::string> ids, Dimensions dims, Eigen::MatrixXd inputs,
                   Eigen::MatrixXd intermediates, Eigen::MatrixXd outputs)
    : ids_(std::move(ids)),
      dims_(dims),
      inputs_(std::move(inputs)),
      intermediates_(std::move(intermediates)),
      outputs_(std::move(outputs)) {
  const auto n = static_cast<Eigen::Index>(ids_.size());
  if (dims_.inputs == 0 || dims_.intermediates == 0 || dims_.outputs == 0) {
    throw std::invalid_argument("DmuPanel: every dimension count must be at least 1");
  }
  if (inputs_.rows() != n || intermediates_.rows() != n || outputs_.rows() != n ||
      inputs_.cols() != static_cast<Eigen::Index>(dims_.inputs) ||
      intermediates_.cols() != static_cast<Eigen::Index>(dims_.intermediates) ||
      outputs_.cols() != static_cast<Eigen::Index>(dims_.outputs)) {
    throw std::invalid_argument("DmuPanel: matrix shapes do not match ids and dimensions");
  }
}

void DmuPanel::validate_for_allocation() const {
  if (size() < 2) throw InputError("panel needs at least 2 DMUs for cross-efficiency");
  const auto check = [&](const Eigen::MatrixXd& m, const char* what) {
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (!(m(j, c) > 0.0)) {
          throw InputError(std::string("non-positive ") + what + " value for DMU '" +
                           ids_[static_cast<std::size_t>(j)] + "' in column " + std::to_string(c + 1));
        }
      }
    }
  };
  check(inputs_, "input");
  check(intermediates_, "intermediate");
  check(outputs_, "output");
}

namespace {

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& m, const char* what) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double sum = m.col(c).sum();
    if (!(sum > 0.0)) {
      throw InputError(std::string("cannot normalize ") + what + " column " + std::to_string(c + 1) +
                       ": column sum is not positive");
    }
    out.col(c) /= sum;
  }
  return out;
}

}  // namespace

DmuPanel normalize_panel(const DmuPanel& panel) {
  return DmuPanel(panel.ids(), panel.dims(), normalize_columns(panel.inputs(), "input"),
                  normalize_columns(panel.intermediates(), "intermediate"),
                  normalize_columns(panel.outputs(), "output"));
}

std::string unit_label(std::size_t dmu, Stage stage) {
  return std::to_string(dmu + 1) + "." + std::to_string(stage_number(stage));
}

SubDmuSet::SubDmuSet(Eigen::MatrixXd inputs, Eigen::MatrixXd outputs, std::vector<SubDmuOrigin> origins)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), origins_(std::move(origins)) {
  const auto k = static_cast<Eigen::Index>(origins_.size());
  if (inputs_.rows() != k || outputs_.rows() != k) {
    throw std::invalid_argument("SubDmuSet: row count does not match origins");
  }
}

std::string SubDmuSet::label(std::size_t unit) const {
  return unit_label(origins_[unit].dmu, origins_[unit].stage);
}

SubDmuSet split_to_subdmus(const DmuPanel& panel) {
  const auto n = static_cast<Eigen::Index>(panel.size());
  const auto s = static_cast<Eigen::Index>(panel.dims().inputs);
  const auto q = static_cast<Eigen::Index>(panel.dims().intermediates);
  const auto t = static_cast<Eigen::Index>(panel.dims().outputs);

  Eigen::MatrixXd inputs = Eigen::MatrixXd::Zero(2 * n, s + q);
  Eigen::MatrixXd outputs = Eigen::MatrixXd::Zero(2 * n, q + t);
  std::vector<SubDmuOrigin> origins(static_cast<std::size_t>(2 * n));
  for (Eigen::Index j = 0; j < n; ++j) {
    inputs.block(j, 0, 1, s) = panel.inputs().row(j);
    outputs.block(j, 0, 1, q) = panel.intermediates().row(j);
    origins[static_cast<std::size_t>(j)] = {static_cast<std::size_t>(j), Stage::kFirst};

    inputs.block(n + j, s, 1, q) = panel.intermediates().row(j);
    outputs.block(n + j, q, 1, t) = panel.outputs().row(j);
    origins[static_cast<std::size_t>(n + j)] = {static_cast<std::size_t>(j), Stage::kSecond};
  }
  return SubDmuSet(std::move(inputs), std::move(outputs), std::move(origins));
}

CrossEfficiencyMatrix::CrossEfficiencyMatrix(Eigen::MatrixXd values, std::vector<std::string> labels,
                                             std::vector<Stage> stages)
    : values_(std::move(values)), labels_(std::move(labels)), stages_(std::move(stages)) {
  const auto k = static_cast<Eigen::Index>(labels_.size());
  if (values_.rows() != k || values_.cols() != k || stages_.size() != labels_.size()) {
    throw std::invalid_argument("CrossEfficiencyMatrix: inconsistent dimensions");
  }
}

namespace {

// Variables are laid out as [mu (output weights) | w (input weights)].
struct WeightLayout {
  std::size_t outputs;
  std::size_t inputs;
  std::size_t size() const { return outputs + inputs; }
};

std::vector<double> output_row(const SubDmuSet& units, std::size_t unit, const WeightLayout& layout,
                               double scale = 1.0) {
  std::vector<double> row(layout.size(), 0.0);
  for (std::size_t r = 0; r < layout.outputs; ++r) {
    row[r] = scale * units.outputs()(static_cast<Eigen::Index>(unit), static_cast<Eigen::Index>(r));
  }
  return row;
}

std::vector<double> input_row(const SubDmuSet& units, std::size_t unit, const WeightLayout& layout,
                              double scale = 1.0) {
  std::vector<double> row(layout.size(), 0.0);
  for (std::size_t c = 0; c < layout.inputs; ++c) {
    row[layout.outputs + c] =
        scale * units.inputs()(static_cast<Eigen::Index>(unit), static_cast<Eigen::Index>(c));
  }
  return row;
}

// mu.y_l - w.x_l <= 0 for every unit l.
void add_ratio_constraints(const SubDmuSet& units, const WeightLayout& layout, lp::LpProblem& problem) {
  for (std::size_t l = 0; l < units.size(); ++l) {
    std::vector<double> row = output_row(units, l, layout);
    const std::vector<double> in = input_row(units, l, layout, -1.0);
    for (std::size_t v = layout.outputs; v < layout.size(); ++v) row[v] = in[v];
    problem.add_constraint(row, lp::Relation::kLessEqual, 0.0);
  }
}

WeightLayout layout_of(const SubDmuSet& units) {
  return {static_cast<std::size_t>(units.outputs().cols()), static_cast<std::size_t>(units.inputs().cols())};
}

void check_index(const SubDmuSet& units, std::size_t unit) {
  if (unit >= units.size()) throw std::invalid_argument("unit index out of range");
}

// Rounding can leave efficiencies a hair outside [0, 1].
double clamp_efficiency(double value, const char* what) {
  if (value < -1e-7 || value > 1.0 + 1e-7) {
    throw SolverError(std::string(what) + " outside [0, 1]: " + std::to_string(value));
  }
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

double ccr_efficiency(const SubDmuSet& units, std::size_t d, const DeaOptions& options) {
  check_index(units, d);
  const WeightLayout layout = layout_of(units);
  lp::LpProblem problem(lp::Sense::kMaximize, output_row(units, d, layout));
  problem.reserve_constraints(units.size() + 1);
  add_ratio_constraints(units, layout, problem);
  problem.add_constraint(input_row(units, d, layout), lp::Relation::kEqual, 1.0);

  const lp::LpSolution solution = lp::solve_lp(problem, options.solver);
  if (!solution.optimal()) {
    throw SolverError("CCR program for unit " + units.label(d) + " is " + lp::to_string(solution.status));
  }
  return clamp_efficiency(solution.objective_value, "CCR efficiency");
}

double aggressive_cross_efficiency(const SubDmuSet& units, std::size_t d, std::size_t l, double theta_d,
                                   const DeaOptions& options) {
  check_index(units, d);
  check_index(units, l);
  const WeightLayout layout = layout_of(units);
  lp::LpProblem problem(lp::Sense::kMinimize, output_row(units, l, layout));
  problem.reserve_constraints(units.size() + 2);
  add_ratio_constraints(units, layout, problem);
  problem.add_constraint(input_row(units, l, layout), lp::Relation::kEqual, 1.0);

  // theta_d * w.x_d - mu.y_d = 0
  std::vector<double> pin = input_row(units, d, layout, theta_d);
  const std::vector<double> out = output_row(units, d, layout, -1.0);
  for (std::size_t r = 0; r < layout.outputs; ++r) pin[r] = out[r];
  problem.add_constraint(pin, lp::Relation::kEqual, 0.0);

  lp::LpSolution solution = lp::solve_lp(problem, options.solver);
  if (solution.status == lp::Status::kInfeasible) {
    // theta_d carries rounding from its own LP; allow one retry with a looser
    // feasibility tolerance before giving up.
    lp::SolverOptions relaxed = options.solver;
    relaxed.tolerances.feasibility *= 100.0;
    solution = lp::solve_lp(problem, relaxed);
  }
  if (!solution.optimal()) {
    throw SolverError("aggressive cross-efficiency program (" + units.label(d) + " -> " + units.label(l) +
                      ") is " + lp::to_string(solution.status));
  }
  return clamp_efficiency(solution.objective_value, "cross-efficiency");
}

CrossEfficiencyMatrix build_cem(const SubDmuSet& units, const DeaOptions& options) {
  const std::size_t k = units.size();
  std::vector<double> theta(k);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));

  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(k)));
  const auto for_each_row = [&](auto&& body) {
    if (workers == 1) {
      for (std::size_t d = 0; d < k; ++d) body(d);
      return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t d = w; d < k; d += workers) body(d);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  };

  for_each_row([&](std::size_t d) { theta[d] = ccr_efficiency(units, d, options); });
  for_each_row([&](std::size_t d) {
    for (std::size_t l = 0; l < k; ++l) {
      values(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(l)) =
          aggressive_cross_efficiency(units, d, l, theta[d], options);
    }
  });

  std::vector<std::string> labels(k);
  std::vector<Stage> stages(k);
  for (std::size_t u = 0; u < k; ++u) {
    labels[u] = units.label(u);
    stages[u] = units.origin(u).stage;
  }
  return CrossEfficiencyMatrix(std::move(values), std::move(labels), std::move(stages));
}

CrossEfficiencyMatrix stage_submatrix(const CrossEfficiencyMatrix& cem, Stage stage) {
  std::vector<std::size_t> members;
  for (std::size_t u = 0; u < cem.size(); ++u) {
    if (cem.stages()[u] == stage) members.push_back(u);
  }
  const auto m = static_cast<Eigen::Index>(members.size());
  Eigen::MatrixXd values(m, m);
  std::vector<std::string> labels;
  for (Eigen::Index a = 0; a < m; ++a) {
    labels.push_back(cem.labels()[members[static_cast<std::size_t>(a)]]);
    for (Eigen::Index b = 0; b < m; ++b) {
      values(a, b) = cem(members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)]);
    }
  }
  return CrossEfficiencyMatrix(std::move(values), std::move(labels),
                               std::vector<Stage>(members.size(), stage));
}

double average_cree(const CrossEfficiencyMatrix& cem, std::size_t i) {
  if (i >= cem.size()) throw std::invalid_argument("average_cree: index out of range");
  return cem.values().col(static_cast<Eigen::Index>(i)).mean();
}

}  // namespace coopdea::dea
