#include "coopdea/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "coopdea/errors.hpp"
#include "coopdea/game.hpp"

namespace coopdea::alloc {

std::string_view to_string(Mode mode) { return mode == Mode::kDirect ? "direct" : "secondary"; }

std::string_view to_string(SingletonUniverse universe) {
  return universe == SingletonUniverse::kPerStage ? "per-stage" : "full";
}

namespace {

struct StageSplit {
  std::vector<std::size_t> members[2];  // indices into the 2n matrix, per stage
};

StageSplit split_stages(const dea::CrossEfficiencyMatrix& cem) {
  StageSplit split;
  for (std::size_t u = 0; u < cem.size(); ++u) {
    split.members[cem.stages()[u] == dea::Stage::kFirst ? 0 : 1].push_back(u);
  }
  if (split.members[0].empty() || split.members[0].size() != split.members[1].size()) {
    throw InputError("cross-efficiency matrix must hold n stage-1 and n stage-2 units");
  }
  return split;
}

void check_revenue(double revenue) {
  if (!(revenue > 0.0) || !std::isfinite(revenue)) throw InputError("revenue must be positive and finite");
}

solvers::SolutionVector run_concept(const game::TuGame& game, solvers::SolutionConcept kind,
                                    const AllocationOptions& options) {
  switch (kind) {
    case solvers::SolutionConcept::kShapley:
      return solvers::shapley(game);
    case solvers::SolutionConcept::kLeastCore:
      return solvers::least_core(game, options.solver);
    case solvers::SolutionConcept::kNucleolus: {
      solvers::NucleolusOptions nucleolus_options;
      nucleolus_options.solver = options.solver;
      return solvers::nucleolus(game, nucleolus_options);
    }
  }
  throw std::invalid_argument("unknown solution concept");
}

// Fills labels, stages, average CREE, comparison values and ranks once the
// allocation column is known.
AllocationReport assemble(const dea::CrossEfficiencyMatrix& cem_2n, const StageSplit& split,
                          std::vector<double> allocation, Mode mode, solvers::SolutionConcept kind,
                          double revenue) {
  const std::size_t k = cem_2n.size();
  AllocationReport report;
  report.mode = mode;
  report.kind = kind;
  report.revenue = revenue;
  report.players.resize(k);

  std::vector<double> avg(k);
  for (int s = 0; s < 2; ++s) {
    const dea::Stage stage = s == 0 ? dea::Stage::kFirst : dea::Stage::kSecond;
    const dea::CrossEfficiencyMatrix block = dea::stage_submatrix(cem_2n, stage);
    std::vector<double> stage_alloc;
    for (std::size_t pos = 0; pos < split.members[s].size(); ++pos) {
      const std::size_t u = split.members[s][pos];
      avg[u] = dea::average_cree(block, pos);
      stage_alloc.push_back(allocation[u]);
    }
    const std::vector<std::size_t> stage_ranks = rank_rows(stage_alloc);
    double total = 0.0;
    for (std::size_t pos = 0; pos < split.members[s].size(); ++pos) {
      report.players[split.members[s][pos]].stage_rank = stage_ranks[pos];
      total += stage_alloc[pos];
    }
    (s == 0 ? report.stage1_revenue : report.stage2_revenue) = total;
  }

  const std::vector<double> comparison = comparison_values(avg, allocation);
  const std::vector<std::size_t> ranks = rank_rows(allocation);
  for (std::size_t u = 0; u < k; ++u) {
    PlayerRow& row = report.players[u];
    row.label = cem_2n.labels()[u];
    row.stage = cem_2n.stages()[u];
    row.allocation = allocation[u];
    row.rank = ranks[u];
    row.avg_cree = avg[u];
    row.comparison = comparison[u];
  }
  return report;
}

}  // namespace

std::pair<double, double> stage_revenues(const dea::CrossEfficiencyMatrix& cem_2n, double revenue) {
  check_revenue(revenue);
  split_stages(cem_2n);
  const dea::CrossEfficiencyMatrix first = dea::stage_submatrix(cem_2n, dea::Stage::kFirst);
  const dea::CrossEfficiencyMatrix second = dea::stage_submatrix(cem_2n, dea::Stage::kSecond);
  if (first.size() > game::kMaxPlayers) throw SizeLimitError("stages are limited to 64 units");
  const double f1 = game::f_value(first, game::grand_coalition(first.size()));
  const double f2 = game::f_value(second, game::grand_coalition(second.size()));
  if (!(f1 + f2 > 0.0)) throw InputError("degenerate game: f(N1) + f(N2) = 0");
  const double r1 = f1 * revenue / (f1 + f2);
  return {r1, revenue - r1};
}

AllocationReport direct_allocation(const dea::CrossEfficiencyMatrix& cem_2n, double revenue,
                                   solvers::SolutionConcept kind, const AllocationOptions& options) {
  check_revenue(revenue);
  const StageSplit split = split_stages(cem_2n);
  if (cem_2n.size() > solvers::kMaxExactPlayers) {
    throw SizeLimitError("direct allocation over " + std::to_string(cem_2n.size()) +
                         " sub-DMUs exceeds the exact limit of " + std::to_string(solvers::kMaxExactPlayers) +
                         "; use secondary mode, which gives the same stage totals");
  }
  const game::TuGame game = game::make_cree_game(cem_2n, revenue);
  solvers::SolutionVector solution = run_concept(game, kind, options);

  AllocationReport report = assemble(cem_2n, split, std::move(solution.x), Mode::kDirect, kind, revenue);
  if (solution.epsilon) report.epsilons.push_back(*solution.epsilon);
  return report;
}

AllocationReport secondary_allocation(const dea::CrossEfficiencyMatrix& cem_2n, double revenue,
                                      solvers::SolutionConcept kind, const AllocationOptions& options) {
  check_revenue(revenue);
  const StageSplit split = split_stages(cem_2n);
  const std::size_t n = split.members[0].size();
  if (n > solvers::kMaxExactPlayers) {
    throw SizeLimitError("secondary allocation over " + std::to_string(n) +
                         " units per stage exceeds the exact limit of " +
                         std::to_string(solvers::kMaxExactPlayers));
  }
  const auto [r1, r2] = stage_revenues(cem_2n, revenue);

  const auto solve_stage = [&](int s, double pot) {
    const dea::Stage stage = s == 0 ? dea::Stage::kFirst : dea::Stage::kSecond;
    dea::CrossEfficiencyMatrix block = dea::stage_submatrix(cem_2n, stage);
    std::optional<game::CreeCharacteristic> characteristic;
    if (options.singleton_universe == SingletonUniverse::kFull) {
      std::vector<double> singleton(n);
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t u = split.members[s][pos];
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < cem_2n.size(); ++d) {
          if (d != u) worst = std::min(worst, cem_2n(d, u));
        }
        singleton[pos] = worst;
      }
      characteristic.emplace(std::move(block), std::move(singleton));
    } else {
      characteristic.emplace(std::move(block));
    }
    return run_concept(game::make_cree_game(*characteristic, pot), kind, options);
  };

  // The two stage games are independent.
  auto second = std::async(std::launch::async, solve_stage, 1, r2);
  const solvers::SolutionVector first = solve_stage(0, r1);
  const solvers::SolutionVector second_solution = second.get();

  std::vector<double> allocation(cem_2n.size());
  for (std::size_t pos = 0; pos < n; ++pos) {
    allocation[split.members[0][pos]] = first.x[pos];
    allocation[split.members[1][pos]] = second_solution.x[pos];
  }
  AllocationReport report = assemble(cem_2n, split, std::move(allocation), Mode::kSecondary, kind, revenue);
  if (first.epsilon) report.epsilons = {*first.epsilon, *second_solution.epsilon};
  return report;
}

std::vector<double> comparison_values(std::span<const double> avg_crees, std::span<const double> allocations) {
  if (avg_crees.size() != allocations.size()) {
    throw std::invalid_argument("comparison_values: length mismatch");
  }
  if (avg_crees.empty()) return {};
  const auto anchor = static_cast<std::size_t>(
      std::distance(avg_crees.begin(), std::max_element(avg_crees.begin(), avg_crees.end())));
  if (!(avg_crees[anchor] > 0.0)) throw InputError("comparison values need a positive average CREE");
  const double coefficient = allocations[anchor] / avg_crees[anchor];
  std::vector<double> out(avg_crees.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coefficient * avg_crees[i];
  out[anchor] = allocations[anchor];
  return out;
}

std::vector<std::size_t> rank_rows(std::span<const double> allocations, double tie_tolerance) {
  std::vector<std::size_t> ranks(allocations.size());
  for (std::size_t i = 0; i < allocations.size(); ++i) {
    std::size_t above = 0;
    for (double other : allocations) {
      if (other > allocations[i] + tie_tolerance) ++above;
    }
    ranks[i] = above + 1;
  }
  return ranks;
}

}  // namespace coopdea::alloc
