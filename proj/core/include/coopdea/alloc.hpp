#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coopdea/dea.hpp"
#include "coopdea/solvers.hpp"

namespace coopdea::alloc {

enum class Mode { kDirect, kSecondary };

std::string_view to_string(Mode mode);

// Evaluators used for the CREE of a player standing alone in a per-stage game:
// the stage's own players, or every sub-DMU of the 2n matrix.
enum class SingletonUniverse { kPerStage, kFull };

std::string_view to_string(SingletonUniverse universe);

// Ties in ranking: allocations within this distance share a rank.
inline constexpr double kRankTieTolerance = 5e-3;

struct PlayerRow {
  std::string label;
  dea::Stage stage = dea::Stage::kFirst;
  double allocation = 0.0;
  std::size_t rank = 0;        // over all 2n sub-DMUs
  std::size_t stage_rank = 0;  // within the sub-DMU's own stage
  double avg_cree = 0.0;       // mean CREE over same-stage evaluators
  double comparison = 0.0;
};

struct AllocationReport {
  Mode mode = Mode::kDirect;
  solvers::SolutionConcept kind = solvers::SolutionConcept::kShapley;
  double revenue = 0.0;
  double stage1_revenue = 0.0;
  double stage2_revenue = 0.0;
  std::vector<PlayerRow> players;
  // Least core / nucleolus: epsilon of the game (direct) or of the stage-1 and
  // stage-2 games (secondary).
  std::vector<double> epsilons;
};

struct AllocationOptions {
  SingletonUniverse singleton_universe = SingletonUniverse::kPerStage;
  lp::SolverOptions solver;
};

// R1 = f(N1) R / (f(N1) + f(N2)), R2 = R - R1 over a 2n-unit matrix.
std::pair<double, double> stage_revenues(const dea::CrossEfficiencyMatrix& cem_2n, double revenue);

// Allocates R among all 2n sub-DMUs at once. Throws SizeLimitError when 2n
// exceeds the exact solver limit; secondary mode covers those instances.
AllocationReport direct_allocation(const dea::CrossEfficiencyMatrix& cem_2n, double revenue,
                                   solvers::SolutionConcept kind, const AllocationOptions& options = {});

// Splits R into (R1, R2) first, then allocates each pot inside its stage.
AllocationReport secondary_allocation(const dea::CrossEfficiencyMatrix& cem_2n, double revenue,
                                      solvers::SolutionConcept kind, const AllocationOptions& options = {});

// Scales average CREEs onto the allocation range: the player with the largest
// average CREE anchors coefficient = allocation / avg_cree.
std::vector<double> comparison_values(std::span<const double> avg_crees, std::span<const double> allocations);

// Descending competition ranking ("1224"): rank = 1 + #{ j : a_j > a_i + tol }.
std::vector<std::size_t> rank_rows(std::span<const double> allocations, double tie_tolerance = kRankTieTolerance);

}  // namespace coopdea::alloc
