#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "coopdea/game.hpp"
#include "coopdea/lp.hpp"

namespace coopdea::solvers {

enum class SolutionConcept { kShapley, kLeastCore, kNucleolus };

std::string_view to_string(SolutionConcept kind);
// Accepts "shapley", "leastcore" / "least_core", "nucleolus".
std::optional<SolutionConcept> parse_concept(std::string_view name);

struct SolutionVector {
  SolutionConcept kind = SolutionConcept::kShapley;
  std::vector<double> x;
  // First-level excess bound; empty for Shapley.
  std::optional<double> epsilon;
  std::size_t iterations = 0;
  std::size_t fixed_coalitions = 0;
};

inline constexpr std::size_t kMaxExactPlayers = game::kMaxDensePlayers;

// Exact Shapley value by enumeration of all coalitions, followed by the
// proportional rescaling x_i = phi_i v(N) / sum(phi), which must be a no-op
// up to 1e-6. Throws SizeLimitError above kMaxExactPlayers.
SolutionVector shapley(const game::TuGame& game);

// One optimal vertex of the least-core program.
SolutionVector least_core(const game::TuGame& game, const lp::SolverOptions& options = {});

struct NucleolusOptions {
  lp::SolverOptions solver;
  // A coalition is fixed when its shadow price exceeds this value.
  double dual_tolerance = 1e-9;
  // Tightness of a fixed coalition's constraint, relative to max(1, |v(N)|).
  double slack_tolerance = 1e-7;
};

// Nucleolus over the imputation set by successive linear programs: maximize
// the smallest surplus over the coalitions that are not yet settled, settle
// those that are tight in every optimum (positive shadow price), and repeat
// until the settled coalitions pin down a single allocation.
SolutionVector nucleolus(const game::TuGame& game, const NucleolusOptions& options = {});

SolutionVector solve(const game::TuGame& game, SolutionConcept kind);

}  // namespace coopdea::solvers
