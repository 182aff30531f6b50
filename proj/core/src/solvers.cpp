#include <stdexcept>

#include "coopdea/solvers.hpp"

namespace coopdea::solvers {

std::string_view to_string(SolutionConcept kind) {
  switch (kind) {
    case SolutionConcept::kShapley:
      return "shapley";
    case SolutionConcept::kLeastCore:
      return "leastcore";
    case SolutionConcept::kNucleolus:
      return "nucleolus";
  }
  return "unknown";
}

std::optional<SolutionConcept> parse_concept(std::string_view name) {
  if (name == "shapley") return SolutionConcept::kShapley;
  if (name == "leastcore" || name == "least_core") return SolutionConcept::kLeastCore;
  if (name == "nucleolus") return SolutionConcept::kNucleolus;
  return std::nullopt;
}

SolutionVector least_core(const game::TuGame& game, const lp::SolverOptions& options) {
  const game::LeastCoreProgram program = game::solve_least_core_program(game, options);
  SolutionVector result;
  result.kind = SolutionConcept::kLeastCore;
  result.x = program.allocation;
  result.epsilon = program.epsilon;
  result.iterations = program.iterations;
  return result;
}

SolutionVector solve(const game::TuGame& game, SolutionConcept kind) {
  switch (kind) {
    case SolutionConcept::kShapley:
      return shapley(game);
    case SolutionConcept::kLeastCore:
      return least_core(game);
    case SolutionConcept::kNucleolus:
      return nucleolus(game);
  }
  throw std::invalid_argument("unknown solution concept");
}

}  // namespace coopdea::solvers
