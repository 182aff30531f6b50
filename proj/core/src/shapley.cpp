#include <cmath>
#include <string>

#include "coopdea/errors.hpp"
#include "coopdea/solvers.hpp"

namespace coopdea::solvers {

SolutionVector shapley(const game::TuGame& game) {
  const std::size_t k = game.players();
  if (k > kMaxExactPlayers) {
    throw SizeLimitError("exact Shapley value limited to " + std::to_string(kMaxExactPlayers) + " players, got " +
                         std::to_string(k));
  }

  // weight[s] = s! (k - s - 1)! / k!
  std::vector<double> weight(k);
  weight[0] = 1.0 / static_cast<double>(k);
  for (std::size_t s = 1; s < k; ++s) {
    weight[s] = weight[s - 1] * static_cast<double>(s) / static_cast<double>(k - s);
  }

  std::vector<double> phi(k, 0.0);
  const game::Coalition all = game.grand();
  for (game::Coalition s = 0; s < all; ++s) {
    const double base = game.value(s);
    const double w = weight[game::coalition_size(s)];
    for (game::Coalition rest = all & ~s; rest != 0; rest &= rest - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(rest));
      phi[i] += w * (game.value(s | (game::Coalition{1} << i)) - base);
    }
  }

  double total = 0.0;
  for (double p : phi) total += p;
  const double grand = game.grand_value();
  if (std::abs(total - grand) > 1e-6 * std::max(1.0, std::abs(grand))) {
    throw SolverError("Shapley values sum to " + std::to_string(total) + " instead of v(N) = " +
                      std::to_string(grand));
  }

  SolutionVector result;
  result.kind = SolutionConcept::kShapley;
  result.x = phi;
  if (total != 0.0) {
    for (double& xi : result.x) xi = xi * grand / total;
  }
  return result;
}

}  // namespace coopdea::solvers
