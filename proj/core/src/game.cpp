#include "coopdea/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "coopdea/errors.hpp"

namespace coopdea::game {

namespace {

void check_coalition(std::size_t players, Coalition s) {
  if (players > kMaxPlayers) throw SizeLimitError("games are limited to 64 players");
  if (s == 0) throw std::invalid_argument("coalition must be nonempty");
  if ((s & ~grand_coalition(players)) != 0) throw std::invalid_argument("coalition has unknown players");
}

double best_peer(const dea::CrossEfficiencyMatrix& cem, Coalition s, std::size_t i) {
  double best = 0.0;
  for (Coalition rest = s & ~(Coalition{1} << i); rest != 0; rest &= rest - 1) {
    const auto d = static_cast<std::size_t>(std::countr_zero(rest));
    best = std::max(best, cem(d, i));
  }
  return best;
}

double worst_peer(const dea::CrossEfficiencyMatrix& cem, std::size_t i) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < cem.size(); ++d) {
    if (d != i) worst = std::min(worst, cem(d, i));
  }
  return std::isfinite(worst) ? worst : 0.0;
}

double sum_best_peers(const dea::CrossEfficiencyMatrix& cem, Coalition s) {
  double total = 0.0;
  for (Coalition rest = s; rest != 0; rest &= rest - 1) {
    total += best_peer(cem, s, static_cast<std::size_t>(std::countr_zero(rest)));
  }
  return total;
}

}  // namespace

double coalition_cree(const dea::CrossEfficiencyMatrix& cem, Coalition s, std::size_t i) {
  check_coalition(cem.size(), s);
  if (i >= cem.size() || !contains(s, i)) throw std::invalid_argument("coalition_cree: player not in coalition");
  return coalition_size(s) >= 2 ? best_peer(cem, s, i) : worst_peer(cem, i);
}

double f_value(const dea::CrossEfficiencyMatrix& cem, Coalition s) {
  if (s == 0) return 0.0;
  check_coalition(cem.size(), s);
  if (coalition_size(s) == 1) return worst_peer(cem, static_cast<std::size_t>(std::countr_zero(s)));
  return sum_best_peers(cem, s);
}

double char_value(const dea::CrossEfficiencyMatrix& cem, Coalition s, double revenue) {
  const Coalition all = grand_coalition(cem.size());
  const double f_grand = f_value(cem, all);
  if (!(f_grand > 0.0)) throw InputError("degenerate game: f(N) = 0");
  if (s == all) return revenue;
  return f_value(cem, s) * revenue / f_grand;
}

CreeCharacteristic::CreeCharacteristic(dea::CrossEfficiencyMatrix cem) : cem_(std::move(cem)) {
  if (cem_.size() > kMaxPlayers) throw SizeLimitError("games are limited to 64 players");
  singleton_.resize(cem_.size());
  for (std::size_t i = 0; i < cem_.size(); ++i) singleton_[i] = worst_peer(cem_, i);
}

CreeCharacteristic::CreeCharacteristic(dea::CrossEfficiencyMatrix cem, std::vector<double> singleton_cree)
    : cem_(std::move(cem)), singleton_(std::move(singleton_cree)) {
  if (cem_.size() > kMaxPlayers) throw SizeLimitError("games are limited to 64 players");
  if (singleton_.size() != cem_.size()) {
    throw std::invalid_argument("CreeCharacteristic: one singleton value per player required");
  }
}

double CreeCharacteristic::cree(Coalition s, std::size_t i) const {
  check_coalition(players(), s);
  if (i >= players() || !contains(s, i)) throw std::invalid_argument("cree: player not in coalition");
  return coalition_size(s) >= 2 ? best_peer(cem_, s, i) : singleton_[i];
}

double CreeCharacteristic::f(Coalition s) const {
  if (s == 0) return 0.0;
  if (coalition_size(s) == 1) return singleton_[static_cast<std::size_t>(std::countr_zero(s))];
  return sum_best_peers(cem_, s);
}

CoalitionValueTable::CoalitionValueTable(const CreeCharacteristic& characteristic)
    : players_(characteristic.players()) {
  if (players_ > kMaxDensePlayers) {
    throw SizeLimitError("dense coalition table limited to " + std::to_string(kMaxDensePlayers) + " players");
  }
  const Coalition all = grand_coalition(players_);
  values_.resize(static_cast<std::size_t>(all) + 1);
  for (Coalition s = 0; s <= all; ++s) values_[s] = characteristic.f(s);
}

struct TuGame::Lazy {
  ValueFn fn;
  std::mutex mutex;
  std::unordered_map<Coalition, double> memo;
};

TuGame TuGame::from_values(std::vector<double> values, std::vector<std::string> labels) {
  if (values.size() < 2 || !std::has_single_bit(values.size())) {
    throw std::invalid_argument("TuGame: value table size must be 2^k with k >= 1");
  }
  if (values[0] != 0.0) throw std::invalid_argument("TuGame: v(empty) must be 0");
  TuGame game;
  game.players_ = static_cast<std::size_t>(std::countr_zero(values.size()));
  if (game.players_ > kMaxDensePlayers) throw SizeLimitError("dense TuGame limited to 24 players");
  game.grand_value_ = values.back();
  game.table_ = std::move(values);
  if (!labels.empty() && labels.size() != game.players_) {
    throw std::invalid_argument("TuGame: one label per player required");
  }
  game.labels_ = std::move(labels);
  return game;
}

TuGame TuGame::from_function(std::size_t players, ValueFn fn, std::vector<std::string> labels) {
  if (players == 0 || players > kMaxPlayers) throw SizeLimitError("TuGame: player count must be in [1, 64]");
  if (!labels.empty() && labels.size() != players) {
    throw std::invalid_argument("TuGame: one label per player required");
  }
  TuGame game;
  game.players_ = players;
  game.labels_ = std::move(labels);
  if (players <= kMaxDensePlayers) {
    const Coalition all = grand_coalition(players);
    game.table_.resize(static_cast<std::size_t>(all) + 1);
    for (Coalition s = 1; s <= all; ++s) game.table_[s] = fn(s);
    game.grand_value_ = game.table_.back();
  } else {
    game.lazy_ = std::make_shared<Lazy>();
    game.lazy_->fn = std::move(fn);
    game.grand_value_ = game.lazy_->fn(game.grand());
  }
  return game;
}

double TuGame::value(Coalition s) const {
  if ((s & ~grand()) != 0) throw std::invalid_argument("TuGame::value: coalition has unknown players");
  if (!lazy_) return table_[s];
  if (s == 0) return 0.0;
  std::lock_guard lock(lazy_->mutex);
  auto it = lazy_->memo.find(s);
  if (it != lazy_->memo.end()) return it->second;
  const double v = lazy_->fn(s);
  lazy_->memo.emplace(s, v);
  return v;
}

TuGame make_cree_game(const CreeCharacteristic& characteristic, double revenue) {
  if (!(revenue > 0.0) || !std::isfinite(revenue)) throw InputError("revenue must be positive and finite");
  const std::size_t k = characteristic.players();
  const Coalition all = grand_coalition(k);
  const double f_grand = characteristic.f(all);
  if (!(f_grand > 0.0)) throw InputError("degenerate game: f(N) = 0");

  if (k <= kMaxDensePlayers) {
    const CoalitionValueTable table(characteristic);
    std::vector<double> values(table.values().size());
    for (Coalition s = 0; s < all; ++s) values[s] = table[s] * revenue / f_grand;
    values[all] = revenue;
    return TuGame::from_values(std::move(values), characteristic.matrix().labels());
  }
  auto shared = std::make_shared<const CreeCharacteristic>(characteristic);
  return TuGame::from_function(
      k,
      [shared, revenue, f_grand, all](Coalition s) {
        return s == all ? revenue : shared->f(s) * revenue / f_grand;
      },
      characteristic.matrix().labels());
}

TuGame make_cree_game(const dea::CrossEfficiencyMatrix& cem, double revenue) {
  return make_cree_game(CreeCharacteristic(cem), revenue);
}

SuperadditivityReport check_superadditive(const TuGame& game, const SuperadditivityOptions& options) {
  SuperadditivityReport report;
  const double tol = options.tolerance * std::max(1.0, std::abs(game.grand_value()));
  const auto violated = [&](Coalition a, Coalition b) {
    ++report.pairs_checked;
    if (game.value(a | b) + tol < game.value(a) + game.value(b)) {
      report.superadditive = false;
      report.counterexample = std::make_pair(a, b);
      return true;
    }
    return false;
  };

  const std::size_t k = game.players();
  const Coalition all = game.grand();
  if (k <= options.exhaustive_limit) {
    report.exhaustive = true;
    for (Coalition a = 1; a < all; ++a) {
      const Coalition rest = all & ~a;
      // Each unordered pair once: b > a.
      for (Coalition b = rest; b != 0; b = (b - 1) & rest) {
        if (b > a && violated(a, b)) return report;
      }
    }
    return report;
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> side(0, 2);
  while (report.pairs_checked < options.samples) {
    Coalition a = 0;
    Coalition b = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const int pick = side(rng);
      if (pick == 0) a |= Coalition{1} << i;
      if (pick == 1) b |= Coalition{1} << i;
    }
    if (a == 0 || b == 0) continue;
    if (violated(a, b)) return report;
  }
  return report;
}

LeastCoreProgram solve_least_core_program(const TuGame& game, const lp::SolverOptions& options) {
  const std::size_t k = game.players();
  if (k < 2) throw InputError("least core needs at least 2 players");
  if (k > kMaxDensePlayers) {
    throw SizeLimitError("least core limited to " + std::to_string(kMaxDensePlayers) + " players");
  }
  const Coalition all = game.grand();

  std::vector<double> objective(k + 1, 0.0);
  objective[k] = 1.0;
  lp::LpProblem problem(lp::Sense::kMaximize, std::move(objective));
  for (std::size_t j = 0; j <= k; ++j) problem.set_free(j);
  problem.reserve_constraints(static_cast<std::size_t>(all) + 1);

  std::vector<double> row(k + 1);
  for (Coalition s = 1; s < all; ++s) {
    for (std::size_t i = 0; i < k; ++i) row[i] = contains(s, i) ? 1.0 : 0.0;
    row[k] = -1.0;
    problem.add_constraint(row, lp::Relation::kGreaterEqual, game.value(s));
  }
  std::fill(row.begin(), row.end(), 1.0);
  row[k] = 0.0;
  problem.add_constraint(row, lp::Relation::kEqual, game.grand_value());

  const lp::LpSolution solution = lp::solve_lp(problem, options);
  if (!solution.optimal()) {
    throw SolverError(std::string("least-core program is ") + lp::to_string(solution.status));
  }
  LeastCoreProgram result;
  result.epsilon = solution.values[k];
  result.allocation.assign(solution.values.begin(), solution.values.begin() + static_cast<std::ptrdiff_t>(k));
  result.iterations = solution.iterations;
  return result;
}

CoreReport check_core_nonempty(const TuGame& game, const lp::SolverOptions& options) {
  const LeastCoreProgram program = solve_least_core_program(game, options);
  CoreReport report;
  report.epsilon = program.epsilon;
  report.nonempty = program.epsilon >= -options.tolerances.feasibility;
  report.witness = program.allocation;
  return report;
}

}  // namespace coopdea::game
