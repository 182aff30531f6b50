#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coopdea/dea.hpp"

namespace coopdea::game {

// Bit i set <=> player i belongs to the coalition.
using Coalition = std::uint64_t;

inline constexpr std::size_t kMaxPlayers = 64;
// Games up to this size keep a dense table of all 2^k coalition values.
inline constexpr std::size_t kMaxDensePlayers = 24;

inline constexpr Coalition grand_coalition(std::size_t players) {
  return players >= 64 ? ~Coalition{0} : (Coalition{1} << players) - 1;
}
inline constexpr bool contains(Coalition s, std::size_t player) { return (s >> player) & 1u; }
inline constexpr std::size_t coalition_size(Coalition s) { return static_cast<std::size_t>(std::popcount(s)); }

// CREE of player i inside coalition S: the best evaluation i receives from
// another member when |S| >= 2, otherwise the worst evaluation i receives from
// any other player of the matrix.
double coalition_cree(const dea::CrossEfficiencyMatrix& cem, Coalition s, std::size_t i);

// f(S): sum of the members' coalition CREE values. f(empty) = 0.
double f_value(const dea::CrossEfficiencyMatrix& cem, Coalition s);

// v(S) = f(S) R / f(N), with v(N) = R exactly. Throws InputError when f(N) = 0.
double char_value(const dea::CrossEfficiencyMatrix& cem, Coalition s, double revenue);

// f evaluated over a cross-efficiency matrix. Singleton values default to the
// column minimum over the matrix itself; a caller may supply them instead
// (e.g. minima taken over a larger evaluator set).
class CreeCharacteristic {
 public:
  explicit CreeCharacteristic(dea::CrossEfficiencyMatrix cem);
  CreeCharacteristic(dea::CrossEfficiencyMatrix cem, std::vector<double> singleton_cree);

  std::size_t players() const { return cem_.size(); }
  const dea::CrossEfficiencyMatrix& matrix() const { return cem_; }
  double cree(Coalition s, std::size_t i) const;
  double f(Coalition s) const;

 private:
  dea::CrossEfficiencyMatrix cem_;
  std::vector<double> singleton_;
};

// Dense f over all 2^k coalitions.
class CoalitionValueTable {
 public:
  explicit CoalitionValueTable(const CreeCharacteristic& characteristic);

  std::size_t players() const { return players_; }
  double operator[](Coalition s) const { return values_[s]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t players_;
  std::vector<double> values_;
};

// A transferable-utility game <N, v>. Values are either a dense table or,
// above kMaxDensePlayers, computed on demand and memoized. Copies share the
// memo; value() is safe to call concurrently.
class TuGame {
 public:
  using ValueFn = std::function<double(Coalition)>;

  // values.size() must be 2^k with values[0] == 0.
  static TuGame from_values(std::vector<double> values, std::vector<std::string> labels = {});
  static TuGame from_function(std::size_t players, ValueFn fn, std::vector<std::string> labels = {});

  std::size_t players() const { return players_; }
  Coalition grand() const { return grand_coalition(players_); }
  double value(Coalition s) const;
  double grand_value() const { return grand_value_; }
  bool dense() const { return !lazy_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  struct Lazy;

  TuGame() = default;

  std::size_t players_ = 0;
  double grand_value_ = 0.0;
  std::vector<double> table_;
  std::shared_ptr<Lazy> lazy_;
  std::vector<std::string> labels_;
};

// The revenue-sharing game v(S) = f(S) R / f(N).
TuGame make_cree_game(const CreeCharacteristic& characteristic, double revenue);
TuGame make_cree_game(const dea::CrossEfficiencyMatrix& cem, double revenue);

struct SuperadditivityOptions {
  std::size_t exhaustive_limit = 14;
  std::size_t samples = 100'000;
  std::uint64_t seed = 0x5eed;
  double tolerance = 1e-9;  // relative to max(1, |v(N)|)
};

struct SuperadditivityReport {
  bool superadditive = true;
  bool exhaustive = false;
  std::size_t pairs_checked = 0;
  std::optional<std::pair<Coalition, Coalition>> counterexample;
};

// Checks v(S1 u S2) >= v(S1) + v(S2) over every disjoint nonempty pair when
// k <= exhaustive_limit, otherwise over seeded random disjoint pairs.
SuperadditivityReport check_superadditive(const TuGame& game, const SuperadditivityOptions& options = {});

struct LeastCoreProgram {
  double epsilon = 0.0;
  std::vector<double> allocation;
  std::size_t iterations = 0;
};

// max eps s.t. x(S) >= v(S) + eps for every proper nonempty S, x(N) = v(N).
LeastCoreProgram solve_least_core_program(const TuGame& game, const lp::SolverOptions& options = {});

struct CoreReport {
  bool nonempty = false;
  double epsilon = 0.0;
  std::vector<double> witness;
};

CoreReport check_core_nonempty(const TuGame& game, const lp::SolverOptions& options = {});

}  // namespace coopdea::game
