#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "coopdea/errors.hpp"
#include "coopdea/game.hpp"
#include "golden.hpp"
#include "oracles.hpp"

namespace {

using namespace coopdea;
using game::Coalition;

constexpr Coalition bit(std::size_t i) { return Coalition{1} << i; }

dea::CrossEfficiencyMatrix numerical_cem() {
  static const dea::CrossEfficiencyMatrix cem = oracles::cem_of(oracles::numerical_panel());
  return cem;
}

// Best peer evaluation in a 7x7 tabulated block, column i, excluding self.
template <typename Block>
double column_max_excluding_self(const Block& block, std::size_t i) {
  double best = 0.0;
  for (std::size_t d = 0; d < block.size(); ++d) {
    if (d != i) best = std::max(best, block[d][i]);
  }
  return best;
}

template <typename Block>
double column_min_excluding_self(const Block& block, std::size_t i) {
  double worst = 1e300;
  for (std::size_t d = 0; d < block.size(); ++d) {
    if (d != i) worst = std::min(worst, block[d][i]);
  }
  return worst;
}

TEST(Coalition, Helpers) {
  EXPECT_EQ(game::grand_coalition(3), 0b111u);
  EXPECT_EQ(game::grand_coalition(64), ~Coalition{0});
  EXPECT_TRUE(game::contains(0b101, 2));
  EXPECT_FALSE(game::contains(0b101, 1));
  EXPECT_EQ(game::coalition_size(0b1011), 3u);
}

TEST(CoalitionCree, StageOneGrandCoalitionTakesBestPeer) {
  const auto stage1 = dea::stage_submatrix(numerical_cem(), dea::Stage::kFirst);
  const Coalition n1 = game::grand_coalition(7);
  EXPECT_NEAR(game::coalition_cree(stage1, n1, 1), column_max_excluding_self(golden::kNumericalStage1, 1), 5e-3);
  EXPECT_NEAR(game::coalition_cree(stage1, n1, 1), 1.0, 1e-9);
}

TEST(CoalitionCree, SingletonTakesWorstPeer) {
  const auto stage1 = dea::stage_submatrix(numerical_cem(), dea::Stage::kFirst);
  const double oracle = column_min_excluding_self(golden::kNumericalStage1, 1);
  EXPECT_DOUBLE_EQ(oracle, 0.69);
  EXPECT_NEAR(game::coalition_cree(stage1, bit(1), 1), oracle, 1e-2);

  // Exact counterpart from the computed matrix.
  double worst = 1.0;
  for (std::size_t d = 0; d < 7; ++d) {
    if (d != 1) worst = std::min(worst, stage1(d, 1));
  }
  EXPECT_DOUBLE_EQ(game::coalition_cree(stage1, bit(1), 1), worst);
}

TEST(CoalitionCree, DirectGameSingletonIsZero) {
  const auto cem = numerical_cem();
  for (std::size_t i = 0; i < cem.size(); ++i) {
    EXPECT_NEAR(game::coalition_cree(cem, bit(i), i), 0.0, 1e-8);
    EXPECT_NEAR(game::f_value(cem, bit(i)), 0.0, 1e-8);
  }
}

TEST(FValue, StageGrandCoalitions) {
  const auto cem = numerical_cem();
  double f1_oracle = 0.0;
  double f2_oracle = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    f1_oracle += column_max_excluding_self(golden::kNumericalStage1, i);
    f2_oracle += column_max_excluding_self(golden::kNumericalStage2, i);
  }
  EXPECT_NEAR(f1_oracle, 5.26, 1e-12);
  EXPECT_NEAR(f2_oracle, 4.08, 1e-12);

  Coalition n1 = 0;
  Coalition n2 = 0;
  for (std::size_t u = 0; u < 7; ++u) n1 |= bit(u);
  for (std::size_t u = 7; u < 14; ++u) n2 |= bit(u);
  // Seven two-decimal entries can drift by up to 7 * 0.005 in the sum.
  EXPECT_NEAR(game::f_value(cem, n1), f1_oracle, 3.5e-2);
  EXPECT_NEAR(game::f_value(cem, n2), f2_oracle, 3.5e-2);

  // f(N) splits over the stages.
  EXPECT_NEAR(game::f_value(cem, game::grand_coalition(14)), game::f_value(cem, n1) + game::f_value(cem, n2),
              1e-9);
}

TEST(CreeGame, GrandValueIsExactlyRevenue) {
  const auto cem = numerical_cem();
  const auto g = game::make_cree_game(cem, 100.0);
  EXPECT_EQ(g.grand_value(), 100.0);
  EXPECT_EQ(g.value(g.grand()), 100.0);
  EXPECT_EQ(g.value(0), 0.0);

  const auto stage1 = dea::stage_submatrix(cem, dea::Stage::kFirst);
  const auto g1 = game::make_cree_game(stage1, 56.3165);
  EXPECT_EQ(g1.grand_value(), 56.3165);
}

TEST(CreeGame, MatchesCharacteristicFormula) {
  const auto cem = numerical_cem();
  const auto g = game::make_cree_game(cem, 100.0);
  const double fn = game::f_value(cem, g.grand());
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const Coalition s = rng() & g.grand();
    if (s == g.grand()) continue;
    EXPECT_NEAR(g.value(s), game::f_value(cem, s) * 100.0 / fn, 1e-12);
    EXPECT_NEAR(g.value(s), game::char_value(cem, s, 100.0), 1e-12);
  }
}

TEST(CreeGame, RejectsDegenerateInput) {
  const auto cem = numerical_cem();
  EXPECT_THROW(game::make_cree_game(cem, 0.0), InputError);
  EXPECT_THROW(game::make_cree_game(cem, -5.0), InputError);
  const dea::CrossEfficiencyMatrix zero(Eigen::MatrixXd::Zero(3, 3), {"1.1", "2.1", "3.1"},
                                        {dea::Stage::kFirst, dea::Stage::kFirst, dea::Stage::kFirst});
  EXPECT_THROW(game::make_cree_game(zero, 10.0), InputError);
}

TEST(CreeGame, StageAdditivityOnMixedCoalitions) {
  // v(F u S) = v(F) + v(S) for nonempty F in stage 1, S in stage 2.
  std::mt19937_64 rng(2024);
  const auto check = [&](const dea::CrossEfficiencyMatrix& cem, int samples) {
    const std::size_t n = cem.size() / 2;
    const auto g = game::make_cree_game(cem, 100.0);
    const Coalition first = game::grand_coalition(n);
    const Coalition second = first << n;
    int checked = 0;
    while (checked < samples) {
      const Coalition f = rng() & first;
      const Coalition s = rng() & second;
      if (f == 0 || s == 0) continue;
      ASSERT_NEAR(g.value(f | s), g.value(f) + g.value(s), 1e-9);
      ++checked;
    }
  };
  check(numerical_cem(), 10'000);
  std::mt19937_64 panels(17);
  for (int trial = 0; trial < 4; ++trial) {
    check(oracles::cem_of(oracles::random_panel(panels, 3 + trial, {2, 1, 2})), 2'500);
  }
}

TEST(Superadditivity, CreeGamesFromRandomPanels) {
  std::mt19937_64 rng(99);
  int games = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 6; ++trial) {
      const dea::Dimensions dims{1 + trial % 3u, 1 + trial % 2u, 1 + (trial + 1) % 3u};
      const auto cem = oracles::cem_of(oracles::random_panel(rng, n, dims));
      const auto report = game::check_superadditive(game::make_cree_game(cem, 100.0));
      EXPECT_TRUE(report.exhaustive);
      EXPECT_TRUE(report.superadditive) << "n = " << n << " trial " << trial;
      ++games;
    }
  }
  EXPECT_EQ(games, 30);
}

TEST(Superadditivity, ExhaustivePairCount) {
  // Unordered disjoint nonempty pairs over k players: (3^k - 2^(k+1) + 1) / 2.
  const auto g = oracles::game_from(5, [](Coalition s) { return static_cast<double>(game::coalition_size(s)); });
  const auto report = game::check_superadditive(g);
  EXPECT_TRUE(report.superadditive);
  EXPECT_EQ(report.pairs_checked, (243u - 64u + 1u) / 2u);
}

TEST(Superadditivity, ReportsConstructedViolation) {
  const auto g = oracles::game_from(2, [](Coalition s) { return s == 0b11 ? 1.0 : 0.8; });
  const auto report = game::check_superadditive(g);
  EXPECT_FALSE(report.superadditive);
  ASSERT_TRUE(report.counterexample);
  EXPECT_EQ(report.counterexample->first | report.counterexample->second, 0b11u);
}

TEST(Superadditivity, SampledOnLargeStageGame) {
  const auto cem = oracles::cem_of(oracles::bank_panel());
  const auto stage1 = dea::stage_submatrix(cem, dea::Stage::kFirst);
  const auto g = game::make_cree_game(stage1, 517.2);
  game::SuperadditivityOptions options;
  options.exhaustive_limit = 14;
  const auto report = game::check_superadditive(g, options);
  EXPECT_FALSE(report.exhaustive);
  EXPECT_EQ(report.pairs_checked, options.samples);
  EXPECT_TRUE(report.superadditive);
  // Same seed, same verdict and sample count.
  const auto again = game::check_superadditive(g, options);
  EXPECT_EQ(again.pairs_checked, report.pairs_checked);
}

TEST(TuGame, FromValuesValidates) {
  EXPECT_THROW(game::TuGame::from_values({0.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(game::TuGame::from_values({0.5, 1.0}), std::invalid_argument);
  const auto g = game::TuGame::from_values({0.0, 1.0, 2.0, 4.0});
  EXPECT_EQ(g.players(), 2u);
  EXPECT_EQ(g.value(0b10), 2.0);
  EXPECT_TRUE(g.dense());
}

TEST(TuGame, LazyAboveDenseLimit) {
  const std::size_t k = game::kMaxDensePlayers + 2;
  const auto g = game::TuGame::from_function(k, [](Coalition s) {
    return static_cast<double>(game::coalition_size(s) * game::coalition_size(s));
  });
  EXPECT_FALSE(g.dense());
  EXPECT_EQ(g.value(0b1011), 9.0);
  EXPECT_EQ(g.value(0b1011), 9.0);
  EXPECT_EQ(g.grand_value(), static_cast<double>(k * k));
}

TEST(Core, TwoPlayerGameIsBalanced) {
  const auto g = game::TuGame::from_values({0.0, 0.0, 0.0, 1.0});
  const auto core = game::check_core_nonempty(g);
  EXPECT_TRUE(core.nonempty);
  ASSERT_EQ(core.witness.size(), 2u);
  EXPECT_NEAR(core.witness[0] + core.witness[1], 1.0, 1e-12);
  EXPECT_NEAR(core.epsilon, 0.5, 1e-12);
}

TEST(Core, MajorityGameIsEmpty) {
  const auto g = oracles::game_from(3, [](Coalition s) { return game::coalition_size(s) >= 2 ? 1.0 : 0.0; });
  const auto core = game::check_core_nonempty(g);
  EXPECT_FALSE(core.nonempty);
  // The three pair constraints add up to 2 x(N) >= 3, impossible with x(N) = 1;
  // the symmetric point (1/3, 1/3, 1/3) leaves each pair 1/3 short.
  EXPECT_NEAR(core.epsilon, -1.0 / 3.0, 1e-10);
}

TEST(Core, CreeGameCoreIsNonempty) {
  const auto g = game::make_cree_game(dea::stage_submatrix(numerical_cem(), dea::Stage::kFirst), 56.3);
  const auto core = game::check_core_nonempty(g);
  EXPECT_TRUE(core.nonempty);
  for (Coalition s = 1; s < g.grand(); ++s) {
    double xs = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      if (game::contains(s, i)) xs += core.witness[i];
    }
    EXPECT_GE(xs, g.value(s) - 1e-8);
  }
}

TEST(LeastCoreProgram, AgreesWithVertexEnumeration) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + trial % 3;
    const auto g = oracles::game_from(k, [&](Coalition s) { return u(rng) * game::coalition_size(s); });
    const auto lc = game::solve_least_core_program(g);

    std::vector<double> obj(k + 1, 0.0);
    obj[k] = 1.0;
    lp::LpProblem p(lp::Sense::kMaximize, obj);
    for (std::size_t j = 0; j <= k; ++j) p.set_free(j);
    std::vector<double> row(k + 1);
    for (Coalition s = 1; s < g.grand(); ++s) {
      for (std::size_t i = 0; i < k; ++i) row[i] = game::contains(s, i) ? 1.0 : 0.0;
      row[k] = -1.0;
      p.add_constraint(row, lp::Relation::kGreaterEqual, g.value(s));
    }
    std::fill(row.begin(), row.end(), 1.0);
    row[k] = 0.0;
    p.add_constraint(row, lp::Relation::kEqual, g.grand_value());
    const auto oracle = oracles::solve_by_vertices(p);
    ASSERT_TRUE(oracle);
    EXPECT_NEAR(lc.epsilon, oracle->objective, 1e-9);
  }
}

}  // namespace
