#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace coopdea::oracles {

std::filesystem::path data_dir() { return COOPDEA_TEST_DATA_DIR; }

namespace {

// Plain CSV reader kept separate from the CLI loader.
dea::DmuPanel read_panel(const std::filesystem::path& path, dea::Dimensions dims) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    ids.push_back(cell);
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, dims.inputs), z(n, dims.intermediates), y(n, dims.outputs);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& r = rows[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < x.cols(); ++i) x(j, i) = r[i];
    for (Eigen::Index i = 0; i < z.cols(); ++i) z(j, i) = r[x.cols() + i];
    for (Eigen::Index i = 0; i < y.cols(); ++i) y(j, i) = r[x.cols() + z.cols() + i];
  }
  return dea::DmuPanel(ids, dims, x, z, y);
}

// Gaussian elimination with partial pivoting; nullopt if singular.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (std::abs(a[p][c]) < 1e-11) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

std::size_t rank_of(std::vector<std::vector<double>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t p = rank;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (std::abs(rows[r][c]) > std::abs(rows[p][c])) p = r;
    }
    if (std::abs(rows[p][c]) < 1e-9) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

struct Row {
  std::vector<double> a;
  lp::Relation rel;
  double b;
};

bool satisfied(const Row& row, const std::vector<double>& x, double tol) {
  const double lhs = std::inner_product(row.a.begin(), row.a.end(), x.begin(), 0.0);
  const double scale = tol * std::max(1.0, std::abs(row.b));
  switch (row.rel) {
    case lp::Relation::kLessEqual:
      return lhs <= row.b + scale;
    case lp::Relation::kGreaterEqual:
      return lhs >= row.b - scale;
    case lp::Relation::kEqual:
      return std::abs(lhs - row.b) <= scale;
  }
  return false;
}

std::vector<double> incidence(game::Coalition s, std::size_t k) {
  std::vector<double> a(k);
  for (std::size_t i = 0; i < k; ++i) a[i] = game::contains(s, i) ? 1.0 : 0.0;
  return a;
}

}  // namespace

dea::DmuPanel numerical_panel() { return read_panel(data_dir() / "numerical_example.csv", {3, 1, 2}); }
dea::DmuPanel bank_panel() { return read_panel(data_dir() / "bank_branches.csv", {3, 2, 2}); }

dea::CrossEfficiencyMatrix cem_of(const dea::DmuPanel& panel) {
  return dea::build_cem(dea::split_to_subdmus(dea::normalize_panel(panel)));
}

dea::DmuPanel random_panel(std::mt19937_64& rng, std::size_t n, dea::Dimensions dims, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  const auto fill = [&](std::size_t cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    return m;
  };
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < n; ++j) ids.push_back("d" + std::to_string(j + 1));
  Eigen::MatrixXd x = fill(dims.inputs);
  Eigen::MatrixXd z = fill(dims.intermediates);
  Eigen::MatrixXd y = fill(dims.outputs);
  return dea::DmuPanel(ids, dims, x, z, y);
}

std::optional<VertexOptimum> solve_by_vertices(const lp::LpProblem& problem, double tol) {
  const std::size_t n = problem.num_variables();
  std::vector<Row> rows;
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    const auto r = problem.row(i);
    rows.push_back({std::vector<double>(r.begin(), r.end()), problem.relation(i), problem.rhs(i)});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(problem.lower_bound(j))) {
      std::vector<double> a(n, 0.0);
      a[j] = 1.0;
      rows.push_back({a, lp::Relation::kGreaterEqual, problem.lower_bound(j)});
    }
  }
  const std::size_t m = rows.size();
  if (m < n) return std::nullopt;

  const double sign = problem.sense() == lp::Sense::kMaximize ? 1.0 : -1.0;
  std::optional<VertexOptimum> best;
  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<std::vector<double>> a(n);
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = rows[pick[k]].a;
      b[k] = rows[pick[k]].b;
    }
    if (auto x = solve_square(a, b)) {
      const bool feasible = std::all_of(rows.begin(), rows.end(), [&](const Row& r) { return satisfied(r, *x, tol); });
      if (feasible) {
        const double obj = std::inner_product(x->begin(), x->end(), problem.objective().begin(), 0.0);
        if (!best || sign * obj > sign * best->objective) best = VertexOptimum{obj, *x};
      }
    }
    // Next n-subset of m in lexicographic order.
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == m - n + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

std::vector<double> shapley_by_permutations(const game::TuGame& game) {
  const std::size_t k = game.players();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(k, 0.0);
  double count = 0.0;
  do {
    game::Coalition s = 0;
    for (std::size_t i : order) {
      const game::Coalition next = s | (game::Coalition{1} << i);
      phi[i] += game.value(next) - game.value(s);
      s = next;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= count;
  return phi;
}

std::vector<double> nucleolus_reference(const game::TuGame& game, double tol) {
  const std::size_t k = game.players();
  const game::Coalition all = game.grand();
  std::vector<game::Coalition> open;
  for (game::Coalition s = 1; s < all; ++s) open.push_back(s);
  std::vector<std::pair<game::Coalition, double>> fixed;

  // Variables: x_0..x_{k-1}, eps.
  const auto base_problem = [&](std::vector<double> objective, std::optional<double> eps_value) {
    lp::LpProblem p(lp::Sense::kMaximize, std::move(objective));
    for (std::size_t i = 0; i < k; ++i) p.set_lower_bound(i, game.value(game::Coalition{1} << i));
    p.set_free(k);
    std::vector<double> row(k + 1);
    for (game::Coalition s : open) {
      auto a = incidence(s, k);
      std::copy(a.begin(), a.end(), row.begin());
      row[k] = -1.0;
      p.add_constraint(row, lp::Relation::kGreaterEqual, game.value(s));
    }
    for (const auto& [s, level] : fixed) {
      auto a = incidence(s, k);
      std::copy(a.begin(), a.end(), row.begin());
      row[k] = 0.0;
      p.add_constraint(row, lp::Relation::kEqual, level);
    }
    std::fill(row.begin(), row.end(), 1.0);
    row[k] = 0.0;
    p.add_constraint(row, lp::Relation::kEqual, game.grand_value());
    if (eps_value) {
      std::fill(row.begin(), row.end(), 0.0);
      row[k] = 1.0;
      p.add_constraint(row, lp::Relation::kEqual, *eps_value);
    }
    return p;
  };

  std::vector<std::vector<double>> span_rows = {std::vector<double>(k, 1.0)};
  while (rank_of(span_rows) < k && !open.empty()) {
    std::vector<double> objective(k + 1, 0.0);
    objective[k] = 1.0;
    const auto level = solve_by_vertices(base_problem(objective, std::nullopt), tol);
    if (!level) throw std::runtime_error("reference nucleolus: infeasible level program");
    const double eps = level->x[k];

    std::vector<game::Coalition> settle;
    for (game::Coalition s : open) {
      // Can x(S) - v(S) rise above eps while keeping the level at eps?
      std::vector<double> obj(k + 1, 0.0);
      const auto a = incidence(s, k);
      std::copy(a.begin(), a.end(), obj.begin());
      const auto probe = solve_by_vertices(base_problem(obj, eps), tol);
      if (probe && probe->objective - game.value(s) - eps <= 1e-7) settle.push_back(s);
    }
    if (settle.empty()) throw std::runtime_error("reference nucleolus: nothing settled");
    for (game::Coalition s : settle) {
      fixed.emplace_back(s, game.value(s) + eps);
      span_rows.push_back(incidence(s, k));
    }
    std::vector<game::Coalition> still;
    for (game::Coalition s : open) {
      auto extended = span_rows;
      extended.push_back(incidence(s, k));
      if (rank_of(extended) > rank_of(span_rows)) still.push_back(s);
    }
    open = std::move(still);
  }

  // The fixed equalities now pin x; eps is pinned too so a vertex exists.
  open.clear();
  std::vector<double> objective(k + 1, 0.0);
  const auto point = solve_by_vertices(base_problem(objective, 0.0), tol);
  if (!point) throw std::runtime_error("reference nucleolus: final system infeasible");
  return {point->x.begin(), point->x.begin() + static_cast<std::ptrdiff_t>(k)};
}

namespace {

// Constrained equal awards: min(c_i, lambda) with the awards summing to amount.
std::vector<double> equal_awards(const std::vector<double>& caps, double amount) {
  double lo = 0.0;
  double hi = *std::max_element(caps.begin(), caps.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double total = 0.0;
    for (double c : caps) total += std::min(c, mid);
    (total < amount ? lo : hi) = mid;
  }
  std::vector<double> out;
  for (double c : caps) out.push_back(std::min(c, 0.5 * (lo + hi)));
  return out;
}

}  // namespace

std::vector<double> talmud_rule(const std::vector<double>& claims, double estate) {
  const double total = std::accumulate(claims.begin(), claims.end(), 0.0);
  std::vector<double> half;
  for (double c : claims) half.push_back(0.5 * c);
  if (estate <= 0.5 * total) return equal_awards(half, estate);
  const std::vector<double> losses = equal_awards(half, total - estate);
  std::vector<double> out;
  for (std::size_t i = 0; i < claims.size(); ++i) out.push_back(claims[i] - losses[i]);
  return out;
}

game::TuGame bankruptcy_game(const std::vector<double>& claims, double estate) {
  return game_from(claims.size(), [&](game::Coalition s) {
    double outside = 0.0;
    for (std::size_t i = 0; i < claims.size(); ++i) {
      if (!game::contains(s, i)) outside += claims[i];
    }
    return s == 0 ? 0.0 : std::max(0.0, estate - outside);
  });
}

game::TuGame game_from(std::size_t players, const std::function<double(game::Coalition)>& v) {
  std::vector<double> values(std::size_t{1} << players);
  for (game::Coalition s = 0; s < values.size(); ++s) values[s] = s == 0 ? 0.0 : v(s);
  return game::TuGame::from_values(std::move(values));
}

}  // namespace coopdea::oracles
