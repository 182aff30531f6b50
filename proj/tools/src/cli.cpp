#include "coopdea/cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "coopdea/errors.hpp"
#include "coopdea/game.hpp"

namespace coopdea::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

bool parse_double(std::string_view cell, double& value) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && !cell.empty();
}

template <typename T>
bool parse_integer(std::string_view cell, T& value) {
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && !cell.empty();
}

std::string column_name(const dea::Dimensions& dims, std::size_t col) {
  if (col == 0) return "id";
  std::size_t c = col - 1;
  if (c < dims.inputs) return "x" + std::to_string(c + 1);
  c -= dims.inputs;
  if (c < dims.intermediates) return "z" + std::to_string(c + 1);
  return "y" + std::to_string(c - dims.intermediates + 1);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw std::runtime_error("format_number: buffer too small");
  return std::string(buffer, ptr);
}

std::vector<solvers::SolutionConcept> parse_concepts(std::string_view list) {
  using solvers::SolutionConcept;
  if (trim(list) == "all") {
    return {SolutionConcept::kShapley, SolutionConcept::kLeastCore, SolutionConcept::kNucleolus};
  }
  std::vector<SolutionConcept> concepts;
  for (std::string_view name : split(list, ',')) {
    const auto kind = solvers::parse_concept(name);
    if (!kind) throw InputError("unknown concept '" + std::string(name) + "'");
    if (std::find(concepts.begin(), concepts.end(), *kind) == concepts.end()) concepts.push_back(*kind);
  }
  return concepts;
}

ModeSelection parse_mode(std::string_view name) {
  if (name == "direct") return ModeSelection::kDirect;
  if (name == "secondary") return ModeSelection::kSecondary;
  if (name == "both") return ModeSelection::kBoth;
  throw InputError("unknown mode '" + std::string(name) + "' (direct, secondary, both)");
}

dea::Dimensions parse_dims(std::string_view text) {
  const auto parts = split(text, ',');
  std::size_t values[3];
  if (parts.size() != 3 || !parse_integer(parts[0], values[0]) || !parse_integer(parts[1], values[1]) ||
      !parse_integer(parts[2], values[2])) {
    throw InputError("--dims expects s,q,t (e.g. 3,1,2), got '" + std::string(text) + "'");
  }
  return {values[0], values[1], values[2]};
}

void validate(const RunConfig& config) {
  if (config.dims.inputs == 0 || config.dims.intermediates == 0 || config.dims.outputs == 0) {
    throw InputError("dims s, q, t must all be at least 1");
  }
  if (!(config.revenue > 0.0) || !std::isfinite(config.revenue)) {
    throw InputError("revenue must be positive");
  }
  if (config.concepts.empty()) throw InputError("no solution concept selected");
}

dea::DmuPanel parse_panel(std::string_view text, const dea::Dimensions& dims, std::string_view source) {
  const std::size_t width = 1 + dims.inputs + dims.intermediates + dims.outputs;
  const std::string where(source);
  const auto lines = lines_of(text);

  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::set<std::string, std::less<>> seen;

  for (std::string_view raw : lines) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    const std::string at = where + ":" + std::to_string(line_no);
    if (cells.size() != width) {
      throw InputError(at + ": expected " + std::to_string(width) + " columns, found " +
                       std::to_string(cells.size()));
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    if (cells[0].empty()) throw InputError(at + ", column 1 (id): empty id");
    if (!seen.insert(std::string(cells[0])).second) {
      throw InputError(at + ", column 1 (id): duplicate id '" + std::string(cells[0]) + "'");
    }
    std::vector<double> row(width - 1);
    for (std::size_t c = 1; c < width; ++c) {
      const std::string col = ", column " + std::to_string(c + 1) + " (" + column_name(dims, c) + ")";
      if (!parse_double(cells[c], row[c - 1]) || !std::isfinite(row[c - 1])) {
        throw InputError(at + col + ": non-numeric value '" + std::string(cells[c]) + "'");
      }
      if (!(row[c - 1] > 0.0)) {
        throw InputError(at + col + ": value must be positive, got " + std::string(cells[c]));
      }
    }
    ids.emplace_back(cells[0]);
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw InputError(where + ": missing header row");
  if (rows.size() < 2) {
    throw InputError(where + ": need at least 2 DMUs, found " + std::to_string(rows.size()));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(dims.inputs));
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(dims.intermediates));
  Eigen::MatrixXd y(n, static_cast<Eigen::Index>(dims.outputs));
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& row = rows[static_cast<std::size_t>(j)];
    std::size_t c = 0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) x(j, i) = row[c++];
    for (Eigen::Index i = 0; i < z.cols(); ++i) z(j, i) = row[c++];
    for (Eigen::Index i = 0; i < y.cols(); ++i) y(j, i) = row[c++];
  }
  dea::DmuPanel panel(std::move(ids), dims, std::move(x), std::move(z), std::move(y));
  panel.validate_for_allocation();
  return panel;
}

dea::DmuPanel load_panel(const std::filesystem::path& path, const dea::Dimensions& dims) {
  return parse_panel(read_file(path), dims, path.string());
}

nlohmann::ordered_json report_to_json(const alloc::AllocationReport& report, const dea::CrossEfficiencyMatrix& cem) {
  nlohmann::ordered_json doc;
  doc["mode"] = alloc::to_string(report.mode);
  doc["concept"] = solvers::to_string(report.kind);
  doc["R"] = report.revenue;
  doc["R1"] = report.stage1_revenue;
  doc["R2"] = report.stage2_revenue;
  if (!report.epsilons.empty()) doc["epsilon"] = report.epsilons;
  nlohmann::ordered_json players = nlohmann::ordered_json::array();
  for (const alloc::PlayerRow& row : report.players) {
    players.push_back({{"label", row.label},
                       {"stage", dea::stage_number(row.stage)},
                       {"allocation", row.allocation},
                       {"rank", row.rank},
                       {"stage_rank", row.stage_rank},
                       {"avg_cree", row.avg_cree},
                       {"comparison", row.comparison}});
  }
  doc["players"] = std::move(players);
  nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
  for (std::size_t d = 0; d < cem.size(); ++d) {
    nlohmann::ordered_json line = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < cem.size(); ++l) line.push_back(cem(d, l));
    matrix.push_back(std::move(line));
  }
  doc["cem"] = std::move(matrix);
  return doc;
}

std::string report_to_csv(const alloc::AllocationReport& report) {
  std::ostringstream out;
  out << "# mode=" << alloc::to_string(report.mode) << '\n';
  out << "# concept=" << solvers::to_string(report.kind) << '\n';
  out << "# R=" << format_number(report.revenue) << '\n';
  out << "# R1=" << format_number(report.stage1_revenue) << '\n';
  out << "# R2=" << format_number(report.stage2_revenue) << '\n';
  if (!report.epsilons.empty()) {
    out << "# epsilon=";
    for (std::size_t i = 0; i < report.epsilons.size(); ++i) {
      out << (i ? ";" : "") << format_number(report.epsilons[i]);
    }
    out << '\n';
  }
  out << "label,stage,allocation,rank,stage_rank,avg_cree,comparison\n";
  for (const alloc::PlayerRow& row : report.players) {
    out << row.label << ',' << dea::stage_number(row.stage) << ',' << format_number(row.allocation) << ','
        << row.rank << ',' << row.stage_rank << ',' << format_number(row.avg_cree) << ','
        << format_number(row.comparison) << '\n';
  }
  return out.str();
}

alloc::AllocationReport report_from_csv(std::string_view text) {
  alloc::AllocationReport report;
  bool header_seen = false;
  std::size_t line_no = 0;
  const auto bad = [&](const std::string& what) {
    return InputError("report line " + std::to_string(line_no) + ": " + what);
  };
  const auto number = [&](std::string_view cell) {
    double v = 0.0;
    if (!parse_double(cell, v)) throw bad("bad number '" + std::string(cell) + "'");
    return v;
  };

  for (std::string_view raw : lines_of(text)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) throw bad("expected key=value");
      const std::string_view key = body.substr(0, eq);
      const std::string_view value = body.substr(eq + 1);
      if (key == "mode") {
        report.mode = value == "direct" ? alloc::Mode::kDirect : alloc::Mode::kSecondary;
      } else if (key == "concept") {
        const auto kind = solvers::parse_concept(value);
        if (!kind) throw bad("unknown concept");
        report.kind = *kind;
      } else if (key == "R") {
        report.revenue = number(value);
      } else if (key == "R1") {
        report.stage1_revenue = number(value);
      } else if (key == "R2") {
        report.stage2_revenue = number(value);
      } else if (key == "epsilon") {
        for (std::string_view e : split(value, ';')) report.epsilons.push_back(number(e));
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 7) throw bad("expected 7 columns");
    alloc::PlayerRow row;
    row.label = std::string(cells[0]);
    int stage = 0;
    if (!parse_integer(cells[1], stage) || (stage != 1 && stage != 2)) throw bad("bad stage");
    row.stage = stage == 1 ? dea::Stage::kFirst : dea::Stage::kSecond;
    row.allocation = number(cells[2]);
    if (!parse_integer(cells[3], row.rank) || !parse_integer(cells[4], row.stage_rank)) throw bad("bad rank");
    row.avg_cree = number(cells[5]);
    row.comparison = number(cells[6]);
    report.players.push_back(std::move(row));
  }
  return report;
}

std::string cem_to_csv(const dea::CrossEfficiencyMatrix& cem) {
  std::ostringstream out;
  out << "evaluator";
  for (const std::string& label : cem.labels()) out << ',' << label;
  out << '\n';
  for (std::size_t d = 0; d < cem.size(); ++d) {
    out << cem.labels()[d];
    for (std::size_t l = 0; l < cem.size(); ++l) out << ',' << format_number(cem(d, l));
    out << '\n';
  }
  return out.str();
}

std::string plot_to_csv(const alloc::AllocationReport& report) {
  std::ostringstream out;
  out << "label,stage,comparison,allocation\n";
  for (const alloc::PlayerRow& row : report.players) {
    out << row.label << ',' << dea::stage_number(row.stage) << ',' << format_number(row.comparison) << ','
        << format_number(row.allocation) << '\n';
  }
  return out.str();
}

ToleranceProfile tolerance_profile_from_env() {
  const char* value = std::getenv("ALLOC_TOL");
  if (value == nullptr || std::string_view(value).empty() || std::string_view(value) == "strict") {
    return ToleranceProfile::kStrict;
  }
  if (std::string_view(value) == "paper") return ToleranceProfile::kPaper;
  throw InputError("ALLOC_TOL must be 'strict' or 'paper', got '" + std::string(value) + "'");
}

double tolerance_of(ToleranceProfile profile) {
  // "paper" suits comparisons against values rounded to two decimals.
  return profile == ToleranceProfile::kStrict ? 1e-6 : 5e-2;
}

std::vector<std::string> self_check(const std::vector<alloc::AllocationReport>& reports,
                                    const dea::CrossEfficiencyMatrix& cem, double tolerance,
                                    alloc::SingletonUniverse universe) {
  std::vector<std::string> failures;
  if (reports.empty()) return failures;
  const auto [r1, r2] = alloc::stage_revenues(cem, reports.front().revenue);
  const auto name = [](const alloc::AllocationReport& r) {
    return std::string(alloc::to_string(r.mode)) + "/" + std::string(solvers::to_string(r.kind));
  };

  for (const alloc::AllocationReport& report : reports) {
    const double scale = std::max(1.0, report.revenue);
    double total = 0.0;
    for (const alloc::PlayerRow& row : report.players) total += row.allocation;
    if (std::abs(total - report.revenue) > tolerance * scale) {
      failures.push_back(name(report) + ": allocations sum to " + format_number(total) + ", expected " +
                         format_number(report.revenue));
    }
    if (std::abs(report.stage1_revenue - r1) > tolerance * scale ||
        std::abs(report.stage2_revenue - r2) > tolerance * scale) {
      failures.push_back(name(report) + ": stage totals (" + format_number(report.stage1_revenue) + ", " +
                         format_number(report.stage2_revenue) + ") differ from split (" + format_number(r1) +
                         ", " + format_number(r2) + ")");
    }
  }

  const auto find = [&](alloc::Mode mode) -> const alloc::AllocationReport* {
    for (const auto& r : reports) {
      if (r.mode == mode && r.kind == solvers::SolutionConcept::kNucleolus) return &r;
    }
    return nullptr;
  };
  const alloc::AllocationReport* direct = find(alloc::Mode::kDirect);
  const alloc::AllocationReport* secondary = find(alloc::Mode::kSecondary);
  if (direct && secondary && universe == alloc::SingletonUniverse::kFull) {
    for (std::size_t i = 0; i < direct->players.size(); ++i) {
      const double gap = std::abs(direct->players[i].allocation - secondary->players[i].allocation);
      if (gap > tolerance * std::max(1.0, direct->revenue)) {
        failures.push_back("nucleolus of " + direct->players[i].label + " differs between modes by " +
                           format_number(gap));
      }
    }
  }
  return failures;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    const double tolerance = config.self_check ? tolerance_of(tolerance_profile_from_env()) : 0.0;
    const dea::DmuPanel panel = load_panel(config.input, config.dims);
    const dea::SubDmuSet units = dea::split_to_subdmus(dea::normalize_panel(panel));
    const dea::CrossEfficiencyMatrix cem = dea::build_cem(units);

    std::filesystem::create_directories(config.output);
    write_file(config.output / "cem.csv", cem_to_csv(cem));

    const auto [r1, r2] = alloc::stage_revenues(cem, config.revenue);
    out << "units " << cem.size() << ", R1 = " << format_number(r1) << ", R2 = " << format_number(r2) << '\n';

    game::SuperadditivityOptions sa_options;
    sa_options.seed = config.seed;
    for (const dea::Stage stage : {dea::Stage::kFirst, dea::Stage::kSecond}) {
      const dea::CrossEfficiencyMatrix block = dea::stage_submatrix(cem, stage);
      if (block.size() > game::kMaxDensePlayers) continue;
      const game::SuperadditivityReport sa =
          game::check_superadditive(game::make_cree_game(block, stage == dea::Stage::kFirst ? r1 : r2), sa_options);
      out << "stage " << dea::stage_number(stage) << " game superadditive: " << (sa.superadditive ? "yes" : "no")
          << (sa.exhaustive ? " (exhaustive, " : " (sampled, ") << sa.pairs_checked << " pairs)\n";
    }

    std::vector<alloc::Mode> modes;
    if (config.mode != ModeSelection::kSecondary) modes.push_back(alloc::Mode::kDirect);
    if (config.mode != ModeSelection::kDirect) modes.push_back(alloc::Mode::kSecondary);

    alloc::AllocationOptions options;
    options.singleton_universe = config.singleton_universe;

    std::vector<alloc::AllocationReport> reports;
    for (const alloc::Mode mode : modes) {
      for (const solvers::SolutionConcept kind : config.concepts) {
        alloc::AllocationReport report = mode == alloc::Mode::kDirect
                                             ? alloc::direct_allocation(cem, config.revenue, kind, options)
                                             : alloc::secondary_allocation(cem, config.revenue, kind, options);
        const std::string stem = std::string(alloc::to_string(mode)) + "_" + std::string(solvers::to_string(kind));
        if (config.format == OutputFormat::kJson) {
          write_file(config.output / ("report_" + stem + ".json"), report_to_json(report, cem).dump(2) + "\n");
        } else {
          write_file(config.output / ("report_" + stem + ".csv"), report_to_csv(report));
        }
        write_file(config.output / ("plot_" + stem + ".csv"), plot_to_csv(report));

        out << '\n' << stem << '\n';
        for (const alloc::PlayerRow& row : report.players) {
          char line[96];
          std::snprintf(line, sizeof line, "  %-8s %12.4f  rank %zu\n", row.label.c_str(), row.allocation, row.rank);
          out << line;
        }
        reports.push_back(std::move(report));
      }
    }

    if (config.self_check) {
      const std::vector<std::string> failures = self_check(reports, cem, tolerance, config.singleton_universe);
      for (const std::string& failure : failures) err << "self-check: " << failure << '\n';
      if (!failures.empty()) return kExitSolverFailure;
      out << "\nself-check passed (tolerance " << format_number(tolerance) << ")\n";
    }
    return kExitOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const SizeLimitError& e) {
    err << "size limit: " << e.what() << '\n';
    return kExitSizeLimit;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace coopdea::cli
