#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coopdea/alloc.hpp"
#include "coopdea/dea.hpp"
#include "coopdea/solvers.hpp"

namespace coopdea::cli {

enum class ModeSelection { kDirect, kSecondary, kBoth };
enum class OutputFormat { kJson, kCsv };

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitSizeLimit = 3,
  kExitSolverFailure = 4,
};

struct RunConfig {
  std::filesystem::path input;
  dea::Dimensions dims;
  double revenue = 0.0;
  ModeSelection mode = ModeSelection::kBoth;
  std::vector<solvers::SolutionConcept> concepts;
  // Directory receiving every artifact of the run.
  std::filesystem::path output;
  OutputFormat format = OutputFormat::kJson;
  alloc::SingletonUniverse singleton_universe = alloc::SingletonUniverse::kPerStage;
  // Seeds the sampled super-additivity scan on games too large to enumerate.
  std::uint64_t seed = 0x5eed;
  bool self_check = false;
};

// Throws InputError when dims, revenue or concepts are out of range.
void validate(const RunConfig& config);

std::vector<solvers::SolutionConcept> parse_concepts(std::string_view list);
ModeSelection parse_mode(std::string_view name);
dea::Dimensions parse_dims(std::string_view text);

// Reads `id, x1..xs, z1..zq, y1..yt`. Errors carry line and column numbers.
dea::DmuPanel load_panel(const std::filesystem::path& path, const dea::Dimensions& dims);
dea::DmuPanel parse_panel(std::string_view text, const dea::Dimensions& dims, std::string_view source = "<input>");

nlohmann::ordered_json report_to_json(const alloc::AllocationReport& report, const dea::CrossEfficiencyMatrix& cem);
std::string report_to_csv(const alloc::AllocationReport& report);
alloc::AllocationReport report_from_csv(std::string_view text);
std::string cem_to_csv(const dea::CrossEfficiencyMatrix& cem);
// label, stage, comparison, allocation per player.
std::string plot_to_csv(const alloc::AllocationReport& report);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

enum class ToleranceProfile { kStrict, kPaper };

// Reads ALLOC_TOL; unset or "strict" selects kStrict.
ToleranceProfile tolerance_profile_from_env();
double tolerance_of(ToleranceProfile profile);

// Consistency checks over finished reports: efficiency, stage totals against
// the (R1, R2) split, and direct/secondary nucleolus agreement. The last one
// only applies to the full singleton universe; with per-stage singletons the
// secondary stage games differ from the direct game. Returns one message per
// failed check.
std::vector<std::string> self_check(const std::vector<alloc::AllocationReport>& reports,
                                    const dea::CrossEfficiencyMatrix& cem, double tolerance,
                                    alloc::SingletonUniverse universe = alloc::SingletonUniverse::kFull);

// Runs the whole pipeline and writes artifacts. Errors are reported on `err`
// and mapped to an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace coopdea::cli
