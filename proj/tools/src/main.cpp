#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "coopdea/cli/cli.hpp"
#include "coopdea/errors.hpp"

int main(int argc, char** argv) {
  using namespace coopdea;
  CLI::App app{"Two-stage DEA cross-efficiency revenue allocation"};

  cli::RunConfig config;
  std::string dims;
  std::string mode = "both";
  std::string concepts = "all";
  std::string format = "json";
  std::string universe = "per-stage";

  app.add_option("--input", config.input, "CSV panel: id, x1..xs, z1..zq, y1..yt")->required();
  app.add_option("--dims", dims, "s,q,t (inputs, intermediates, outputs)")->required();
  app.add_option("--revenue", config.revenue, "Total revenue R to allocate")->required();
  app.add_option("--mode", mode, "direct, secondary or both")->check(CLI::IsMember({"direct", "secondary", "both"}));
  app.add_option("--concepts", concepts, "Comma list of shapley, leastcore, nucleolus, or all");
  app.add_option("--output", config.output, "Output directory")->required();
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--singleton-universe", universe, "Evaluators for a lone player in a stage game")
      ->check(CLI::IsMember({"per-stage", "full"}));
  app.add_option("--seed", config.seed, "Seed for sampled super-additivity checks");
  app.add_flag("--self-check", config.self_check, "Verify efficiency and stage totals (ALLOC_TOL=strict|paper)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInputError;
  }

  try {
    config.dims = cli::parse_dims(dims);
    config.mode = cli::parse_mode(mode);
    config.concepts = cli::parse_concepts(concepts);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return cli::kExitInputError;
  }
  config.format = format == "csv" ? cli::OutputFormat::kCsv : cli::OutputFormat::kJson;
  config.singleton_universe =
      universe == "full" ? alloc::SingletonUniverse::kFull : alloc::SingletonUniverse::kPerStage;

  return cli::run(config, std::cout, std::cerr);
}
