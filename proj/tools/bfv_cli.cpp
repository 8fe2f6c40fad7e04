#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bfv/scenario.hpp"

// Exit codes: 0 = all commands succeeded, 1 = a mathematical witness was
// produced (or a module error), 2 = usage / schema error.

int main(int argc, char** argv) {
  CLI::App app{"BFV engine: run a scenario file and emit a report"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute one scenario file");
  std::string file;
  std::string out_path;
  bfv::RunConfig config;
  run->add_option("file", file, "scenario file (JSON)")->required();
  run->add_option("--out", out_path, "write the report to this path instead of stdout");
  run->add_option("--steps", config.steps, "steps per unit time for numeric flows")
      ->check(CLI::PositiveNumber);
  run->add_option("--nil-cap", config.nil_cap, "iteration cap for local nilpotency")
      ->check(CLI::PositiveNumber);
  run->add_option("--tol", config.tol, "tolerance for numeric cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    bfv::ScenarioOutcome outcome = bfv::run_scenario(file, config);
    const std::string text = outcome.report.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 2;
      }
      out << text;
    }
    return outcome.exit_code;
  } catch (const bfv::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
