#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "bclab/lab.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  const bclab::ExperimentConfig config =
      bclab::ExperimentConfig::parse_file(config_path);
  const std::string started = bclab::iso_timestamp_utc();
  const bclab::ScenarioResult result = bclab::run_scenario(config);
  const std::string finished = bclab::iso_timestamp_utc();
  bclab::write_manifest(config.resolved_output_dir(), config, {result},
                        started, finished);
  std::cout << result.name << ": " << (result.pass ? "PASS" : "FAIL") << "\n";
  return result.pass ? 0 : 1;
}

int cmd_converge(const std::string& scenario, const std::string& sizes_arg,
                 const std::string& config_path) {
  std::vector<int> sizes;
  std::stringstream ss(sizes_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      const int n = std::stoi(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      sizes.push_back(n);
    } catch (const std::exception&) {
      throw bclab::ConfigError("bad entry in --sizes: '" + tok + "'");
    }
  }
  bclab::ExperimentConfig config =
      bclab::ExperimentConfig::parse_file(config_path);
  const bclab::ConvergenceResult result =
      bclab::convergence_study(scenario, sizes, config);
  std::cout << "convergence " << scenario << ":";
  for (std::size_t i = 0; i < result.errors.size(); ++i) {
    std::cout << " n=" << result.sizes[i] << " err=" << result.errors[i];
  }
  if (!result.orders.empty()) {
    std::cout << " orders=";
    for (std::size_t i = 0; i < result.orders.size(); ++i) {
      std::cout << (i ? "," : "") << result.orders[i];
    }
  }
  std::cout << " " << (result.pass ? "PASS" : "FAIL") << "\n";
  return result.pass ? 0 : 1;
}

int cmd_list(bool as_json) {
  const auto scenarios = bclab::list_scenarios();
  if (as_json) {
    std::cout << "[\n";
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      std::cout << "  {\"name\": \"" << scenarios[i].name
                << "\", \"claim\": \"" << scenarios[i].claim << "\"}"
                << (i + 1 < scenarios.size() ? "," : "") << "\n";
    }
    std::cout << "]\n";
  } else {
    for (const auto& s : scenarios) {
      std::cout << s.name << "\n    " << s.claim << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for boundary-controlled evolution"};
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "run one scenario from a config");
  run->add_option("config", run_config, "config file (key = value lines)")
      ->required();

  std::string conv_scenario;
  std::string conv_sizes;
  std::string conv_config;
  CLI::App* converge =
      app.add_subcommand("converge", "grid refinement study for a scenario");
  converge->add_option("scenario", conv_scenario, "scenario name")->required();
  converge->add_option("--sizes", conv_sizes, "comma-separated grid sizes")
      ->required();
  converge->add_option("config", conv_config, "config file")->required();

  bool list_json = false;
  CLI::App* list = app.add_subcommand("list", "list available scenarios");
  list->add_flag("--json", list_json, "emit the catalog as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_config);
    if (converge->parsed()) {
      return cmd_converge(conv_scenario, conv_sizes, conv_config);
    }
    if (list->parsed()) return cmd_list(list_json);
  } catch (const bclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
