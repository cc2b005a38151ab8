// wormsim: run worm/patching scenarios and compare engines with predictions.
//
//   wormsim list-scenarios
//   wormsim run --scenario codered-fixed --out results/
//   wormsim run --config my.json --set params.gamma=2 --engines integrate,stochastic
//   wormsim compare --scenario codered-fixed
//
// Exit codes: 0 success, 1 comparison outside tolerance, 2 configuration
// error, 3 numerical failure.
#include <CLI11.hpp>
#include <cstdint>
#include <fmt/format.h>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wormsim/report.hpp"
#include "wormsim/scenario.hpp"

namespace {

constexpr int kExitTolerance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ScenarioOptions {
  std::string config;
  std::string scenario;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string engines;
};

void add_scenario_options(CLI::App* cmd, ScenarioOptions& opts) {
  auto* config = cmd->add_option("--config", opts.config, "Scenario file (JSON)");
  auto* scenario = cmd->add_option("--scenario", opts.scenario, "Built-in scenario name");
  config->excludes(scenario);
  cmd->add_option("--set", opts.overrides, "Override KEY=VALUE (dotted key, repeatable)");
  cmd->add_option("--seed", opts.seed, "Seed for stochastic runs");
  cmd->add_option("--engines", opts.engines,
                  "Comma-separated engines: closed_form,integrate,stochastic");
}

wormsim::ScenarioFile load(const ScenarioOptions& opts) {
  using wormsim::Error;
  using wormsim::ErrorCode;
  nlohmann::json doc;
  if (!opts.config.empty()) {
    doc = wormsim::read_scenario_document(opts.config);
  } else if (!opts.scenario.empty()) {
    auto builtin = wormsim::builtin_scenario(opts.scenario);
    if (!builtin) {
      throw Error(ErrorCode::Config,
                  fmt::format("--scenario: unknown built-in '{}' (see list-scenarios)", opts.scenario));
    }
    doc = *builtin;
  } else {
    throw Error(ErrorCode::Config, "one of --config or --scenario is required");
  }
  for (const auto& o : opts.overrides) wormsim::apply_override(doc, o);
  if (opts.seed) wormsim::apply_override(doc, fmt::format("stochastic.seed={}", *opts.seed));
  if (!opts.engines.empty()) {
    nlohmann::json list = nlohmann::json::array();
    std::size_t start = 0;
    while (start <= opts.engines.size()) {
      const auto comma = opts.engines.find(',', start);
      const auto name = opts.engines.substr(start, comma == std::string::npos ? std::string::npos
                                                                              : comma - start);
      if (!name.empty()) list.push_back(name);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    doc["engines"] = list;
  }
  return wormsim::parse_scenario(doc);
}

int exit_code_for(const wormsim::Error& e) {
  return e.code() == wormsim::ErrorCode::Numerical ? kExitNumerical : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worm propagation under fixed-server and peer-to-peer patching"};
  app.require_subcommand(1);

  ScenarioOptions run_opts;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run a scenario and write trajectories and a report");
  add_scenario_options(run, run_opts);
  run->add_option("--out", out_dir, "Output directory")->required();

  ScenarioOptions compare_opts;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Tabulate engines against analytic predictions");
  add_scenario_options(compare, compare_opts);
  compare->add_option("--out", compare_out, "Also write outputs to this directory");

  auto* list = app.add_subcommand("list-scenarios", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) {
      std::cout << wormsim::list_scenarios();
      return 0;
    }
    if (run->parsed()) {
      const auto scenario = load(run_opts);
      const auto result = wormsim::execute(scenario);
      wormsim::write_outputs(result, out_dir);
      std::cout << fmt::format("wrote {} trajectories and report.json to {}\n",
                               result.engines.size(), out_dir);
      return 0;
    }
    if (compare->parsed()) {
      const auto scenario = load(compare_opts);
      if (scenario.engines.size() < 2) {
        throw wormsim::Error(wormsim::ErrorCode::Config,
                             "engines: compare needs at least two engines");
      }
      const auto result = wormsim::execute(scenario);
      if (!compare_out.empty()) wormsim::write_outputs(result, compare_out);
      const auto table = wormsim::compare_results(result);
      std::cout << table.render();
      return table.within_tolerance ? 0 : kExitTolerance;
    }
  } catch (const wormsim::Error& e) {
    std::cerr << "wormsim: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "wormsim: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
