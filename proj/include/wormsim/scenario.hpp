// Scenario documents consumed by the command-line front end.
//
// A scenario is a JSON object:
//
//   {
//     "name": "codered-fixed",
//     "description": "...",                       (optional)
//     "params": {"n_hosts": 360000, "virulence": "1.8/hour", "gamma": 312,
//                "p_bar": 25, "i0": 25, "defense": "fixed_servers"},
//     "engines": ["closed_form", "integrate", "stochastic"],
//     "integrator": {"dt_itu": 0.001, "t_end_itu": 60, "sample_stride": 100,
//                    "method": "rk4_fixed"},
//     "stochastic": {"seed": 1, "t_end_itu": 60, "sample_dt_itu": 0.1, "runs": 20},
//     "kappa": [0.5, 0.9],
//     "extinction_threshold": 25,
//     "monitors": {"deadline_itu": 2.42, "count": 7485, "detection_runs": 200},
//     "compare": {"tolerance": 0.1, "analytic_tolerance": 0.2}
//   }
//
// Unknown keys are rejected. Virulence units are second, minute, hour or day.
#ifndef WORMSIM_SCENARIO_HPP
#define WORMSIM_SCENARIO_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wormsim/core.hpp"
#include "wormsim/integrator.hpp"
#include "wormsim/stochastic.hpp"

namespace wormsim {

enum class Engine { ClosedForm, Integrate, Stochastic };

std::string_view to_string(Engine engine);
std::optional<Engine> parse_engine(std::string_view text);

struct MonitorsBlock {
  std::optional<double> deadline_itu;  // defaults to ln ln N
  std::optional<std::int64_t> count;
  std::optional<int> detection_runs;   // defaults to stochastic.runs
};

struct CompareSettings {
  double tolerance = 0.1;                    // engine vs reference engine
  std::optional<double> analytic_tolerance;  // engine vs analytic, when set
};

struct ScenarioFile {
  std::string name;
  std::string description;
  ScenarioParams params;
  std::vector<Engine> engines;
  IntegratorConfig integrator;
  StochasticConfig stochastic;
  std::vector<double> kappa;
  std::optional<double> extinction_threshold;
  std::optional<MonitorsBlock> monitors;
  CompareSettings compare;
};

/// Parses and validates a scenario document. Errors are Error(Config) whose
/// message starts with the offending key path.
ScenarioFile parse_scenario(const nlohmann::json& doc);

/// Effective configuration, in the same schema parse_scenario accepts.
nlohmann::json to_json(const ScenarioFile& scenario);

/// Applies a dotted-key override such as "params.gamma=2". The value is read
/// as JSON when it parses, otherwise as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Reads a scenario document from disk.
nlohmann::json read_scenario_document(const std::string& path);

std::vector<std::string> builtin_scenario_names();
std::optional<nlohmann::json> builtin_scenario(std::string_view name);

/// One line per built-in scenario with its parameter summary.
std::string list_scenarios();

}  // namespace wormsim

#endif  // WORMSIM_SCENARIO_HPP
