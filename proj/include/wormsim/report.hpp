// Runs a scenario through its engines and renders the results.
#ifndef WORMSIM_REPORT_HPP
#define WORMSIM_REPORT_HPP

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "wormsim/metrics.hpp"
#include "wormsim/monitoring.hpp"
#include "wormsim/scenario.hpp"

namespace wormsim {

struct AnalyticPredictions {
  std::optional<TimeValue> peak_time;
  std::optional<double> peak_infected;
  std::string peak_infected_note;  // why the value is missing, if it is
  std::optional<TimeValue> extinction_time;
  std::vector<std::pair<double, TimeValue>> spread_times;  // (kappa, time)
};

AnalyticPredictions analytic_predictions(const ScenarioParams& params,
                                         const std::vector<double>& kappas);

struct EngineResult {
  Engine engine = Engine::Integrate;
  Trajectory trajectory;
  SummaryMetrics metrics;
  std::vector<std::pair<double, std::optional<TimeValue>>> spread_times;
  std::optional<int> runs_used;
  std::optional<int> extinct_before_end;
};

struct DetectionSummary {
  std::int64_t monitors = 0;
  int runs = 0;
  double median_itu = 0.0;  // +inf when fewer than half the runs detect
  double detected_by_deadline = 0.0;  // fraction of runs
};

struct MonitoringResult {
  std::int64_t thumb_rule_fixed = 0;
  std::int64_t thumb_rule_p2p = 0;
  double deadline_itu = 0.0;
  std::optional<MonitorPlan> plan;  // NoPatching only
  std::optional<std::int64_t> requested_monitors;
  std::optional<double> requested_expected_scans;
  std::optional<DetectionSummary> detection;
  std::string note;
};

struct RunResult {
  ScenarioFile scenario;
  AnalyticPredictions analytic;
  std::vector<EngineResult> engines;
  std::optional<MonitoringResult> monitoring;
};

/// Closed-form trajectory sampled every dt·stride up to t_end (clipped to
/// the validity window, whose end point is always included).
Trajectory closed_form_trajectory(const ScenarioParams& params, const IntegratorConfig& grid);

RunResult execute(const ScenarioFile& scenario);

/// t_itu,t_wallclock,S,I,P with shortest round-trip number formatting.
std::string trajectory_csv(const Trajectory& traj);

nlohmann::json report_json(const RunResult& result);

/// Writes <engine>.csv for every engine plus report.json.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

struct ComparisonRow {
  std::string quantity;
  std::optional<double> analytic;
  std::string analytic_note;
  std::vector<std::optional<double>> engine_values;     // scenario engine order
  std::vector<std::optional<double>> vs_analytic;       // relative errors
  std::vector<std::optional<double>> vs_reference;      // relative errors
};

struct ComparisonTable {
  std::vector<std::string> engines;
  std::size_t reference = 0;
  std::vector<ComparisonRow> rows;
  double tolerance = 0.0;
  std::optional<double> analytic_tolerance;
  bool within_tolerance = true;

  std::string render() const;
};

/// Table of analytic and per-engine quantities. Engines are checked against
/// the reference engine (integrate if selected, else the first) with
/// compare.tolerance; analytic predictions gate only when
/// compare.analytic_tolerance is set. Needs at least two engines.
ComparisonTable compare_results(const RunResult& result);

}  // namespace wormsim

#endif  // WORMSIM_REPORT_HPP
