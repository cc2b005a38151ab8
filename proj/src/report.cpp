#include "wormsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>

#include "wormsim/fluid.hpp"
#include "wormsim/stochastic.hpp"

#ifndef WORMSIM_VERSION
#define WORMSIM_VERSION "unknown"
#endif

namespace wormsim {

using nlohmann::json;

AnalyticPredictions analytic_predictions(const ScenarioParams& params,
                                         const std::vector<double>& kappas) {
  AnalyticPredictions a;
  switch (params.defense) {
    case Defense::NoPatching:
      for (double k : kappas) a.spread_times.emplace_back(k, spread_time(params, {k}));
      a.peak_infected_note = "n/a (no patching)";
      break;
    case Defense::FixedServers:
      a.peak_time = fixed_peak_time(params);
      a.extinction_time = fixed_extinction_time(params);
      a.peak_infected_note = "n/a (order N only)";
      break;
    case Defense::PeerToPeer:
      a.peak_time = p2p_peak_time(params);
      a.extinction_time = p2p_extinction_time(params);
      if (params.gamma > 1.0) {
        a.peak_infected = p2p_peak_infected(params);
      } else {
        a.peak_infected_note = "n/a (gamma <= 1)";
      }
      break;
  }
  return a;
}

Trajectory closed_form_trajectory(const ScenarioParams& params, const IntegratorConfig& grid) {
  validate(params);
  Trajectory traj;
  traj.params = params;
  traj.source = TrajectorySource::ClosedForm;
  const double h = grid.dt_itu * grid.sample_stride;
  const double t_max = std::min(grid.t_end_itu, closed_form_horizon(params));
  for (long long k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    if (t >= t_max * (1.0 - 1e-12)) break;
    traj.samples.push_back({t, closed_form_state(t, params)});
  }
  traj.samples.push_back({t_max, closed_form_state(t_max, params)});
  return traj;
}

namespace {

double threshold_for(const ScenarioFile& s) {
  return s.extinction_threshold.value_or(default_extinction_threshold(s.params));
}

EngineResult run_engine(const ScenarioFile& s, Engine engine) {
  EngineResult r;
  r.engine = engine;
  switch (engine) {
    case Engine::ClosedForm:
      r.trajectory = closed_form_trajectory(s.params, s.integrator);
      break;
    case Engine::Integrate:
      r.trajectory = integrate(s.params, s.integrator);
      break;
    case Engine::Stochastic:
      if (s.stochastic.runs >= 2) {
        EnsembleResult e = ensemble(s.params, s.stochastic);
        r.trajectory = std::move(e.mean);
        r.runs_used = e.runs_used;
        r.extinct_before_end = e.extinct_before_end;
      } else {
        r.trajectory = simulate(s.params, s.stochastic);
        r.runs_used = 1;
      }
      break;
  }
  if (auto violation = find_trajectory_violation(r.trajectory)) {
    throw Error(ErrorCode::Numerical,
                fmt::format("{} trajectory: {}", to_string(engine), *violation));
  }
  r.metrics = summarize(r.trajectory, threshold_for(s));
  for (double k : s.kappa) r.spread_times.emplace_back(k, trajectory_spread_time(r.trajectory, {k}));
  return r;
}

MonitoringResult run_monitoring(const ScenarioFile& s) {
  const MonitorsBlock& block = *s.monitors;
  const auto& params = s.params;
  MonitoringResult m;
  m.thumb_rule_fixed = thumb_rule_monitors(params.n_hosts, PatchRegime::FixedPatching);
  m.thumb_rule_p2p = thumb_rule_monitors(params.n_hosts, PatchRegime::P2PPatching);
  m.deadline_itu = block.deadline_itu.value_or(std::log(std::log(params.n())));
  if (params.defense != Defense::NoPatching) {
    m.note = "detection sizing assumes no patching; only thumb rules reported";
    return m;
  }
  try {
    m.plan = monitors_for_detection(params, m.deadline_itu);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Precondition) throw;
    m.note = e.what();
  }
  if (block.count) {
    m.requested_monitors = *block.count;
    m.requested_expected_scans = expected_scans(m.deadline_itu, params, *block.count);
  }
  const bool stochastic =
      std::find(s.engines.begin(), s.engines.end(), Engine::Stochastic) != s.engines.end();
  const std::optional<std::int64_t> monitors =
      block.count ? block.count
                  : (m.plan ? std::optional<std::int64_t>(m.plan->monitors) : std::nullopt);
  if (stochastic && monitors) {
    StochasticConfig cfg = s.stochastic;
    cfg.runs = block.detection_runs.value_or(s.stochastic.runs);
    cfg.t_end_itu = std::max(cfg.t_end_itu, m.deadline_itu);
    std::vector<double> first = detection_sim(params, *monitors, cfg);
    DetectionSummary d;
    d.monitors = *monitors;
    d.runs = cfg.runs;
    std::sort(first.begin(), first.end());
    const std::size_t n = first.size();
    d.median_itu = n % 2 == 1 ? first[n / 2] : 0.5 * (first[n / 2 - 1] + first[n / 2]);
    const auto detected = std::count_if(first.begin(), first.end(),
                                        [&](double t) { return t <= m.deadline_itu; });
    d.detected_by_deadline = static_cast<double>(detected) / static_cast<double>(n);
    m.detection = d;
  }
  return m;
}

}  // namespace

RunResult execute(const ScenarioFile& scenario) {
  validate(scenario.params);
  RunResult result;
  result.scenario = scenario;
  result.analytic = analytic_predictions(scenario.params, scenario.kappa);
  for (Engine e : scenario.engines) result.engines.push_back(run_engine(scenario, e));
  if (scenario.monitors) result.monitoring = run_monitoring(scenario);
  return result;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t_itu,t_wallclock,S,I,P\n";
  for (const auto& [t, st] : traj.samples) {
    out += fmt::format("{},{},{},{},{}\n", t, itu_to_wallclock(t, traj.params), st.s, st.i, st.p);
  }
  return out;
}

namespace {

json time_json(const TimeValue& t, const ScenarioParams& p) {
  return {{"itu", t.itu}, {"wallclock", t.wallclock}, {"unit", std::string(to_string(p.unit))}};
}

json time_json(const std::optional<TimeValue>& t, const ScenarioParams& p) {
  return t ? time_json(*t, p) : json(nullptr);
}

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

std::optional<double> relative_error(std::optional<double> numeric, std::optional<double> analytic) {
  if (!numeric || !analytic || *analytic == 0.0) return std::nullopt;
  return std::abs(*numeric - *analytic) / std::abs(*analytic);
}

std::optional<double> itu_of(const std::optional<TimeValue>& t) {
  return t ? std::optional<double>(t->itu) : std::nullopt;
}

std::string csv_name(Engine e) { return fmt::format("{}.csv", to_string(e)); }

}  // namespace

json report_json(const RunResult& r) {
  const auto& p = r.scenario.params;
  json analytic = {{"peak_time", time_json(r.analytic.peak_time, p)},
                   {"peak_infected", number_or_null(r.analytic.peak_infected)},
                   {"extinction_time", time_json(r.analytic.extinction_time, p)}};
  if (!r.analytic.peak_infected_note.empty()) analytic["peak_infected_note"] = r.analytic.peak_infected_note;
  json spreads = json::array();
  for (const auto& [k, t] : r.analytic.spread_times) {
    spreads.push_back({{"kappa", k}, {"time", time_json(t, p)}});
  }
  analytic["spread_time"] = spreads;

  json engines = json::object();
  for (const auto& e : r.engines) {
    const auto& m = e.metrics;
    json metrics = {{"peak_time", time_json(m.peak_time, p)},
                    {"peak_infected", m.peak_infected},
                    {"extinction_time", time_json(m.extinction_time, p)},
                    {"extinction_threshold", m.extinction_threshold}};
    json engine_spreads = json::array();
    json spread_errors = json::array();
    for (std::size_t k = 0; k < e.spread_times.size(); ++k) {
      const auto& [kappa, t] = e.spread_times[k];
      engine_spreads.push_back({{"kappa", kappa}, {"time", time_json(t, p)}});
      std::optional<double> predicted;
      if (k < r.analytic.spread_times.size()) predicted = r.analytic.spread_times[k].second.itu;
      spread_errors.push_back({{"kappa", kappa}, {"error", number_or_null(relative_error(itu_of(t), predicted))}});
    }
    metrics["spread_time"] = engine_spreads;
    json errors = {
        {"peak_time", number_or_null(relative_error(m.peak_time.itu, itu_of(r.analytic.peak_time)))},
        {"peak_infected", number_or_null(relative_error(m.peak_infected, r.analytic.peak_infected))},
        {"extinction_time", number_or_null(relative_error(itu_of(m.extinction_time),
                                                          itu_of(r.analytic.extinction_time)))},
        {"spread_time", spread_errors}};
    json entry = {{"csv", csv_name(e.engine)},
                  {"source", std::string(to_string(e.trajectory.source))},
                  {"samples", e.trajectory.samples.size()},
                  {"halted_at", e.trajectory.halted_at
                                    ? time_json(make_time(*e.trajectory.halted_at, p), p)
                                    : json(nullptr)},
                  {"metrics", metrics},
                  {"relative_error_vs_analytic", errors}};
    if (e.runs_used) entry["runs_used"] = *e.runs_used;
    if (e.extinct_before_end) entry["extinct_before_end"] = *e.extinct_before_end;
    engines[std::string(to_string(e.engine))] = entry;
  }

  json report = {
      {"scenario", r.scenario.name},
      {"params",
       {{"n_hosts", p.n_hosts},
        {"virulence", p.virulence},
        {"unit", std::string(to_string(p.unit))},
        {"gamma", p.gamma},
        {"p_bar", p.p_bar},
        {"i0", p.i0},
        {"defense", std::string(to_string(p.defense))}}},
      {"analytic", analytic},
      {"engines", engines},
      {"provenance",
       {{"version", WORMSIM_VERSION},
        {"seed", r.scenario.stochastic.seed},
        {"config", to_json(r.scenario)}}},
  };

  if (r.monitoring) {
    const auto& m = *r.monitoring;
    json mon = {{"thumb_rule", {{"fixed_patching", m.thumb_rule_fixed}, {"p2p_patching", m.thumb_rule_p2p}}},
                {"deadline", time_json(make_time(m.deadline_itu, p), p)}};
    if (m.plan) {
      mon["plan"] = {{"monitors", m.plan->monitors},
                     {"deadline_itu", m.plan->deadline_itu},
                     {"expected_scans_at_deadline", m.plan->expected_scans_at_deadline}};
    }
    if (m.requested_monitors) {
      mon["requested"] = {{"monitors", *m.requested_monitors},
                          {"expected_scans_at_deadline", *m.requested_expected_scans}};
    }
    if (m.detection) {
      const auto& d = *m.detection;
      mon["detection"] = {
          {"monitors", d.monitors},
          {"runs", d.runs},
          {"median", std::isfinite(d.median_itu) ? time_json(make_time(d.median_itu, p), p) : json(nullptr)},
          {"detected_by_deadline", d.detected_by_deadline}};
    }
    if (!m.note.empty()) mon["note"] = m.note;
    report["monitoring"] = mon;
  }
  return report;
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::Config, fmt::format("{}: cannot create output directory: {}",
                                               dir.string(), ec.message()));
  }
  auto write = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Config, fmt::format("{}: cannot write", path.string()));
    out << text;
  };
  for (const auto& e : result.engines) write(dir / csv_name(e.engine), trajectory_csv(e.trajectory));
  write(dir / "report.json", report_json(result).dump(2) + "\n");
}

ComparisonTable compare_results(const RunResult& r) {
  if (r.engines.size() < 2) {
    throw Error(ErrorCode::Config, "engines: compare needs at least two engines");
  }
  ComparisonTable table;
  table.tolerance = r.scenario.compare.tolerance;
  table.analytic_tolerance = r.scenario.compare.analytic_tolerance;
  for (std::size_t k = 0; k < r.engines.size(); ++k) {
    table.engines.emplace_back(to_string(r.engines[k].engine));
    if (r.engines[k].engine == Engine::Integrate) table.reference = k;
  }

  auto add_row = [&](std::string quantity, std::optional<double> analytic, std::string note,
                     auto value_of) {
    ComparisonRow row;
    row.quantity = std::move(quantity);
    row.analytic = analytic;
    row.analytic_note = analytic ? "" : std::move(note);
    for (const auto& e : r.engines) row.engine_values.push_back(value_of(e));
    const auto& ref = row.engine_values[table.reference];
    for (std::size_t k = 0; k < r.engines.size(); ++k) {
      const auto& v = row.engine_values[k];
      row.vs_analytic.push_back(relative_error(v, analytic));
      row.vs_reference.push_back(k == table.reference ? std::nullopt : relative_error(v, ref));
      if (k != table.reference) {
        if (v.has_value() != ref.has_value()) table.within_tolerance = false;
        if (row.vs_reference.back() && *row.vs_reference.back() > table.tolerance) {
          table.within_tolerance = false;
        }
      }
      if (table.analytic_tolerance && row.vs_analytic.back() &&
          *row.vs_analytic.back() > *table.analytic_tolerance) {
        table.within_tolerance = false;
      }
    }
    table.rows.push_back(std::move(row));
  };

  const auto& a = r.analytic;
  const bool patched = r.scenario.params.defense != Defense::NoPatching;
  if (patched) {
    add_row("peak_time_itu", itu_of(a.peak_time), "n/a",
            [](const EngineResult& e) { return std::optional<double>(e.metrics.peak_time.itu); });
  }
  add_row("peak_infected", a.peak_infected, a.peak_infected_note,
          [](const EngineResult& e) { return std::optional<double>(e.metrics.peak_infected); });
  if (patched) {
    add_row("extinction_time_itu", itu_of(a.extinction_time), "n/a",
            [](const EngineResult& e) { return itu_of(e.metrics.extinction_time); });
  }
  for (std::size_t k = 0; k < r.scenario.kappa.size(); ++k) {
    const double kappa = r.scenario.kappa[k];
    std::optional<double> predicted;
    if (k < a.spread_times.size()) predicted = a.spread_times[k].second.itu;
    add_row(fmt::format("spread_time_itu(kappa={})", kappa), predicted, "n/a (patched)",
            [k](const EngineResult& e) { return itu_of(e.spread_times[k].second); });
  }
  return table;
}

namespace {

std::string cell(const std::optional<double>& v, const char* missing = "never") {
  return v ? fmt::format("{:.6g}", *v) : std::string(missing);
}

std::string percent(const std::optional<double>& v, std::optional<double> limit) {
  if (!v) return "-";
  const bool over = limit && *v > *limit;
  return fmt::format("{:.2f}%{}", *v * 100.0, over ? " *" : "");
}

}  // namespace

std::string ComparisonTable::render() const {
  std::vector<std::string> header = {"quantity", "analytic"};
  for (const auto& e : engines) header.push_back(e);
  for (std::size_t k = 0; k < engines.size(); ++k) {
    header.push_back(fmt::format("{} vs analytic", engines[k]));
  }
  for (std::size_t k = 0; k < engines.size(); ++k) {
    if (k != reference) header.push_back(fmt::format("{} vs {}", engines[k], engines[reference]));
  }
  std::vector<std::vector<std::string>> lines = {header};
  for (const auto& row : rows) {
    std::vector<std::string> line = {row.quantity,
                                     row.analytic ? cell(row.analytic) : row.analytic_note};
    for (const auto& v : row.engine_values) line.push_back(cell(v));
    for (const auto& v : row.vs_analytic) line.push_back(percent(v, analytic_tolerance));
    for (std::size_t k = 0; k < row.vs_reference.size(); ++k) {
      if (k != reference) line.push_back(percent(row.vs_reference[k], tolerance));
    }
    lines.push_back(std::move(line));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : lines) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());
  }
  std::string out;
  for (const auto& line : lines) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      out += fmt::format("{:<{}}", line[c], widths[c] + 2);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  out += fmt::format("tolerance {:.2f}% vs {}", tolerance * 100.0, engines[reference]);
  if (analytic_tolerance) out += fmt::format(", {:.2f}% vs analytic", *analytic_tolerance * 100.0);
  out += within_tolerance ? "; result: within tolerance\n" : "; result: OUT OF TOLERANCE\n";
  return out;
}

}  // namespace wormsim
