// Exact continuous-time Markov chain simulation of the three scenarios.
//
// Events compete as exponential clocks with rates in ITU:
//   infection         S·I/N               S -> I
//   fixed-server patch γ·min(P̄, S+I)      uniform unpatched host -> P
//   peer-to-peer patch (γ/N)(S+I)·P       uniform unpatched host -> P
// Run r of an ensemble is driven by seed + r.
#ifndef WORMSIM_STOCHASTIC_HPP
#define WORMSIM_STOCHASTIC_HPP

#include <cstdint>
#include <vector>

#include "wormsim/core.hpp"

namespace wormsim {

struct StochasticConfig {
  std::uint64_t seed = 1;
  double t_end_itu = 50.0;
  double sample_dt_itu = 0.1;
  int runs = 1;
};

struct EnsembleResult {
  Trajectory mean;                       // source = EnsembleMean
  std::vector<PopulationState> stddev;   // per grid sample, sample stddev
  int runs_used = 0;
  int extinct_before_end = 0;            // runs in which I reached 0
};

/// Sample grid 0, dt, 2dt, ... up to t_end.
std::vector<double> sample_grid(const StochasticConfig& config);

/// One run seeded with config.seed, starting from initial_state(params).
Trajectory simulate(const ScenarioParams& params, const StochasticConfig& config);

/// One run from an explicit integer-valued state (used for degenerate
/// starts such as I = 0 that validate() rejects).
Trajectory simulate_from(const ScenarioParams& params, const PopulationState& start,
                         const StochasticConfig& config);

EnsembleResult ensemble(const ScenarioParams& params, const StochasticConfig& config);
EnsembleResult ensemble_from(const ScenarioParams& params, const PopulationState& start,
                             const StochasticConfig& config);

/// First time a monitored host receives a scan, per run (+inf when none by
/// t_end). Each infected host scans at rate 1 per ITU and a scan lands in the
/// monitored set with probability monitors/N. NoPatching scenarios only.
std::vector<double> detection_sim(const ScenarioParams& params, std::int64_t monitors,
                                  const StochasticConfig& config);

/// Ensemble mean of cumulative scans received by the monitored set, on the
/// sample grid.
std::vector<double> mean_monitor_scans(const ScenarioParams& params, std::int64_t monitors,
                                       const StochasticConfig& config);

}  // namespace wormsim

#endif  // WORMSIM_STOCHASTIC_HPP
