#include "wormsim/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <optional>
#include <thread>

#include "wormsim/rng.hpp"

namespace wormsim {

namespace {

void check_config(const StochasticConfig& config) {
  if (config.runs < 1) throw Error(ErrorCode::Precondition, "runs must be >= 1");
  if (!(config.sample_dt_itu > 0.0)) {
    throw Error(ErrorCode::Precondition, "sample_dt_itu must be positive");
  }
  if (!(config.t_end_itu >= 0.0)) throw Error(ErrorCode::Precondition, "t_end_itu must be >= 0");
}

struct Counts {
  std::int64_t s, i, p;
};

Counts to_counts(const PopulationState& x) {
  auto as_count = [](double v, const char* name) {
    if (v < 0.0 || v != std::floor(v)) {
      throw Error(ErrorCode::Precondition,
                  fmt::format("stochastic start needs a nonnegative integer {}", name));
    }
    return static_cast<std::int64_t>(v);
  };
  return {as_count(x.s, "s"), as_count(x.i, "i"), as_count(x.p, "p")};
}

struct ChainOptions {
  std::int64_t monitors = 0;
  bool stop_at_first_hit = false;
  bool record_hits = false;
};

struct ChainResult {
  Trajectory traj;
  bool infection_died = false;
  double first_hit = std::numeric_limits<double>::infinity();
  std::vector<double> hits_on_grid;
};

ChainResult run_chain(const ScenarioParams& params, Counts x, const StochasticConfig& config,
                      std::uint64_t seed, const std::vector<double>& grid,
                      const ChainOptions& opts) {
  CounterRng rng(seed);
  const double n = params.n();
  const double servers = static_cast<double>(params.p_bar);
  const double hit_prob = static_cast<double>(opts.monitors) / n;

  ChainResult out;
  out.traj.params = params;
  out.traj.source = TrajectorySource::StochasticRun;
  out.traj.samples.reserve(grid.size());
  if (opts.record_hits) out.hits_on_grid.reserve(grid.size());

  std::int64_t hits = 0;
  std::size_t g = 0;
  double t = 0.0;
  bool absorbed = false;
  auto record_until = [&](double until) {
    while (g < grid.size() && grid[g] < until) {
      const PopulationState st{static_cast<double>(x.s), static_cast<double>(x.i),
                               static_cast<double>(x.p)};
      out.traj.samples.push_back({grid[g], st});
      if (opts.record_hits) out.hits_on_grid.push_back(static_cast<double>(hits));
      ++g;
    }
  };

  while (true) {
    const double s = static_cast<double>(x.s);
    const double i = static_cast<double>(x.i);
    const double p = static_cast<double>(x.p);
    const double infect = s * i / n;
    double patch = 0.0;
    if (params.defense == Defense::FixedServers) {
      patch = params.gamma * std::min(servers, s + i);
    } else if (params.defense == Defense::PeerToPeer) {
      patch = params.gamma / n * (s + i) * p;
    }
    const double scan = i * hit_prob;
    const double total = infect + patch + scan;
    if (!(total > 0.0)) {
      absorbed = true;
      break;
    }
    const double t_next = t + rng.exponential(total);
    record_until(t_next);
    if (t_next > config.t_end_itu) break;
    t = t_next;

    const double u = rng.uniform() * total;
    if (u < infect) {
      --x.s;
      ++x.i;
    } else if (u < infect + patch) {
      if (rng.uniform() * (s + i) < i) {
        --x.i;
      } else {
        --x.s;
      }
      ++x.p;
      if (x.i == 0) out.infection_died = true;
    } else {
      ++hits;
      if (hits == 1) out.first_hit = t;
      if (opts.stop_at_first_hit) break;
    }
  }
  if (x.i == 0) out.infection_died = true;
  if (absorbed && t < config.t_end_itu) out.traj.halted_at = t;
  record_until(std::numeric_limits<double>::infinity());
  return out;
}

// Runs fn(r) for r in [0, count) across hardware threads; results are written
// by index so completion order is irrelevant.
template <typename Fn>
void parallel_runs(int count, Fn fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(count));
  if (workers <= 1) {
    for (int r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < count; r = next++) fn(r);
    });
  }
}

EnsembleResult aggregate(const ScenarioParams& params, const std::vector<ChainResult>& runs) {
  EnsembleResult result;
  result.runs_used = static_cast<int>(runs.size());
  result.mean.params = params;
  result.mean.source = TrajectorySource::EnsembleMean;
  const std::size_t len = runs.front().traj.samples.size();
  const double count = static_cast<double>(runs.size());
  result.mean.samples.resize(len);
  result.stddev.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    PopulationState sum, sq;
    for (const auto& run : runs) {
      const auto& st = run.traj.samples[k].state;
      sum.s += st.s;
      sum.i += st.i;
      sum.p += st.p;
    }
    const PopulationState mean{sum.s / count, sum.i / count, sum.p / count};
    for (const auto& run : runs) {
      const auto& st = run.traj.samples[k].state;
      sq.s += (st.s - mean.s) * (st.s - mean.s);
      sq.i += (st.i - mean.i) * (st.i - mean.i);
      sq.p += (st.p - mean.p) * (st.p - mean.p);
    }
    const double dof = count > 1 ? count - 1 : 1;
    result.mean.samples[k] = {runs.front().traj.samples[k].t_itu, mean};
    result.stddev[k] = {std::sqrt(sq.s / dof), std::sqrt(sq.i / dof), std::sqrt(sq.p / dof)};
  }
  for (const auto& run : runs) result.extinct_before_end += run.infection_died ? 1 : 0;
  return result;
}

}  // namespace

std::vector<double> sample_grid(const StochasticConfig& config) {
  check_config(config);
  const auto last = static_cast<std::size_t>(std::floor(config.t_end_itu / config.sample_dt_itu + 1e-9));
  std::vector<double> grid(last + 1);
  for (std::size_t k = 0; k <= last; ++k) grid[k] = static_cast<double>(k) * config.sample_dt_itu;
  return grid;
}

Trajectory simulate(const ScenarioParams& params, const StochasticConfig& config) {
  validate(params);
  return simulate_from(params, initial_state(params), config);
}

Trajectory simulate_from(const ScenarioParams& params, const PopulationState& start,
                         const StochasticConfig& config) {
  const auto grid = sample_grid(config);
  return run_chain(params, to_counts(start), config, config.seed, grid, {}).traj;
}

EnsembleResult ensemble(const ScenarioParams& params, const StochasticConfig& config) {
  validate(params);
  return ensemble_from(params, initial_state(params), config);
}

EnsembleResult ensemble_from(const ScenarioParams& params, const PopulationState& start,
                             const StochasticConfig& config) {
  if (config.runs < 2) throw Error(ErrorCode::Precondition, "ensemble needs runs >= 2");
  const auto grid = sample_grid(config);
  const Counts counts = to_counts(start);
  std::vector<ChainResult> runs(static_cast<std::size_t>(config.runs));
  parallel_runs(config.runs, [&](int r) {
    runs[static_cast<std::size_t>(r)] =
        run_chain(params, counts, config, config.seed + static_cast<std::uint64_t>(r), grid, {});
  });
  return aggregate(params, runs);
}

namespace {

void check_detection(const ScenarioParams& params, std::int64_t monitors) {
  validate(params);
  if (params.defense != Defense::NoPatching) {
    throw Error(ErrorCode::Precondition, "detection is simulated on NoPatching scenarios");
  }
  if (monitors < 1 || monitors > params.n_hosts) {
    throw Error(ErrorCode::Precondition,
                fmt::format("monitors must lie in [1, N], got {}", monitors));
  }
}

}  // namespace

std::vector<double> detection_sim(const ScenarioParams& params, std::int64_t monitors,
                                  const StochasticConfig& config) {
  check_detection(params, monitors);
  check_config(config);
  const Counts counts = to_counts(initial_state(params));
  const std::vector<double> no_grid;
  std::vector<double> first(static_cast<std::size_t>(config.runs));
  parallel_runs(config.runs, [&](int r) {
    ChainOptions opts{monitors, true, false};
    first[static_cast<std::size_t>(r)] =
        run_chain(params, counts, config, config.seed + static_cast<std::uint64_t>(r), no_grid,
                  opts)
            .first_hit;
  });
  return first;
}

std::vector<double> mean_monitor_scans(const ScenarioParams& params, std::int64_t monitors,
                                       const StochasticConfig& config) {
  check_detection(params, monitors);
  const auto grid = sample_grid(config);
  const Counts counts = to_counts(initial_state(params));
  std::vector<std::vector<double>> hits(static_cast<std::size_t>(config.runs));
  parallel_runs(config.runs, [&](int r) {
    ChainOptions opts{monitors, false, true};
    hits[static_cast<std::size_t>(r)] =
        run_chain(params, counts, config, config.seed + static_cast<std::uint64_t>(r), grid, opts)
            .hits_on_grid;
  });
  std::vector<double> mean(grid.size(), 0.0);
  for (const auto& run : hits) {
    for (std::size_t k = 0; k < grid.size(); ++k) mean[k] += run[k];
  }
  for (double& v : mean) v /= static_cast<double>(config.runs);
  return mean;
}

}  // namespace wormsim
