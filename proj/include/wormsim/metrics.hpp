// Analytic predictors for spread, peak and extinction times, and their
// numeric counterparts extracted from trajectories.
#ifndef WORMSIM_METRICS_HPP
#define WORMSIM_METRICS_HPP

#include <optional>
#include <utility>

#include "wormsim/core.hpp"

namespace wormsim {

struct SpreadQuery {
  double kappa = 0.5;  // target infected fraction, in (0, 1)
};

struct SummaryMetrics {
  std::optional<TimeValue> spread_time_to_kappa;
  TimeValue peak_time;
  double peak_infected = 0.0;
  std::optional<TimeValue> extinction_time;  // empty when never extinct
  double extinction_threshold = 0.0;
};

/// Time until a fraction κ of hosts is infected without patching:
/// ln(κ/(1-κ)) + ln((N - I0)/I0).
TimeValue spread_time(const ScenarioParams& params, SpreadQuery q);

/// 2 ln(N / sqrt(γP̄ I0)).
TimeValue fixed_peak_time(const ScenarioParams& params);
/// (N - 2P̄)/(γP̄).
TimeValue fixed_extinction_time(const ScenarioParams& params);
/// (1/γ) ln(N/(γP̄)).
TimeValue p2p_peak_time(const ScenarioParams& params);
/// γ I0 N^{1/γ} / (P̄^{1/γ} (1+γ)^{1+1/γ}); throws GammaLeOne for γ <= 1.
double p2p_peak_infected(const ScenarioParams& params);
/// (1/γ)(1 + 1/γ) ln N.
TimeValue p2p_extinction_time(const ScenarioParams& params);

/// Default extinction threshold, max(P̄, 1) hosts.
double default_extinction_threshold(const ScenarioParams& params);

/// Sample with the largest I, refined by a parabola through it and its two
/// neighbours. A maximum on either end of the trajectory is returned as is.
std::pair<TimeValue, double> trajectory_peak(const Trajectory& traj);

/// First time after the peak at which I drops below `threshold`, linearly
/// interpolated. If I never reaches the threshold at all, that is the first
/// sample time. Throws NeverExtinct otherwise.
TimeValue trajectory_extinction(const Trajectory& traj, double threshold);

/// First time I reaches κN, linearly interpolated; nullopt if never.
std::optional<TimeValue> trajectory_spread_time(const Trajectory& traj, SpreadQuery q);

/// Numeric metrics for any trajectory.
SummaryMetrics summarize(const Trajectory& traj, double threshold,
                         std::optional<SpreadQuery> spread = std::nullopt);

/// Number of sign changes in the discrete derivative of I (zero steps ignored).
int derivative_sign_changes(const Trajectory& traj);

}  // namespace wormsim

#endif  // WORMSIM_METRICS_HPP
