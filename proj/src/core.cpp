#include "wormsim/core.hpp"

#include <cmath>
#include <fmt/format.h>

namespace wormsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid_parameter";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::OutsideValidity: return "outside_validity";
    case ErrorCode::GammaLeOne: return "gamma_le_one";
    case ErrorCode::NeverExtinct: return "never_extinct";
    case ErrorCode::Numerical: return "numerical";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

std::string_view to_string(Defense defense) {
  switch (defense) {
    case Defense::NoPatching: return "no_patching";
    case Defense::FixedServers: return "fixed_servers";
    case Defense::PeerToPeer: return "peer_to_peer";
  }
  return "unknown";
}

std::optional<Defense> parse_defense(std::string_view text) {
  if (text == "no_patching") return Defense::NoPatching;
  if (text == "fixed_servers") return Defense::FixedServers;
  if (text == "peer_to_peer") return Defense::PeerToPeer;
  return std::nullopt;
}

std::string_view to_string(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::Second: return "second";
    case TimeUnit::Minute: return "minute";
    case TimeUnit::Hour: return "hour";
    case TimeUnit::Day: return "day";
  }
  return "unknown";
}

std::optional<TimeUnit> parse_time_unit(std::string_view text) {
  if (text == "second") return TimeUnit::Second;
  if (text == "minute") return TimeUnit::Minute;
  if (text == "hour") return TimeUnit::Hour;
  if (text == "day") return TimeUnit::Day;
  return std::nullopt;
}

const ScenarioParams& validate(const ScenarioParams& params) {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidParameter, what); };
  if (params.n_hosts <= 0) fail("n_hosts must be positive");
  if (!(params.virulence > 0.0) || !std::isfinite(params.virulence)) {
    fail("virulence must be positive");
  }
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma)) fail("gamma must be positive");
  if (params.i0 < 1) fail("i0 must be at least 1");
  if (params.defense != Defense::NoPatching && params.p_bar < 1) {
    fail("p_bar must be at least 1");
  }
  if (params.p_bar < 0) fail("p_bar must be nonnegative");
  if (params.i0 + params.p_bar >= params.n_hosts) fail("i0 + p_bar >= n_hosts");
  return params;
}

PopulationState initial_state(const ScenarioParams& params) {
  const double i0 = static_cast<double>(params.i0);
  const double p0 =
      params.defense == Defense::NoPatching ? 0.0 : static_cast<double>(params.p_bar);
  return {params.n() - i0 - p0, i0, p0};
}

double itu_to_wallclock(double t_itu, const ScenarioParams& params) {
  return t_itu / params.virulence;
}

TimeValue make_time(double t_itu, const ScenarioParams& params) {
  return {t_itu, itu_to_wallclock(t_itu, params)};
}

std::string_view to_string(TrajectorySource source) {
  switch (source) {
    case TrajectorySource::ClosedForm: return "closed_form";
    case TrajectorySource::Integrated: return "integrated";
    case TrajectorySource::StochasticRun: return "stochastic_run";
    case TrajectorySource::EnsembleMean: return "ensemble_mean";
  }
  return "unknown";
}

double conservation_tolerance(TrajectorySource source, double n_hosts) {
  // Stochastic runs carry integer counts held exactly in doubles.
  if (source == TrajectorySource::StochasticRun) return 0.0;
  return 1e-9 * n_hosts;
}

std::optional<std::string> find_trajectory_violation(const Trajectory& traj) {
  const double n = traj.params.n();
  const double tol = conservation_tolerance(traj.source, n);
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& [t, st] = traj.samples[k];
    if (k > 0 && !(t > traj.samples[k - 1].t_itu)) {
      return fmt::format("time not strictly increasing at sample {} (t={})", k, t);
    }
    if (st.s < 0.0 || st.i < 0.0 || st.p < 0.0) {
      return fmt::format("negative component at sample {} (t={})", k, t);
    }
    const double gap = std::abs(st.total() - n);
    if (gap > tol) {
      return fmt::format("conservation violated at sample {} (t={}): |S+I+P-N| = {}", k, t,
                         gap);
    }
  }
  return std::nullopt;
}

}  // namespace wormsim
