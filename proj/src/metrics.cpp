#include "wormsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace wormsim {

namespace {

void require(const ScenarioParams& params, Defense defense, const char* what) {
  if (params.defense != defense) {
    throw Error(ErrorCode::Precondition,
                fmt::format("{} requires a {} scenario", what, to_string(defense)));
  }
}

double servers(const ScenarioParams& params) { return static_cast<double>(params.p_bar); }
double seeds(const ScenarioParams& params) { return static_cast<double>(params.i0); }

}  // namespace

TimeValue spread_time(const ScenarioParams& params, SpreadQuery q) {
  require(params, Defense::NoPatching, "spread_time");
  if (!(q.kappa > 0.0 && q.kappa < 1.0)) {
    throw Error(ErrorCode::Precondition, "kappa must lie in (0, 1)");
  }
  const double n = params.n();
  const double t =
      std::log(q.kappa / (1.0 - q.kappa)) + std::log((n - seeds(params)) / seeds(params));
  return make_time(t, params);
}

TimeValue fixed_peak_time(const ScenarioParams& params) {
  require(params, Defense::FixedServers, "fixed_peak_time");
  const double rate = params.gamma * servers(params);
  return make_time(2.0 * std::log(params.n() / std::sqrt(rate * seeds(params))), params);
}

TimeValue fixed_extinction_time(const ScenarioParams& params) {
  require(params, Defense::FixedServers, "fixed_extinction_time");
  const double rate = params.gamma * servers(params);
  return make_time((params.n() - 2.0 * servers(params)) / rate, params);
}

TimeValue p2p_peak_time(const ScenarioParams& params) {
  require(params, Defense::PeerToPeer, "p2p_peak_time");
  const double g = params.gamma;
  return make_time(std::log(params.n() / (g * servers(params))) / g, params);
}

double p2p_peak_infected(const ScenarioParams& params) {
  require(params, Defense::PeerToPeer, "p2p_peak_infected");
  const double g = params.gamma;
  if (g <= 1.0) {
    throw Error(ErrorCode::GammaLeOne,
                "gamma_le_one: analytic peak formula invalid; use numeric extraction");
  }
  return g * seeds(params) * std::pow(params.n() / servers(params), 1.0 / g) /
         std::pow(1.0 + g, 1.0 + 1.0 / g);
}

TimeValue p2p_extinction_time(const ScenarioParams& params) {
  require(params, Defense::PeerToPeer, "p2p_extinction_time");
  const double g = params.gamma;
  return make_time((1.0 / g) * (1.0 + 1.0 / g) * std::log(params.n()), params);
}

double default_extinction_threshold(const ScenarioParams& params) {
  return std::max(servers(params), 1.0);
}

namespace {

std::size_t argmax_infected(const Trajectory& traj) {
  const auto& s = traj.samples;
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].state.i > s[best].state.i) best = k;
  }
  return best;
}

}  // namespace

std::pair<TimeValue, double> trajectory_peak(const Trajectory& traj) {
  if (traj.empty()) throw Error(ErrorCode::Precondition, "empty trajectory");
  const auto& s = traj.samples;
  const std::size_t k = argmax_infected(traj);
  if (k == 0 || k + 1 == s.size()) {
    return {make_time(s[k].t_itu, traj.params), s[k].state.i};
  }
  // Vertex of the parabola through three (possibly unevenly spaced) points.
  const double t0 = s[k - 1].t_itu, t1 = s[k].t_itu, t2 = s[k + 1].t_itu;
  const double y0 = s[k - 1].state.i, y1 = s[k].state.i, y2 = s[k + 1].state.i;
  const double d01 = (y1 - y0) / (t1 - t0);
  const double d12 = (y2 - y1) / (t2 - t1);
  const double curvature = (d12 - d01) / (t2 - t0);
  if (!(curvature < 0.0)) return {make_time(t1, traj.params), y1};
  // y(t) = y1 + b (t - t1) + curvature (t - t1)^2 around the middle point.
  const double b = d01 + curvature * (t1 - t0);
  const double dt = std::clamp(-b / (2.0 * curvature), t0 - t1, t2 - t1);
  const double peak = y1 + b * dt + curvature * dt * dt;
  return {make_time(t1 + dt, traj.params), std::max(peak, y1)};
}

TimeValue trajectory_extinction(const Trajectory& traj, double threshold) {
  if (traj.empty()) throw Error(ErrorCode::Precondition, "empty trajectory");
  const auto& s = traj.samples;
  const std::size_t peak = argmax_infected(traj);
  if (s[peak].state.i < threshold) return make_time(s.front().t_itu, traj.params);
  for (std::size_t k = peak + 1; k < s.size(); ++k) {
    if (s[k].state.i < threshold) {
      const double ya = s[k - 1].state.i, yb = s[k].state.i;
      const double ta = s[k - 1].t_itu, tb = s[k].t_itu;
      const double t = ta + (ya - threshold) / (ya - yb) * (tb - ta);
      return make_time(t, traj.params);
    }
  }
  throw Error(ErrorCode::NeverExtinct,
              fmt::format("never_extinct: I stays >= {} after its peak", threshold));
}

std::optional<TimeValue> trajectory_spread_time(const Trajectory& traj, SpreadQuery q) {
  const double target = q.kappa * traj.params.n();
  const auto& s = traj.samples;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].state.i >= target) {
      if (k == 0) return make_time(s[0].t_itu, traj.params);
      const double ya = s[k - 1].state.i, yb = s[k].state.i;
      const double ta = s[k - 1].t_itu, tb = s[k].t_itu;
      return make_time(ta + (target - ya) / (yb - ya) * (tb - ta), traj.params);
    }
  }
  return std::nullopt;
}

SummaryMetrics summarize(const Trajectory& traj, double threshold,
                         std::optional<SpreadQuery> spread) {
  SummaryMetrics m;
  std::tie(m.peak_time, m.peak_infected) = trajectory_peak(traj);
  m.extinction_threshold = threshold;
  try {
    m.extinction_time = trajectory_extinction(traj, threshold);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NeverExtinct) throw;
  }
  if (spread) m.spread_time_to_kappa = trajectory_spread_time(traj, *spread);
  return m;
}

int derivative_sign_changes(const Trajectory& traj) {
  int changes = 0;
  int last = 0;
  const auto& s = traj.samples;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double d = s[k].state.i - s[k - 1].state.i;
    const int sign = (d > 0.0) - (d < 0.0);
    if (sign == 0) continue;
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

}  // namespace wormsim
