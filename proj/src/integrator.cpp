#include "wormsim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "wormsim/fluid.hpp"

namespace wormsim {

namespace {

PopulationState axpy(const PopulationState& x, double h, const Derivative& d) {
  return {x.s + h * d.ds_dt, x.i + h * d.di_dt, x.p + h * d.dp_dt};
}

// Zeroes negative components and takes the deficit out of the largest one.
void clamp_preserving_sum(PopulationState& x) {
  double deficit = 0.0;
  for (double* c : {&x.s, &x.i, &x.p}) {
    if (*c < 0.0) {
      deficit += -*c;
      *c = 0.0;
    }
  }
  if (deficit == 0.0) return;
  double* dominant = &x.s;
  if (x.i > *dominant) dominant = &x.i;
  if (x.p > *dominant) dominant = &x.p;
  *dominant -= deficit;
}

bool finite(const PopulationState& x) {
  return std::isfinite(x.s) && std::isfinite(x.i) && std::isfinite(x.p);
}

bool extinct(const PopulationState& x, const ScenarioParams& params) {
  if (params.defense == Defense::NoPatching) return false;
  if (x.s + x.i <= 0.0) return true;
  return x.i < 0.5 && rhs(x, params).di_dt < 0.0;
}

}  // namespace

Trajectory integrate(const ScenarioParams& params, const IntegratorConfig& config) {
  validate(params);
  return integrate_from(params, initial_state(params), config);
}

Trajectory integrate_from(const ScenarioParams& params, const PopulationState& start,
                          const IntegratorConfig& config) {
  if (!(config.dt_itu > 0.0) || !(config.t_end_itu > 0.0) || config.sample_stride < 1) {
    throw Error(ErrorCode::Precondition, "integrator needs dt > 0, t_end > 0, stride >= 1");
  }
  Trajectory traj;
  traj.params = params;
  traj.source = TrajectorySource::Integrated;

  const double h = config.dt_itu;
  const auto steps = static_cast<long long>(std::ceil(config.t_end_itu / h - 1e-9));
  PopulationState x = start;
  traj.samples.push_back({0.0, x});

  double t_prev = 0.0;
  for (long long k = 1; k <= steps; ++k) {
    if (extinct(x, params)) {
      traj.halted_at = traj.samples.back().t_itu;
      break;
    }
    // The last step is shortened to land on t_end.
    const double t = std::min(static_cast<double>(k) * h, config.t_end_itu);
    const double step = t - t_prev;
    t_prev = t;
    const Derivative k1 = rhs(x, params);
    const Derivative k2 = rhs(axpy(x, step / 2, k1), params);
    const Derivative k3 = rhs(axpy(x, step / 2, k2), params);
    const Derivative k4 = rhs(axpy(x, step, k3), params);
    x.s += step / 6 * (k1.ds_dt + 2 * k2.ds_dt + 2 * k3.ds_dt + k4.ds_dt);
    x.i += step / 6 * (k1.di_dt + 2 * k2.di_dt + 2 * k3.di_dt + k4.di_dt);
    x.p += step / 6 * (k1.dp_dt + 2 * k2.dp_dt + 2 * k3.dp_dt + k4.dp_dt);
    if (!finite(x)) {
      throw Error(ErrorCode::Numerical,
                  fmt::format("integration diverged at t = {} ITU (dt = {})", t, h));
    }
    clamp_preserving_sum(x);
    if (k % config.sample_stride == 0 || k == steps) {
      traj.samples.push_back({t, x});
    } else if (extinct(x, params)) {
      traj.samples.push_back({t, x});
      traj.halted_at = t;
      break;
    }
  }
  return traj;
}

}  // namespace wormsim
