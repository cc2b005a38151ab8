#ifndef WORMSIM_INTEGRATOR_HPP
#define WORMSIM_INTEGRATOR_HPP

#include "wormsim/core.hpp"

namespace wormsim {

enum class IntegratorMethod { RK4Fixed };

struct IntegratorConfig {
  double dt_itu = 0.001;
  double t_end_itu = 50.0;
  int sample_stride = 1;  // emit every k-th step
  IntegratorMethod method = IntegratorMethod::RK4Fixed;
};

/// Classical fourth-order Runge-Kutta on the fluid system selected by
/// params.defense, starting from initial_state(params).
///
/// The run halts early once I < 0.5 and dI/dt < 0; `halted_at` records the
/// stop time. The last state is always emitted even when it does not fall on
/// the stride. Throws Error(Numerical) if the state stops being finite.
Trajectory integrate(const ScenarioParams& params, const IntegratorConfig& config);

/// Same, from an arbitrary starting state.
Trajectory integrate_from(const ScenarioParams& params, const PopulationState& start,
                          const IntegratorConfig& config);

}  // namespace wormsim

#endif  // WORMSIM_INTEGRATOR_HPP
