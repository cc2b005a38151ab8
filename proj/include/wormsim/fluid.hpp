// Fluid (mean-field) models of worm spread with and without patching.
//
// Right-hand sides are in hosts per ITU. The closed forms use the integration
// constants C = (N - P̄)/I(0) (fixed servers) and C = 1/I(0) (peer-to-peer),
// which reproduce I(0) only up to an O(I(0)^2/N) offset.
#ifndef WORMSIM_FLUID_HPP
#define WORMSIM_FLUID_HPP

#include "wormsim/core.hpp"

namespace wormsim {

struct Derivative {
  double ds_dt = 0.0;
  double di_dt = 0.0;
  double dp_dt = 0.0;
};

Derivative rhs_no_patch(const PopulationState& state, const ScenarioParams& params);

/// Servers hand out γP̄ patches per ITU, split between susceptible and
/// infected hosts in proportion to their counts. Once fewer than P̄ unpatched
/// hosts remain, the rate drops to γ(S+I). Throws Precondition if S+I = 0.
Derivative rhs_fixed_servers(const PopulationState& state, const ScenarioParams& params);

Derivative rhs_p2p(const PopulationState& state, const ScenarioParams& params);

/// Dispatches on params.defense.
Derivative rhs(const PopulationState& state, const ScenarioParams& params);

/// Logistic solution of dI/dt = S·I/N.
double closed_form_no_patch(double t, const ScenarioParams& params);

/// Last time at which the fixed-server closed form holds: (N - 2P̄)/(γP̄).
double fixed_validity_end(const ScenarioParams& params);

/// Patched hosts under fixed servers before the finishing phase: P̄ + γP̄t.
double fixed_patched(double t, const ScenarioParams& params);

/// Infected hosts under fixed servers. Throws OutsideValidity past
/// fixed_validity_end.
double closed_form_fixed(double t, const ScenarioParams& params);

/// Patched hosts under peer-to-peer dissemination (logistic in γt).
double closed_form_p2p_patch(double t, const ScenarioParams& params);

/// Infected hosts under peer-to-peer dissemination, as 1/V(t).
double closed_form_p2p(double t, const ScenarioParams& params);

/// Full (S, I, P) from the closed forms with S = N - I - P.
PopulationState closed_form_state(double t, const ScenarioParams& params);

/// Latest time the closed form of this scenario is defined at (+inf when
/// unbounded).
double closed_form_horizon(const ScenarioParams& params);

}  // namespace wormsim

#endif  // WORMSIM_FLUID_HPP
