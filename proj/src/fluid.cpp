#include "wormsim/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace wormsim {

Derivative rhs_no_patch(const PopulationState& state, const ScenarioParams& params) {
  const double infections = state.s * state.i / params.n();
  return {-infections, infections, 0.0};
}

Derivative rhs_fixed_servers(const PopulationState& state, const ScenarioParams& params) {
  const double unpatched = state.s + state.i;
  if (!(unpatched > 0.0)) {
    throw Error(ErrorCode::Precondition, "no unpatched hosts remain (s + i = 0)");
  }
  const double servers = static_cast<double>(params.p_bar);
  const double rate = params.gamma * std::min(servers, unpatched);
  const double infections = state.s * state.i / params.n();
  return {-infections - rate * state.s / unpatched, infections - rate * state.i / unpatched,
          rate};
}

Derivative rhs_p2p(const PopulationState& state, const ScenarioParams& params) {
  const double n = params.n();
  const double infections = state.s * state.i / n;
  const double per_patched = params.gamma * state.p / n;
  return {-infections - per_patched * state.s, infections - per_patched * state.i,
          per_patched * (state.s + state.i)};
}

Derivative rhs(const PopulationState& state, const ScenarioParams& params) {
  switch (params.defense) {
    case Defense::NoPatching: return rhs_no_patch(state, params);
    case Defense::FixedServers: return rhs_fixed_servers(state, params);
    case Defense::PeerToPeer: return rhs_p2p(state, params);
  }
  return {};
}

namespace {

// a·e^{rt} / (1 - (a/N)(1 - e^{rt})), rearranged so large rt cannot overflow.
double logistic(double seed, double rate_t, double n) {
  const double decay = std::exp(-rate_t);
  return seed / (decay * (1.0 - seed / n) + seed / n);
}

}  // namespace

double closed_form_no_patch(double t, const ScenarioParams& params) {
  return logistic(static_cast<double>(params.i0), t, params.n());
}

double fixed_validity_end(const ScenarioParams& params) {
  const double servers = static_cast<double>(params.p_bar);
  return (params.n() - 2.0 * servers) / (params.gamma * servers);
}

double fixed_patched(double t, const ScenarioParams& params) {
  const double servers = static_cast<double>(params.p_bar);
  return servers + params.gamma * servers * t;
}

double closed_form_fixed(double t, const ScenarioParams& params) {
  const double end = fixed_validity_end(params);
  if (t < 0.0 || t > end * (1.0 + 1e-12)) {
    throw Error(ErrorCode::OutsideValidity,
                fmt::format("t = {} outside fixed-server closed-form window [0, {}]", t, end));
  }
  const double n = params.n();
  const double servers = static_cast<double>(params.p_bar);
  const double rate = params.gamma * servers;
  const double c = (n - servers) / static_cast<double>(params.i0);
  const double x = t - servers * t / n - rate * t * t / (2.0 * n);
  const double value = (n - servers - rate * t) / (1.0 + c * std::exp(-x));
  return std::max(value, 0.0);
}

double closed_form_p2p_patch(double t, const ScenarioParams& params) {
  return logistic(static_cast<double>(params.p_bar), params.gamma * t, params.n());
}

double closed_form_p2p(double t, const ScenarioParams& params) {
  const double n = params.n();
  const double g = params.gamma;
  const double frac = static_cast<double>(params.p_bar) / n;
  const double c = 1.0 / static_cast<double>(params.i0);
  const double a = frac + (1.0 - frac) * std::exp(-g * t);
  // Exponents are combined in log space; e^{γt} alone overflows long before
  // the products do.
  const double patch_term = std::exp(std::log(frac) + g * t - std::log(n) - std::log(1.0 - frac));
  const double decay_term = c * std::exp(g * t + (1.0 / g + 1.0) * std::log(a));
  const double v = patch_term + 1.0 / n + decay_term;
  if (!std::isfinite(v)) return 0.0;
  return std::max(1.0 / v, 0.0);
}

PopulationState closed_form_state(double t, const ScenarioParams& params) {
  const double n = params.n();
  double i = 0.0;
  double p = 0.0;
  switch (params.defense) {
    case Defense::NoPatching:
      i = closed_form_no_patch(t, params);
      break;
    case Defense::FixedServers:
      i = closed_form_fixed(t, params);
      p = fixed_patched(t, params);
      break;
    case Defense::PeerToPeer:
      i = closed_form_p2p(t, params);
      p = closed_form_p2p_patch(t, params);
      break;
  }
  // Rounding can leave S a few ulps below zero at saturation.
  return {std::max(n - i - p, 0.0), i, p};
}

double closed_form_horizon(const ScenarioParams& params) {
  if (params.defense == Defense::FixedServers) return fixed_validity_end(params);
  return std::numeric_limits<double>::infinity();
}

}  // namespace wormsim
