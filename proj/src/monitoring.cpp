#include "wormsim/monitoring.hpp"

#include <cmath>
#include <fmt/format.h>

namespace wormsim {

namespace {

void require_no_patching(const ScenarioParams& params) {
  if (params.defense != Defense::NoPatching) {
    throw Error(ErrorCode::Precondition, "monitor sizing assumes a NoPatching scenario");
  }
}

// ln(1 - (I0/N)(1 - e^t)) = ln(1 + (I0/N) expm1(t)).
double scans_per_monitor(double t, const ScenarioParams& params) {
  const double seed_frac = static_cast<double>(params.i0) / params.n();
  return std::log1p(seed_frac * std::expm1(t));
}

}  // namespace

double expected_scans(double t, const ScenarioParams& params, std::int64_t monitors) {
  require_no_patching(params);
  if (t < 0.0) throw Error(ErrorCode::Precondition, "t must be nonnegative");
  return static_cast<double>(monitors) * scans_per_monitor(t, params);
}

MonitorPlan monitors_for_detection(const ScenarioParams& params, double deadline_itu) {
  require_no_patching(params);
  if (!(deadline_itu > 0.0)) throw Error(ErrorCode::Precondition, "deadline must be positive");
  const double per_monitor = scans_per_monitor(deadline_itu, params);
  const double needed = std::ceil(1.0 / per_monitor);
  if (!(needed <= params.n())) {
    throw Error(ErrorCode::Precondition,
                fmt::format("deadline {} ITU too early: needs {} monitors but N = {}",
                            deadline_itu, needed, params.n_hosts));
  }
  MonitorPlan plan;
  plan.monitors = static_cast<std::int64_t>(needed);
  plan.deadline_itu = deadline_itu;
  plan.expected_scans_at_deadline = static_cast<double>(plan.monitors) * per_monitor;
  return plan;
}

std::int64_t thumb_rule_monitors(std::int64_t n_hosts, PatchRegime regime) {
  if (n_hosts < 3) throw Error(ErrorCode::Precondition, "thumb rule needs n_hosts >= 3");
  const double n = static_cast<double>(n_hosts);
  const double divisor =
      regime == PatchRegime::FixedPatching ? std::log(n) : std::log(std::log(n));
  return static_cast<std::int64_t>(std::ceil(n / divisor));
}

}  // namespace wormsim
