// Sizing of passively monitored address sets (network telescopes).
//
// Scans reach M monitored hosts at rate M·I(t)/N, so along the logistic
// no-patching solution the expected number received by time t is
//   M · ln(1 - (I0/N)(1 - e^t)).
// Detection is declared when that expectation reaches one scan.
#ifndef WORMSIM_MONITORING_HPP
#define WORMSIM_MONITORING_HPP

#include <cstdint>

#include "wormsim/core.hpp"

namespace wormsim {

struct MonitorPlan {
  std::int64_t monitors = 0;
  double deadline_itu = 0.0;
  double expected_scans_at_deadline = 0.0;
};

enum class PatchRegime { FixedPatching, P2PPatching };

double expected_scans(double t, const ScenarioParams& params, std::int64_t monitors);

/// Smallest M whose expected scan count at the deadline is at least one,
/// i.e. ceil(1 / ln(1 - (I0/N)(1 - e^deadline))). Throws Precondition when
/// that exceeds N.
MonitorPlan monitors_for_detection(const ScenarioParams& params, double deadline_itu);

/// ceil(N / ln N) for fixed patching, ceil(N / ln ln N) for peer-to-peer.
std::int64_t thumb_rule_monitors(std::int64_t n_hosts, PatchRegime regime);

}  // namespace wormsim

#endif  // WORMSIM_MONITORING_HPP
