#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "wormsim/monitoring.hpp"
#include "wormsim/stochastic.hpp"

using namespace wormsim;

namespace {

// Integral of M·I(s)/N along the logistic, done by quadrature.
double scans_by_quadrature(double t, double n, double i0, double m) {
  auto frac = [&](double s) { return i0 * std::exp(s) / (n - i0 + i0 * std::exp(s)); };
  return m * oracle::simpson(frac, 0.0, t, 2000);
}

}  // namespace

TEST_CASE("expected scans against quadrature") {
  const auto p = oracle::no_patch(10000, 10);
  const double t = std::log(1001.0);
  CHECK(expected_scans(t, p, 1000) == doctest::Approx(1000.0 * std::log(2.0)));
  CHECK(expected_scans(t, p, 1000) == doctest::Approx(693.1).epsilon(1e-4));
  for (double s : {0.5, 2.0, 5.0, 9.0, 15.0}) {
    INFO("t=" << s);
    CHECK(expected_scans(s, p, 250) == doctest::Approx(scans_by_quadrature(s, 1e4, 10, 250)).epsilon(1e-8));
  }
  CHECK(expected_scans(0.0, p, 1000) == 0.0);
  CHECK_THROWS_AS(expected_scans(-1.0, p, 1), Error);
  CHECK_THROWS_AS(expected_scans(1.0, oracle::code_red_fixed(), 1), Error);
}

TEST_CASE("expected scans are linear in M and increasing in t") {
  const auto p = oracle::no_patch(85000, 1);
  double last = -1.0;
  for (double t = 0.0; t < 20.0; t += 0.5) {
    CHECK(expected_scans(t, p, 300) == doctest::Approx(3.0 * expected_scans(t, p, 100)));
    const double v = expected_scans(t, p, 100);
    CHECK(v > last);
    last = v;
  }
}

TEST_CASE("monitor count for a Slammer-sized population") {
  auto p = oracle::no_patch(85000, 1);
  const double deadline = std::log(std::log(85000.0));
  const MonitorPlan plan = monitors_for_detection(p, deadline);
  CHECK(plan.monitors == doctest::Approx(8.2e3).epsilon(0.02));
  const double ratio = static_cast<double>(plan.monitors) / 7489.0;
  CHECK(ratio <= 1.25);
  CHECK(ratio >= 1.0 / 1.25);
  CHECK(plan.expected_scans_at_deadline >= 1.0);
  // One monitor fewer would miss the target.
  CHECK(expected_scans(deadline, p, plan.monitors - 1) < 1.0);
}

TEST_CASE("monitor count for the IPv4 space") {
  auto p = oracle::no_patch(4294967296LL, 1);
  const double deadline = std::log(std::log(4294967296.0));
  const MonitorPlan plan = monitors_for_detection(p, deadline);
  const double thumb = static_cast<double>(thumb_rule_monitors(4294967296LL, PatchRegime::FixedPatching));
  CHECK(static_cast<double>(plan.monitors) / thumb <= 1.25);
  CHECK(static_cast<double>(plan.monitors) / thumb >= 1.0 / 1.25);
}

TEST_CASE("monitor count limits") {
  auto p = oracle::no_patch(10000, 10);
  CHECK(monitors_for_detection(p, 40.0).monitors == 1);
  CHECK_THROWS_AS(monitors_for_detection(p, 1e-9), Error);
  CHECK_THROWS_AS(monitors_for_detection(p, 0.0), Error);
}

TEST_CASE("rules of thumb") {
  // 85000 / ln 85000 = 7488.7; the often-quoted 7485 is a rounding slip.
  CHECK(thumb_rule_monitors(85000, PatchRegime::FixedPatching) == 7489);
  CHECK(thumb_rule_monitors(85000, PatchRegime::P2PPatching) == 34991);
  CHECK(thumb_rule_monitors(4294967296LL, PatchRegime::FixedPatching) == doctest::Approx(1.94e8).epsilon(0.01));
  CHECK(thumb_rule_monitors(8, PatchRegime::FixedPatching) == 4);
  CHECK_THROWS_AS(thumb_rule_monitors(2, PatchRegime::FixedPatching), Error);

  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    const auto n = static_cast<std::int64_t>(oracle::log_uniform(rng, 20.0, 1e12));
    for (auto regime : {PatchRegime::FixedPatching, PatchRegime::P2PPatching}) {
      const double exact = static_cast<double>(n) /
          (regime == PatchRegime::FixedPatching ? std::log(double(n)) : std::log(std::log(double(n))));
      const auto m = static_cast<double>(thumb_rule_monitors(n, regime));
      CHECK(m >= exact);
      CHECK(m < exact + 1.0 + 1e-6 * exact);
    }
  }
}

TEST_CASE("planned telescope detects by the deadline in simulation") {
  const auto p = oracle::no_patch(10000, 1);
  const double deadline = std::log(std::log(10000.0));
  const MonitorPlan plan = monitors_for_detection(p, deadline);
  const auto hits = detection_sim(p, plan.monitors, {17, deadline + 1.0, 0.1, 500});
  const auto detected = std::count_if(hits.begin(), hits.end(), [&](double t) { return t <= deadline; });
  CHECK(static_cast<double>(detected) / 500.0 >= 0.5);
}
