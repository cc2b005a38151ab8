#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wormsim/fluid.hpp"
#include "wormsim/integrator.hpp"
#include "wormsim/metrics.hpp"

using namespace wormsim;

TEST_CASE("spread time") {
  CHECK(spread_time(oracle::no_patch(360000, 25), {0.5}).itu ==
        doctest::Approx(std::log(359975.0 / 25.0)));
  CHECK(spread_time(oracle::no_patch(360000, 25), {0.5}).itu == doctest::Approx(9.575).epsilon(1e-4));

  auto slammer = oracle::no_patch(85000, 1);
  slammer.virulence = 1.5;
  slammer.unit = TimeUnit::Minute;
  const TimeValue t = spread_time(slammer, {0.5});
  CHECK(t.itu == doctest::Approx(11.35).epsilon(1e-3));
  CHECK(t.wallclock == doctest::Approx(7.57).epsilon(1e-3));

  const auto p = oracle::no_patch(1000, 7);
  CHECK(std::abs(spread_time(p, {7.0 / 1000.0}).itu) < 1e-12);

  CHECK_THROWS_AS(spread_time(oracle::code_red_fixed(), {0.5}), Error);
  CHECK_THROWS_AS(spread_time(p, {1.0}), Error);
}

TEST_CASE("spread time grows with kappa and with N") {
  double last = -1e9;
  for (double k = 0.05; k < 0.96; k += 0.05) {
    const double t = spread_time(oracle::no_patch(10000, 5), {k}).itu;
    CHECK(t > last);
    last = t;
  }
  last = -1e9;
  for (std::int64_t n : {100, 1000, 10000, 100000, 1000000}) {
    const double t = spread_time(oracle::no_patch(n, 5), {0.5}).itu;
    CHECK(t > last);
    last = t;
  }
}

TEST_CASE("fixed-server predictors") {
  const auto p = oracle::code_red_fixed();
  const TimeValue peak = fixed_peak_time(p);
  CHECK(peak.itu == doctest::Approx(13.4).epsilon(1e-3));
  CHECK(peak.wallclock == doctest::Approx(7.45).epsilon(1e-3));

  auto big = p;
  big.n_hosts = 1000000;
  CHECK(fixed_peak_time(big).itu == doctest::Approx(15.45).epsilon(1e-3));

  // γP̄·I0 = N² puts the peak at zero.
  CHECK(fixed_peak_time(oracle::code_red(Defense::FixedServers, 100.0, 10, 10, 100)).itu ==
        doctest::Approx(0.0));

  const TimeValue ext = fixed_extinction_time(p);
  CHECK(ext.itu == doctest::Approx(359950.0 / 7800.0));
  CHECK(ext.wallclock == doctest::Approx(25.6).epsilon(2e-3));
  CHECK(fixed_extinction_time(oracle::code_red(Defense::FixedServers, 3.0, 50, 10, 100)).itu ==
        doctest::Approx(0.0));

  auto doubled = p;
  doubled.n_hosts *= 2;
  CHECK(fixed_extinction_time(doubled).itu / ext.itu == doctest::Approx(2.0).epsilon(1e-3));

  CHECK_THROWS_AS(fixed_peak_time(oracle::code_red_p2p(2.0)), Error);
}

TEST_CASE("peer-to-peer predictors") {
  const auto g1 = oracle::code_red_p2p(1.0);
  const auto g2 = oracle::code_red_p2p(2.0);
  CHECK(p2p_peak_time(g1).itu == doctest::Approx(10.49).epsilon(1e-3));
  CHECK(p2p_peak_time(g1).wallclock == doctest::Approx(5.8).epsilon(0.01));
  CHECK(p2p_peak_time(g2).itu == doctest::Approx(4.90).epsilon(1e-3));
  CHECK(p2p_peak_time(g2).wallclock == doctest::Approx(2.7).epsilon(0.01));
  CHECK(p2p_peak_time(oracle::code_red(Defense::PeerToPeer, 10.0, 10, 10, 100)).itu ==
        doctest::Approx(0.0));

  CHECK(p2p_extinction_time(g1).itu == doctest::Approx(2.0 * std::log(360000.0)));
  CHECK(p2p_extinction_time(g1).wallclock == doctest::Approx(14.2).epsilon(0.01));
  CHECK(p2p_extinction_time(g2).itu == doctest::Approx(0.75 * std::log(360000.0)));
  CHECK(p2p_extinction_time(g2).wallclock == doctest::Approx(5.3).epsilon(0.01));
  CHECK(p2p_extinction_time(oracle::code_red_p2p(1e9)).itu < 1e-7);
}

TEST_CASE("peer-to-peer peak infected formula") {
  const auto g2 = oracle::code_red_p2p(2.0);
  const double by_hand = 2.0 * 25.0 * 600.0 / (std::sqrt(10.0) * std::pow(3.0, 1.5));
  CHECK(p2p_peak_infected(g2) == doctest::Approx(by_hand));
  CHECK(std::abs(p2p_peak_infected(g2) - 1826.0) <= 1.0);

  auto twice = g2;
  twice.i0 = 50;
  CHECK(p2p_peak_infected(twice) == doctest::Approx(2.0 * p2p_peak_infected(g2)));

  try {
    p2p_peak_infected(oracle::code_red_p2p(1.0));
    FAIL("expected gamma_le_one");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GammaLeOne);
    CHECK(std::string(e.what()).find("gamma_le_one") != std::string::npos);
  }
}

TEST_CASE("parabolic peak refinement recovers an off-grid vertex") {
  Trajectory traj;
  traj.params = oracle::no_patch(1000, 1);
  for (double t = 0.0; t <= 10.0; t += 0.5) {
    const double i = 500.0 - 3.0 * (t - 4.3) * (t - 4.3);
    traj.samples.push_back({t, {1000.0 - i, i, 0.0}});
  }
  const auto [t, i] = trajectory_peak(traj);
  CHECK(t.itu == doctest::Approx(4.3));
  CHECK(i == doctest::Approx(500.0));
}

TEST_CASE("trajectory peak and extinction on simple shapes") {
  const auto p = oracle::no_patch(360000, 25);
  const auto grow = integrate(p, {0.01, 20.0, 10});
  const auto [t, i] = trajectory_peak(grow);
  CHECK(t.itu == grow.samples.back().t_itu);
  CHECK(i == grow.samples.back().state.i);

  CHECK(trajectory_extinction(grow, 360000.0).itu == grow.samples.front().t_itu);
  try {
    trajectory_extinction(grow, default_extinction_threshold(p));
    FAIL("expected never_extinct");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NeverExtinct);
  }
  const auto summary = summarize(grow, 1.0);
  CHECK_FALSE(summary.extinction_time.has_value());
}

TEST_CASE("numeric and analytic fixed-server metrics on Code-Red") {
  const auto p = oracle::code_red_fixed();
  const auto traj = integrate(p, {0.001, 60.0, 100});
  const auto [t, i] = trajectory_peak(traj);
  // The asymptotic peak time sits 12% early at N = 3.6e5.
  CHECK(std::abs(t.itu - fixed_peak_time(p).itu) <= 0.15 * fixed_peak_time(p).itu);
  CHECK(i >= 2.0e5);
  CHECK(i <= 2.5e5);
  const TimeValue ext = trajectory_extinction(traj, default_extinction_threshold(p));
  CHECK(ext.itu == doctest::Approx(fixed_extinction_time(p).itu).epsilon(0.10));
}

TEST_CASE("numeric peak matches the peer-to-peer formula for gamma = 2") {
  const auto p = oracle::code_red_p2p(2.0);
  const auto traj = integrate(p, {0.001, 20.0, 100});
  CHECK(trajectory_peak(traj).second == doctest::Approx(p2p_peak_infected(p)).epsilon(0.10));
}

TEST_CASE("fixed-server peak sweep") {
  // The asymptotic peak predictions need γP̄ << N; the grid is restricted to
  // γP̄/N <= 1/40, where the numeric peak sits within 15% and is Θ(N).
  for (double n : {1e4, 1e5, 3.6e5}) {
    for (double rate : {1e3, 7.8e3}) {
      if (rate > n / 40.0) continue;
      for (std::int64_t i0 : {10, 25}) {
        const auto p = oracle::code_red(Defense::FixedServers, rate / 25.0, 25, i0,
                                        static_cast<std::int64_t>(n));
        const auto traj = integrate(p, {0.001, fixed_validity_end(p), 50});
        const auto [t, i] = trajectory_peak(traj);
        INFO("N=" << n << " rate=" << rate << " I0=" << i0);
        CHECK(std::abs(t.itu - fixed_peak_time(p).itu) <= 0.15 * fixed_peak_time(p).itu);
        CHECK(i >= 0.4 * n);
      }
    }
  }
}

TEST_CASE("peer-to-peer peak scales as N^(1/gamma)") {
  for (double g : {1.5, 2.0, 3.0}) {
    double lo = 1e300, hi = 0.0;
    for (double n : {1e4, 1e5, 1e6}) {
      const auto p = oracle::code_red(Defense::PeerToPeer, g, 10, 25, static_cast<std::int64_t>(n));
      const auto traj = integrate(p, {0.001, 40.0, 20});
      const double ratio = trajectory_peak(traj).second / std::pow(n, 1.0 / g);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    INFO("gamma=" << g);
    CHECK(hi / lo < 1.25);
  }
}

TEST_CASE("virulence only rescales wall-clock values") {
  auto p = oracle::code_red_p2p(2.0);
  const auto base = summarize(integrate(p, {0.001, 20.0, 50}), 10.0);
  p.virulence = 7.3;
  const auto scaled = summarize(integrate(p, {0.001, 20.0, 50}), 10.0);
  CHECK(base.peak_time.itu == scaled.peak_time.itu);
  CHECK(base.peak_infected == scaled.peak_infected);
  CHECK(base.extinction_time->itu == scaled.extinction_time->itu);
  CHECK(scaled.peak_time.wallclock == doctest::Approx(base.peak_time.itu / 7.3));
}

TEST_CASE("sign changes of the discrete derivative") {
  Trajectory traj;
  traj.params = oracle::no_patch(100, 1);
  const double values[] = {1, 2, 2, 3, 2, 1, 1, 0.5};
  double t = 0.0;
  for (double v : values) traj.samples.push_back({t++, {100.0 - v, v, 0.0}});
  CHECK(derivative_sign_changes(traj) == 1);
  traj.samples.push_back({t, {98.0, 2.0, 0.0}});
  CHECK(derivative_sign_changes(traj) == 2);
}
