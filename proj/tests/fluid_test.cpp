#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wormsim/fluid.hpp"
#include "wormsim/metrics.hpp"

using namespace wormsim;

TEST_CASE("no-patching right-hand side") {
  const auto p = oracle::no_patch(100, 10);
  CHECK(rhs_no_patch({100, 0, 0}, p).di_dt == 0.0);
  CHECK(rhs_no_patch({50, 50, 0}, p).di_dt == doctest::Approx(25.0));
  const auto d = rhs_no_patch({90, 10, 0}, p);
  CHECK(d.di_dt == doctest::Approx(9.0));
  CHECK(d.ds_dt == doctest::Approx(-9.0));
  CHECK(d.dp_dt == 0.0);
}

TEST_CASE("fixed-server right-hand side") {
  auto p = oracle::code_red(Defense::FixedServers, 2.0, 10, 25, 1000);

  SUBCASE("no infected") {
    const auto d = rhs_fixed_servers({900, 0, 100}, p);
    CHECK(d.di_dt == 0.0);
    CHECK(d.dp_dt == doctest::Approx(20.0));
  }
  SUBCASE("pure disinfection at server capacity") {
    const auto d = rhs_fixed_servers({0, 900, 100}, p);
    CHECK(d.di_dt == doctest::Approx(-20.0));
  }
  SUBCASE("direct substitution") {
    // 800·100/1000 - 2·10·100/900
    const auto d = rhs_fixed_servers({800, 100, 100}, p);
    CHECK(d.di_dt == doctest::Approx(80.0 - 20.0 * 100.0 / 900.0));
    CHECK(d.di_dt == doctest::Approx(77.78).epsilon(1e-4));
    CHECK(d.dp_dt == doctest::Approx(20.0));
  }
  SUBCASE("finishing phase caps the rate at gamma times the remaining hosts") {
    const auto d = rhs_fixed_servers({2, 4, 994}, p);
    CHECK(d.dp_dt == doctest::Approx(2.0 * 6.0));
    CHECK(d.di_dt == doctest::Approx(2.0 * 4.0 / 1000.0 - 2.0 * 4.0));
  }
  SUBCASE("fully patched system has no derivative") {
    try {
      rhs_fixed_servers({0, 0, 1000}, p);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Precondition);
    }
  }
}

TEST_CASE("peer-to-peer right-hand side") {
  const auto p = oracle::code_red(Defense::PeerToPeer, 2.0, 10, 25, 1000);
  CHECK(rhs_p2p({900, 100, 0}, p).dp_dt == 0.0);
  const auto pure = rhs_p2p({0, 500, 500}, p);
  CHECK(pure.di_dt == doctest::Approx(-2.0 / 1000.0 * 500.0 * 500.0));
  CHECK(pure.di_dt < 0.0);
  const auto d = rhs_p2p({800, 100, 100}, p);
  CHECK(d.di_dt == doctest::Approx(60.0));
  CHECK(d.dp_dt == doctest::Approx(180.0));
}

TEST_CASE("every derivative conserves the population") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const auto n = static_cast<std::int64_t>(oracle::log_uniform(rng, 1e2, 1e7));
    const double nd = static_cast<double>(n);
    double s = u(rng), i = u(rng), q = u(rng);
    const double sum = s + i + q;
    const PopulationState st{nd * s / sum, nd * i / sum, nd * q / sum};
    for (Defense d : {Defense::NoPatching, Defense::FixedServers, Defense::PeerToPeer}) {
      const auto p = oracle::code_red(d, oracle::log_uniform(rng, 0.1, 500.0),
                                      1 + static_cast<std::int64_t>(u(rng) * 50), 1, n);
      const auto der = rhs(st, p);
      CHECK(std::abs(der.ds_dt + der.di_dt + der.dp_dt) <= 1e-12 * nd);
    }
  }
}

TEST_CASE("no-patching closed form") {
  const auto p = oracle::no_patch(360000, 25);
  CHECK(closed_form_no_patch(0.0, p) == doctest::Approx(25.0));
  // Half the population is infected at t = ln((N - I0)/I0).
  CHECK(closed_form_no_patch(std::log((360000.0 - 25.0) / 25.0), p) ==
        doctest::Approx(180000.0).epsilon(1e-12));
  CHECK(std::abs(closed_form_no_patch(50.0, p) - 360000.0) <= 1e-6 * 360000.0);
  CHECK(std::isfinite(closed_form_no_patch(2000.0, p)));
}

TEST_CASE("fixed-server closed form") {
  const auto p = oracle::code_red_fixed();
  const double n = 360000.0;

  // C = (N - P̄)/I0 gives I(0) = (N - P̄) I0 / (I0 + N - P̄), slightly under I0.
  CHECK(closed_form_fixed(0.0, p) == doctest::Approx((n - 25.0) * 25.0 / (25.0 + n - 25.0)));
  CHECK(closed_form_fixed(0.0, p) == doctest::Approx(25.0 * (1.0 - 25.0 / n)).epsilon(1e-8));

  const double at_peak = closed_form_fixed(13.4, p);
  CHECK(at_peak >= 2.0e5);
  CHECK(at_peak <= 2.5e5);

  const double end = fixed_validity_end(p);
  CHECK(end == doctest::Approx((n - 50.0) / 7800.0));
  CHECK(closed_form_fixed(end, p) <= 25.0 * (1.0 + 1e-9));
  CHECK(closed_form_fixed(end, p) >= 24.0);

  try {
    closed_form_fixed(end + 0.01, p);
    FAIL("expected an error past the window");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutsideValidity);
  }
}

TEST_CASE("peer-to-peer patch closed form") {
  const auto p = oracle::code_red_p2p(1.0);
  CHECK(closed_form_p2p_patch(0.0, p) == doctest::Approx(10.0));
  CHECK(closed_form_p2p_patch(std::log(360000.0 / 10.0), p) ==
        doctest::Approx(180000.0).epsilon(1e-4));
  CHECK(closed_form_p2p_patch(100.0, p) == doctest::Approx(360000.0));
}

TEST_CASE("peer-to-peer infected closed form") {
  const double n = 360000.0;
  SUBCASE("initial value") {
    const auto p = oracle::code_red_p2p(1.0);
    const double exact = 1.0 / (10.0 / (n * n * (1.0 - 10.0 / n)) + 1.0 / n + 1.0 / 25.0);
    CHECK(closed_form_p2p(0.0, p) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(std::abs(closed_form_p2p(0.0, p) - 25.0) <= 25.0 * 2.0 * (25.0 + 10.0) / n);
  }
  SUBCASE("gamma = 1 near the predicted peak") {
    const double v = closed_form_p2p(10.49, oracle::code_red_p2p(1.0));
    CHECK(v >= 0.9e5);
    CHECK(v <= 1.2e5);
  }
  SUBCASE("gamma = 2 at the predicted peak") {
    const double t = 0.5 * std::log(n / 20.0);
    CHECK(t == doctest::Approx(4.90).epsilon(1e-3));
    CHECK(closed_form_p2p(t, oracle::code_red_p2p(2.0)) == doctest::Approx(1.8e3).epsilon(0.05));
  }
  SUBCASE("stays finite and nonnegative far out") {
    const auto p = oracle::code_red_p2p(3.0);
    CHECK(closed_form_p2p(500.0, p) >= 0.0);
    CHECK(closed_form_p2p(500.0, p) < 1e-100);
  }
}

TEST_CASE("closed forms satisfy their differential equations") {
  // Centered differences of the closed form against the right-hand side
  // evaluated at the closed-form state.
  const std::vector<ScenarioParams> cases = {
      oracle::no_patch(360000, 25),
      oracle::no_patch(100000, 3),
      oracle::code_red_fixed(),
      oracle::code_red(Defense::FixedServers, 40.0, 25, 10, 100000),
      oracle::code_red_p2p(1.0),
      oracle::code_red_p2p(2.0),
      oracle::code_red(Defense::PeerToPeer, 0.7, 40, 5, 50000),
  };
  for (const auto& p : cases) {
    const double horizon = std::min(closed_form_horizon(p), 30.0);
    const double h = 1e-4;
    for (double t = 0.25; t < horizon - 0.25; t += 0.25) {
      auto infected = [&](double x) { return closed_form_state(x, p).i; };
      const double fd = oracle::central_difference(infected, t, h);
      const double expected = rhs(closed_form_state(t, p), p).di_dt;
      const double scale = std::max(std::abs(expected), 1e-3 * closed_form_state(t, p).i);
      INFO("defense=" << to_string(p.defense) << " t=" << t);
      if (closed_form_state(t, p).i < 1e-3) continue;
      CHECK(std::abs(fd - expected) <= 1e-4 * scale);
    }
  }
}

namespace {

Trajectory sample_closed_form(const ScenarioParams& p, double t_end, double dt) {
  Trajectory traj;
  traj.params = p;
  traj.source = TrajectorySource::ClosedForm;
  for (double t = 0.0; t <= t_end; t += dt) traj.samples.push_back({t, closed_form_state(t, p)});
  return traj;
}

}  // namespace

TEST_CASE("closed-form shapes") {
  CHECK(derivative_sign_changes(sample_closed_form(oracle::no_patch(360000, 25), 40.0, 0.01)) == 0);
  const auto fixed = oracle::code_red_fixed();
  CHECK(derivative_sign_changes(sample_closed_form(fixed, fixed_validity_end(fixed), 0.01)) == 1);
  for (double g : {0.8, 1.0, 2.0, 3.0}) {
    const auto p = oracle::code_red_p2p(g);
    CHECK(derivative_sign_changes(sample_closed_form(p, 60.0 / g, 0.01)) == 1);
  }
}

TEST_CASE("growth starts exponential under every defense") {
  // Parameter families of the Code-Red experiments, with the server rate
  // scaled to keep γP̄/N fixed.
  for (double n : {1e5, 3.6e5, 1e6, 1e7}) {
    const auto nn = static_cast<std::int64_t>(n);
    const std::vector<ScenarioParams> family = {
        oracle::code_red(Defense::NoPatching, 1.0, 0, 25, nn),
        oracle::code_red(Defense::FixedServers, 7800.0 / 360000.0 * n / 25.0, 25, 25, nn),
        oracle::code_red(Defense::PeerToPeer, 1.0, 10, 25, nn),
        oracle::code_red(Defense::PeerToPeer, 2.0, 10, 25, nn),
    };
    const double t_max = std::min(1.0, 0.1 * std::log(n));
    for (const auto& p : family) {
      for (double t = 0.0; t <= t_max + 1e-12; t += t_max / 20.0) {
        const double pure = 25.0 * std::exp(t);
        INFO("N=" << n << " defense=" << to_string(p.defense) << " gamma=" << p.gamma << " t=" << t);
        CHECK(std::abs(closed_form_state(t, p).i - pure) <= 0.05 * pure);
      }
    }
  }
}

TEST_CASE("peer-to-peer beats fixed servers on the Code-Red pair") {
  const auto fixed = oracle::code_red_fixed();
  const auto p2p = oracle::code_red_p2p(1.0);
  double fixed_peak = 0.0, p2p_peak = 0.0;
  for (double t = 0.0; t <= fixed_validity_end(fixed); t += 0.01) {
    fixed_peak = std::max(fixed_peak, closed_form_fixed(t, fixed));
  }
  for (double t = 0.0; t <= 60.0; t += 0.01) p2p_peak = std::max(p2p_peak, closed_form_p2p(t, p2p));
  CHECK(p2p_peak < fixed_peak);
  CHECK(p2p_extinction_time(p2p).itu < fixed_extinction_time(fixed).itu);
}
