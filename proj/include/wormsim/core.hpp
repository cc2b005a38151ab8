// Shared domain types for worm propagation under patch dissemination.
//
// All dynamics run in infection time units (ITU): wall-clock time scaled by
// the worm's virulence so that a single infected host infects at unit rate.
// The virulence only re-enters when converting results back to wall-clock.
#ifndef WORMSIM_CORE_HPP
#define WORMSIM_CORE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wormsim {

enum class ErrorCode {
  InvalidParameter,
  Precondition,
  OutsideValidity,
  GammaLeOne,
  NeverExtinct,
  Numerical,
  Config,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class Defense { NoPatching, FixedServers, PeerToPeer };

std::string_view to_string(Defense defense);
std::optional<Defense> parse_defense(std::string_view text);

enum class TimeUnit { Second, Minute, Hour, Day };

std::string_view to_string(TimeUnit unit);
std::optional<TimeUnit> parse_time_unit(std::string_view text);

struct ScenarioParams {
  std::int64_t n_hosts = 0;
  double virulence = 0.0;  // infections per wall-clock unit
  TimeUnit unit = TimeUnit::Hour;
  double gamma = 1.0;
  std::int64_t p_bar = 0;
  std::int64_t i0 = 0;
  Defense defense = Defense::NoPatching;

  double n() const { return static_cast<double>(n_hosts); }

  bool operator==(const ScenarioParams&) const = default;
};

/// Returns `params` unchanged, or throws Error(InvalidParameter) naming the
/// first violated invariant.
const ScenarioParams& validate(const ScenarioParams& params);

struct PopulationState {
  double s = 0.0;
  double i = 0.0;
  double p = 0.0;

  double total() const { return s + i + p; }
  bool operator==(const PopulationState&) const = default;
};

/// Initial (S, I, P) of a validated scenario.
PopulationState initial_state(const ScenarioParams& params);

struct TimeValue {
  double itu = 0.0;
  double wallclock = 0.0;
};

double itu_to_wallclock(double t_itu, const ScenarioParams& params);
TimeValue make_time(double t_itu, const ScenarioParams& params);

enum class TrajectorySource { ClosedForm, Integrated, StochasticRun, EnsembleMean };

std::string_view to_string(TrajectorySource source);

struct Sample {
  double t_itu = 0.0;
  PopulationState state;
};

struct Trajectory {
  std::vector<Sample> samples;
  ScenarioParams params;
  TrajectorySource source = TrajectorySource::Integrated;
  // Set when a run stopped before its configured end time.
  std::optional<double> halted_at;

  bool empty() const { return samples.empty(); }
};

/// Conservation tolerance applied to trajectories of the given source.
double conservation_tolerance(TrajectorySource source, double n_hosts);

/// Checks |s+i+p - N| against the source tolerance, nonnegativity and
/// strictly increasing time at every sample. Returns a description of the
/// first violation, or nullopt.
std::optional<std::string> find_trajectory_violation(const Trajectory& traj);

}  // namespace wormsim

#endif  // WORMSIM_CORE_HPP
