#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hconf/automaton.hpp"
#include "hconf/flow.hpp"
#include "hconf/hybrid.hpp"

namespace hconf {

enum class UrgencyPolicy {
  /// Locally controlled rules, and input rules with a non-trivial guard,
  /// fire the instant their guard becomes true.
  Urgent,
  /// Only actions from the stimulus schedule fire.
  Scheduled,
};

struct SimConfig {
  double step = 1e-3;
  double event_tolerance = 1e-9;
  UrgencyPolicy policy = UrgencyPolicy::Urgent;
  /// Consecutive zero-duration urgent firings tolerated before the run is
  /// declared Zeno.
  std::size_t max_instant_steps = 1000;

  /// Throws DomainError unless step > 0 and event_tolerance > 0.
  void validate() const;
};

struct ScheduledAction {
  double time;
  std::string action;
};

struct Stimulus {
  std::vector<ScheduledAction> actions;
  InputSignals signals;
  double horizon = 0.0;

  /// Times non-decreasing within [0, horizon], actions declared by `a`,
  /// one signal per input variable covering [0, horizon]. Throws
  /// DomainError.
  void validate(const Hioa& a) const;
};

enum class StopKind { Horizon, Guard, Invariant };

struct StopReason {
  StopKind kind = StopKind::Horizon;
  /// Set for StopKind::Guard.
  std::string action;
};

struct FlowResult {
  Trajectory trajectory;
  StopReason reason;
  State end_state;
};

/// Integrates the location flow from `s` for `duration` seconds with fixed
/// RK4 steps, starting the clock at `t0`. Stops early when an urgent guard
/// becomes true (at the first sample where it holds) or the invariant
/// fails (at the last sample where it holds), locating the instant by
/// bisection. Samples cover internal, input and output variables.
FlowResult integrate_flow(const Hioa& a, const State& s, double duration, const SimConfig& cfg,
                          const InputSignals& inputs = {}, double t0 = 0.0);

struct ReplayResult {
  Trajectory trajectory;
  State end_state;
  bool invariant_ok;
};

/// Integrates through exactly the given absolute sample times (substeps of
/// at most cfg.step in between) without any guard stops.
ReplayResult integrate_through(const Hioa& a, const State& s, std::span<const double> times, const SimConfig& cfg,
                               const InputSignals& inputs = {});

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& msg, Execution partial) : std::runtime_error(msg), partial_(std::move(partial)) {}
  const Execution& partial() const { return partial_; }

 private:
  Execution partial_;
};

/// Deterministic execution over [0, stim.horizon] from the single start
/// state. Throws SimulationError with the partial execution on invariant
/// failure or a failed discrete step.
Execution run(const Hioa& a, const Stimulus& stim, const SimConfig& cfg);

/// External restriction: trajectories restricted to input then output
/// variables; internal actions removed by concatenation (kept as unlabeled
/// jumps if the external valuation is discontinuous).
Trace trace_of(const Hioa& a, const Execution& e);

/// u: input variables plus input action variables; y: output variables plus
/// output action variables; both over the same hybrid time domain.
SolutionPair solution_pair(const Hioa& a, const Execution& e);

/// Stimulus CSV: header `t,kind,name,value`, kind is `action` or `signal`.
Stimulus read_stimulus_csv(std::istream& in, double horizon);
Stimulus load_stimulus_csv(const std::filesystem::path& path, double horizon);

}  // namespace hconf
