#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hconf/automaton.hpp"
#include "hconf/closeness.hpp"
#include "hconf/simulate.hpp"

namespace hconf {

/// Tolerance for replaying recorded trajectories against a model.
inline constexpr double kReplayTolerance = 1e-6;

enum class Provenance { Simulated, Recorded };

/// Finite stand-in for the solution pairs of one system.
struct PairSuite {
  std::vector<SolutionPair> pairs;
  Provenance provenance = Provenance::Simulated;

  /// Throws DomainError when the suite is empty or pairs disagree on their
  /// variable lists.
  void validate() const;
};

/// Same variables, same input action occurrences (times within tol) and
/// input signals equal at every sample of either trace (within tol).
bool input_equal(const ATrace& u1, const ATrace& u2, double tol = kMergeTolerance);

enum class PairOutcome { Matched, NoInputMatch, NotClose };

struct PairResult {
  PairOutcome outcome = PairOutcome::NoInputMatch;
  /// Matched implementation pair, or the input-equal candidate whose worst
  /// unmatched point came closest.
  std::optional<std::size_t> impl_index;
  std::optional<ClosenessVerdict> verdict;
};

struct ConformanceReport {
  bool conforms = false;
  NormMode mode = NormMode::Extended;
  ClosenessParams params;
  std::vector<PairResult> results;
};

/// For each spec pair (u, y1) looks for an impl pair (u', y2) with u'
/// input-equal to u and y1, y2 close. Spec pairs are checked concurrently
/// when `parallel` is set; the report does not depend on it.
ConformanceReport conforms(const PairSuite& spec, const PairSuite& impl, const ClosenessParams& p, NormMode mode,
                           bool parallel = false);

void write_report(std::ostream& out, const ConformanceReport& r);
const char* to_string(PairOutcome o);

/// Enabled output actions of each state, plus xi for agile states.
std::set<std::string> out_set(const Hioa& a, const std::vector<State>& states, const Valuation& inputs = {});

struct AfterResult {
  /// Empty when the trace cannot be replayed; at most one state otherwise.
  std::vector<State> states;
  /// Input variable values at the end of the trace.
  Valuation inputs;
  /// Why replay failed; empty on success.
  std::string failure;
};

/// Replays `t` from the start state: trajectories by integration through the
/// recorded sample times (external values must agree within `tol`), actions
/// by discrete steps. Unlabeled jumps are matched against enabled internal
/// actions.
AfterResult after(const Hioa& a, const Trace& t, const SimConfig& cfg = {}, double tol = kReplayTolerance);

/// One maximal simulated trajectory per probe duration, with urgent stops.
/// Input variables are held at `inputs`.
std::vector<Trajectory> traj_set(const Hioa& a, const State& s, const std::vector<double>& probes,
                                 const SimConfig& cfg = {}, const Valuation& inputs = {});

/// Members of `impl` whose restriction to `input_vars` equals that of some
/// member of `spec` within tol.
std::vector<Trajectory> infilter(const std::vector<Trajectory>& impl, const std::vector<Trajectory>& spec,
                                 const std::vector<std::string>& input_vars, double tol = kMergeTolerance);

/// Same time span and values within tol at every sample of either side,
/// compared on `vars`.
bool same_trajectory(const Trajectory& a, const Trajectory& b, const std::vector<std::string>& vars,
                     double tol = kMergeTolerance);

struct HiocoOptions {
  std::vector<double> probes{0.5, 1.0, 2.0};
  /// Count xi as an output in the inclusion check.
  bool include_xi = false;
  SimConfig sim;
  double replay_tolerance = kReplayTolerance;
};

enum class HiocoFailure { None, OutInclusion, TrajectoryInclusion, SuiteError };

struct HiocoResult {
  bool conforms = true;
  HiocoFailure failure = HiocoFailure::None;
  /// Index of the offending suite trace.
  std::optional<std::size_t> trace_index;
  std::set<std::string> impl_out;
  std::set<std::string> spec_out;
  /// Implementation trajectory with no counterpart in the specification.
  std::optional<Trajectory> trajectory;
  std::string message;
  /// Input actions of the implementation that rely on stuttering.
  E1Report impl_e1;
};

/// Checks out(I after t) in out(S after t) and
/// infilter(traj(I after t), traj(S after t)) in traj(S after t) for every
/// suite trace, on the external variables of S.
HiocoResult hioco(const Hioa& impl, const Hioa& spec, const std::vector<Trace>& suite, const HiocoOptions& opts = {});

void write_report(std::ostream& out, const HiocoResult& r);
const char* to_string(HiocoFailure f);

struct SemitransConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double tau_min = 0.05, tau_max = 1.0;
  double eps_min = 0.05, eps_max = 1.0;
  std::size_t max_vars = 3;
  std::size_t max_segments = 6;
  double horizon = 10.0;
  double step = 0.01;
  /// Regeneration attempts per trial before it is abandoned.
  std::size_t max_attempts = 20;
  bool parallel = false;

  void validate() const;
};

struct SemitransTriple {
  std::size_t trial = 0;
  double tau1 = 0, eps1 = 0, tau2 = 0, eps2 = 0;
  ATrace y1, y2, y3;
};

struct SemitransReport {
  std::size_t trials = 0;
  std::size_t regenerated = 0;
  std::size_t abandoned = 0;
  std::size_t with_actions = 0;
  std::vector<SemitransTriple> violations;
  bool passed() const { return violations.empty() && abandoned == 0; }
};

/// Random base trace over [0, cfg.horizon] with 1..max_vars continuous
/// variables, 1..max_segments segments and actions at some segment ends.
ATrace random_base_trace(std::uint64_t seed, const SemitransConfig& cfg);

/// Retimes `base` by a monotone warp bounded by 0.999 tau and adds value
/// noise with norm at most 0.999 eps on continuous variables.
ATrace perturb(const ATrace& base, double tau, double eps, std::uint64_t seed);

SemitransReport semitrans_check(const SemitransConfig& cfg);

void write_report(std::ostream& out, const SemitransReport& r, const SemitransConfig& cfg);

}  // namespace hconf
