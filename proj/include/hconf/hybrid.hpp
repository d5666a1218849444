#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hconf/state.hpp"
#include "hconf/trajectory.hpp"

namespace hconf {

/// Action variables are ordinary a-trace variables named "act:<NAME>".
inline constexpr std::string_view kActionPrefix = "act:";

std::string action_variable(std::string_view action);
bool is_action_variable(std::string_view var);
/// Action name of an action variable; throws DomainError otherwise.
std::string action_name(std::string_view var);

/// Union of segments [t_j, t_{j+1}] x {j}, j = 0..J-1, with
/// t_0 <= t_1 <= ... <= t_J. A domain with J = 0 is empty.
class HybridTimeDomain {
 public:
  HybridTimeDomain() = default;
  explicit HybridTimeDomain(std::vector<double> bounds);

  std::size_t segments() const { return bounds_.size() < 2 ? 0 : bounds_.size() - 1; }
  bool empty() const { return segments() == 0; }
  const std::vector<double>& bounds() const { return bounds_; }
  std::pair<double, double> segment(std::size_t j) const { return {bounds_.at(j), bounds_.at(j + 1)}; }
  double start() const { return bounds_.empty() ? 0.0 : bounds_.front(); }
  double end() const { return bounds_.empty() ? 0.0 : bounds_.back(); }

  friend bool operator==(const HybridTimeDomain&, const HybridTimeDomain&) = default;

 private:
  std::vector<double> bounds_;
};

bool approx_equal(const HybridTimeDomain& a, const HybridTimeDomain& b, double tol = kMergeTolerance);

struct ActionOccurrence {
  std::string action;
  std::size_t segment;  // fires at the closing point of this segment
  double time;

  friend bool operator==(const ActionOccurrence&, const ActionOccurrence&) = default;
};

/// Sampled function over a hybrid time domain. Segment j is a trajectory on
/// [t_j, t_{j+1}]. Action variables hold 0 everywhere except the closing
/// sample of the segment after which the action fires, where they hold inf;
/// at most one action variable is inf at any point.
class ATrace {
 public:
  ATrace() = default;
  /// Validates all invariants; throws TraceFormatError.
  ATrace(std::vector<std::string> variables, std::vector<Trajectory> segments);

  const HybridTimeDomain& domain() const { return domain_; }
  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<Trajectory>& segments() const { return segments_; }
  const Trajectory& segment(std::size_t j) const { return segments_.at(j); }
  std::size_t num_segments() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  std::size_t num_points() const;

  std::vector<std::string> continuous_variables() const;
  std::vector<std::string> action_variables() const;
  std::vector<ActionOccurrence> actions() const;

  friend bool operator==(const ATrace&, const ATrace&) = default;

 private:
  std::vector<std::string> vars_;
  std::vector<Trajectory> segments_;
  HybridTimeDomain domain_;
};

ATrace restrict(const ATrace& trace, std::span<const std::string> vars);
ATrace strip_actions(const ATrace& trace);
/// Retimes every segment by +t (t_0 + t must stay >= 0).
ATrace shift(const ATrace& trace, double t);

/// Alternating trajectories and actions tau_0, a_1, tau_1, ... . An empty
/// action label marks an unlabeled jump (a hidden internal step whose
/// external valuation is discontinuous).
struct HybridSequence {
  std::vector<Trajectory> trajectories;
  std::vector<std::string> actions;
  /// Optional per-trajectory flag: true when the domain is right-open.
  /// Empty means every trajectory is closed.
  std::vector<bool> right_open;

  /// Throws TraceFormatError: size mismatch, variable mismatch or a
  /// non-final open trajectory. Trajectories may each start at their own
  /// time; trace_to_atrace joins them.
  void validate() const;
  double duration() const;

  friend bool operator==(const HybridSequence&, const HybridSequence&) = default;
};

/// Hybrid sequence plus the automaton state at both ends of each trajectory.
struct Execution {
  HybridSequence seq;
  std::vector<State> first_states;
  std::vector<State> last_states;
};

/// External restriction of an execution. `alphabet` lists the external
/// actions (inputs first, then outputs) and fixes the action variables of
/// the derived a-trace.
struct Trace {
  HybridSequence seq;
  std::vector<std::string> alphabet;
};

/// First `n` trajectories and the n-1 actions between them.
Trace trace_prefix(const Trace& trace, std::size_t n);

/// Re-indexes the trace onto a hybrid time domain starting at 0 and adds one
/// action variable per alphabet entry. Throws TraceFormatError for
/// ill-formed traces.
ATrace trace_to_atrace(const Trace& trace);

/// Inverse of trace_to_atrace: segments become trajectories over the
/// continuous variables and an action spike at a segment end becomes the
/// action after it (unlabeled when there is none).
Trace atrace_to_trace(const ATrace& trace);

struct SolutionPair {
  ATrace u;
  ATrace y;

  /// Throws TraceFormatError when dom(u) != dom(y).
  void validate(double tol = kMergeTolerance) const;
};

}  // namespace hconf
