#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hconf/expr.hpp"
#include "hconf/state.hpp"

namespace hconf {

/// Distinguished output marking agile states; reserved, never on a rule.
inline constexpr std::string_view kAgilityAction = "xi";

/// Tolerance for invariant checks on states and for agility at invariant
/// boundaries.
inline constexpr double kInvariantTolerance = 1e-9;

using Assignment = std::pair<std::string, Expr>;

struct Location {
  std::string name;
  /// Time derivative of every internal variable.
  std::vector<Assignment> flow;
  /// Over internal variables only.
  Predicate invariant;
  /// Value of every output variable, over internal and input variables.
  std::vector<Assignment> output_map;

  friend bool operator==(const Location&, const Location&) = default;
};

struct TransitionRule {
  std::string source;
  std::string target;
  std::string action;
  Predicate guard;
  /// Unlisted internal variables keep their value.
  std::vector<Assignment> reset;

  friend bool operator==(const TransitionRule&, const TransitionRule&) = default;
};

enum class ActionKind { Input, Output, Internal };

struct HioaDefinition {
  std::string name;
  std::vector<std::string> input_vars;
  std::vector<std::string> output_vars;
  std::vector<std::string> internal_vars;
  std::vector<std::string> input_actions;
  std::vector<std::string> output_actions;
  std::vector<std::string> internal_actions;
  std::vector<Location> locations;
  std::vector<TransitionRule> transitions;
  std::vector<State> start;

  friend bool operator==(const HioaDefinition&, const HioaDefinition&) = default;
};

/// Deterministic hybrid I/O automaton. Construction validates the partition,
/// naming and determinism invariants and compiles every expression; the
/// object is immutable afterwards. Throws ModelError.
class Hioa {
 public:
  explicit Hioa(HioaDefinition def);

  const HioaDefinition& definition() const { return def_; }
  const std::string& name() const { return def_.name; }
  const std::vector<std::string>& input_vars() const { return def_.input_vars; }
  const std::vector<std::string>& output_vars() const { return def_.output_vars; }
  const std::vector<std::string>& internal_vars() const { return def_.internal_vars; }
  const std::vector<std::string>& input_actions() const { return def_.input_actions; }
  const std::vector<std::string>& output_actions() const { return def_.output_actions; }
  const std::vector<std::string>& internal_actions() const { return def_.internal_actions; }
  const std::vector<Location>& locations() const { return def_.locations; }
  const std::vector<TransitionRule>& transitions() const { return def_.transitions; }
  const std::vector<State>& start_states() const { return def_.start; }

  /// Internal, then input, then output variables: the variables of every
  /// execution trajectory and the layout of compiled expressions.
  const std::vector<std::string>& layout() const { return layout_; }
  /// Input actions followed by output actions.
  std::vector<std::string> external_actions() const;
  std::vector<std::string> external_vars() const;

  bool has_action(std::string_view a) const;
  ActionKind action_kind(std::string_view a) const;
  std::size_t location_index(std::string_view name) const;

  /// Compiled form used by the integrator.
  struct CompiledRule {
    std::size_t index;
    std::size_t target;
    CompiledPredicate guard;
    std::vector<std::pair<std::size_t, CompiledExpr>> reset;
  };
  struct CompiledLocation {
    std::vector<CompiledExpr> flow;
    CompiledPredicate invariant;
    std::vector<CompiledExpr> outputs;
    std::vector<CompiledRule> rules;
  };
  const CompiledLocation& compiled(std::size_t loc) const { return compiled_[loc]; }

  /// Fills the environment [internal | inputs | outputs] for `loc`.
  void fill_env(std::size_t loc, std::span<const double> internal, std::span<const double> inputs,
                std::span<double> env) const;

  /// Internal values of a state in declaration order; throws DomainError.
  std::vector<double> internal_values(const State& s) const;
  State make_state(std::size_t loc, std::span<const double> internal) const;

 private:
  HioaDefinition def_;
  std::vector<std::string> layout_;
  std::vector<CompiledLocation> compiled_;
};

/// Input values for evaluating guards at a single instant; empty when the
/// automaton has no input variables.
std::vector<double> input_values(const Hioa& a, const Valuation& inputs);

/// Actions with a rule from the state's location whose guard holds, plus
/// every input action (enabled by stuttering when no rule applies).
std::set<std::string> enabled_actions(const Hioa& a, const State& s, const Valuation& inputs = {});

/// Takes action `act` from `s`. An input action without a matching rule is a
/// stutter. Throws NotEnabledError, NondeterminismError, or ModelError when
/// the target invariant fails.
State discrete_step(const Hioa& a, const State& s, std::string_view act, const Valuation& inputs = {});

/// True iff a trajectory of positive duration leaves `s` without violating
/// the location invariant: the invariant holds at `s` and still holds
/// (within tolerance) after one integration micro-step.
bool is_agile(const Hioa& a, const State& s, const Valuation& inputs = {});

struct E1Report {
  /// Always true under stutter semantics; kept for reporting.
  bool satisfied = true;
  /// (location, input action) pairs that rely on implicit stuttering.
  std::vector<std::pair<std::string, std::string>> stutter;
};

E1Report check_e1(const Hioa& a);

/// The two-mode thermostat: mode_ON x' = -x + 20 (x <= 20), mode_OFF
/// x' = -x (x >= 0), OFF when x >= 18, ON when x <= 2, y = x, start
/// (mode_ON, x = 5). ON is an input and OFF an output.
Hioa build_thermostat();

}  // namespace hconf
