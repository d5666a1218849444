#include "hconf/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "hconf/errors.hpp"
#include "hconf/flow.hpp"
#include "hconf/hybrid.hpp"

namespace hconf {
namespace {

bool contains(const std::vector<std::string>& v, std::string_view x) { return std::find(v.begin(), v.end(), x) != v.end(); }

void require_subset(const std::vector<std::string>& used, const std::vector<std::string>& allowed, const std::string& what) {
  for (const auto& u : used) {
    if (!contains(allowed, u)) throw ModelError(what + " uses undeclared or disallowed variable '" + u + "'");
  }
}

// Closed/open bounds on one variable implied by `var op const` comparisons.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;
};

std::optional<double> constant_value(const Expr& e) {
  if (!e.variables().empty()) return std::nullopt;
  try {
    return e.eval(Valuation{});
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

CmpOp mirror(CmpOp op) {
  switch (op) {
    case CmpOp::Le:
      return CmpOp::Ge;
    case CmpOp::Ge:
      return CmpOp::Le;
    case CmpOp::Lt:
      return CmpOp::Gt;
    case CmpOp::Gt:
      return CmpOp::Lt;
    case CmpOp::Eq:
      return CmpOp::Eq;
  }
  return op;
}

std::unordered_map<std::string, Interval> bounds_of(const Predicate& p) {
  std::unordered_map<std::string, Interval> out;
  for (const auto& c : p.terms) {
    const Expr* var = nullptr;
    std::optional<double> k;
    CmpOp op = c.op;
    if (c.lhs.kind() == Expr::Kind::Variable) {
      var = &c.lhs;
      k = constant_value(c.rhs);
    } else if (c.rhs.kind() == Expr::Kind::Variable) {
      var = &c.rhs;
      k = constant_value(c.lhs);
      op = mirror(op);
    }
    if (!var || !k) continue;
    Interval& iv = out[var->name()];
    auto raise_lo = [&](double v, bool open) {
      if (v > iv.lo || (v == iv.lo && open)) {
        iv.lo = v;
        iv.lo_open = open;
      }
    };
    auto lower_hi = [&](double v, bool open) {
      if (v < iv.hi || (v == iv.hi && open)) {
        iv.hi = v;
        iv.hi_open = open;
      }
    };
    switch (op) {
      case CmpOp::Le:
        lower_hi(*k, false);
        break;
      case CmpOp::Lt:
        lower_hi(*k, true);
        break;
      case CmpOp::Ge:
        raise_lo(*k, false);
        break;
      case CmpOp::Gt:
        raise_lo(*k, true);
        break;
      case CmpOp::Eq:
        raise_lo(*k, false);
        lower_hi(*k, false);
        break;
    }
  }
  return out;
}

bool intervals_disjoint(const Interval& a, const Interval& b) {
  auto below = [](const Interval& x, const Interval& y) {
    return x.hi < y.lo || (x.hi == y.lo && (x.hi_open || y.lo_open));
  };
  return below(a, b) || below(b, a);
}

// Sound but incomplete: true only when some variable is bounded to disjoint
// constant intervals by the two guards.
bool provably_disjoint(const Predicate& g1, const Predicate& g2) {
  auto b1 = bounds_of(g1);
  auto b2 = bounds_of(g2);
  for (const auto& [name, iv] : b1) {
    auto it = b2.find(name);
    if (it != b2.end() && intervals_disjoint(iv, it->second)) return true;
  }
  return false;
}

}  // namespace

Hioa::Hioa(HioaDefinition def) : def_(std::move(def)) {
  auto& d = def_;

  std::vector<std::string> all_vars;
  for (const auto* set : {&d.internal_vars, &d.input_vars, &d.output_vars}) all_vars.insert(all_vars.end(), set->begin(), set->end());
  std::unordered_set<std::string> seen;
  for (const auto& v : all_vars) {
    if (!seen.insert(v).second) throw ModelError("variable '" + v + "' declared twice or in two partitions");
    if (is_action_variable(v)) throw ModelError("variable name '" + v + "' is reserved for action variables");
  }
  std::vector<std::string> all_actions;
  for (const auto* set : {&d.input_actions, &d.output_actions, &d.internal_actions}) {
    all_actions.insert(all_actions.end(), set->begin(), set->end());
  }
  seen.clear();
  for (const auto& a : all_actions) {
    if (a == kAgilityAction) throw ModelError("action name '" + a + "' is reserved for agility");
    if (a.empty()) throw ModelError("empty action name");
    if (!seen.insert(a).second) throw ModelError("action '" + a + "' declared twice or in two partitions");
  }
  layout_ = all_vars;

  std::vector<std::string> flow_scope = d.internal_vars;
  flow_scope.insert(flow_scope.end(), d.input_vars.begin(), d.input_vars.end());

  if (d.locations.empty()) throw ModelError("automaton has no location");
  seen.clear();
  for (const auto& loc : d.locations) {
    if (!seen.insert(loc.name).second) throw ModelError("duplicate location '" + loc.name + "'");
    CompiledLocation cl;
    for (const auto& x : d.internal_vars) {
      auto n = std::count_if(loc.flow.begin(), loc.flow.end(), [&](const Assignment& a) { return a.first == x; });
      if (n != 1) throw ModelError("location '" + loc.name + "' must define the flow of '" + x + "' exactly once");
    }
    for (const auto& [var, e] : loc.flow) {
      if (!contains(d.internal_vars, var)) throw ModelError("flow for non-internal variable '" + var + "'");
    }
    for (const auto& x : d.internal_vars) {
      auto it = std::find_if(loc.flow.begin(), loc.flow.end(), [&](const Assignment& a) { return a.first == x; });
      require_subset(it->second.variables(), flow_scope, "flow of '" + x + "' in '" + loc.name + "'");
      cl.flow.emplace_back(it->second, layout_);
    }
    require_subset(loc.invariant.variables(), d.internal_vars, "invariant of '" + loc.name + "'");
    cl.invariant = CompiledPredicate(loc.invariant, layout_);
    for (const auto& y : d.output_vars) {
      auto n = std::count_if(loc.output_map.begin(), loc.output_map.end(), [&](const Assignment& a) { return a.first == y; });
      if (n != 1) throw ModelError("location '" + loc.name + "' must define output '" + y + "' exactly once");
    }
    for (const auto& [var, e] : loc.output_map) {
      if (!contains(d.output_vars, var)) throw ModelError("output map for non-output variable '" + var + "'");
    }
    for (const auto& y : d.output_vars) {
      auto it = std::find_if(loc.output_map.begin(), loc.output_map.end(), [&](const Assignment& a) { return a.first == y; });
      require_subset(it->second.variables(), flow_scope, "output '" + y + "' in '" + loc.name + "'");
      cl.outputs.emplace_back(it->second, layout_);
    }
    compiled_.push_back(std::move(cl));
  }

  for (std::size_t r = 0; r < d.transitions.size(); ++r) {
    const auto& t = d.transitions[r];
    if (t.action == kAgilityAction) throw ModelError("the agility action cannot label a transition");
    if (!contains(all_actions, t.action)) throw ModelError("transition uses undeclared action '" + t.action + "'");
    std::size_t src = location_index(t.source);
    std::size_t dst = location_index(t.target);
    require_subset(t.guard.variables(), layout_, "guard of " + t.source + " -> " + t.target);
    CompiledRule rule{r, dst, CompiledPredicate(t.guard, layout_), {}};
    for (const auto& [var, e] : t.reset) {
      if (!contains(d.internal_vars, var)) throw ModelError("reset of non-internal variable '" + var + "'");
      require_subset(e.variables(), flow_scope, "reset of '" + var + "'");
      auto idx = static_cast<std::size_t>(std::find(d.internal_vars.begin(), d.internal_vars.end(), var) - d.internal_vars.begin());
      rule.reset.emplace_back(idx, CompiledExpr(e, layout_));
    }
    for (const auto& other : compiled_[src].rules) {
      const auto& o = d.transitions[other.index];
      if (o.action == t.action && !provably_disjoint(o.guard, t.guard)) {
        throw ModelError("nondeterministic: two rules from '" + t.source + "' on '" + t.action + "' with overlapping guards");
      }
    }
    compiled_[src].rules.push_back(std::move(rule));
  }

  if (d.start.empty()) throw ModelError("automaton has no start state");
  for (auto& s : d.start) {
    std::size_t loc = location_index(s.location);
    try {
      s.values = restrict(s.values, d.internal_vars);
    } catch (const DomainError& e) {
      throw ModelError(std::string("start state: ") + e.what());
    }
    std::vector<double> env(layout_.size(), 0.0);
    auto xv = internal_values(s);
    std::copy(xv.begin(), xv.end(), env.begin());
    if (!compiled_[loc].invariant.holds(env, kInvariantTolerance)) {
      throw ModelError("start state " + to_string(s) + " violates the invariant of '" + s.location + "'");
    }
  }
}

std::vector<std::string> Hioa::external_actions() const {
  std::vector<std::string> out = def_.input_actions;
  out.insert(out.end(), def_.output_actions.begin(), def_.output_actions.end());
  return out;
}

std::vector<std::string> Hioa::external_vars() const {
  std::vector<std::string> out = def_.input_vars;
  out.insert(out.end(), def_.output_vars.begin(), def_.output_vars.end());
  return out;
}

bool Hioa::has_action(std::string_view a) const {
  return contains(def_.input_actions, a) || contains(def_.output_actions, a) || contains(def_.internal_actions, a);
}

ActionKind Hioa::action_kind(std::string_view a) const {
  if (contains(def_.input_actions, a)) return ActionKind::Input;
  if (contains(def_.output_actions, a)) return ActionKind::Output;
  if (contains(def_.internal_actions, a)) return ActionKind::Internal;
  throw DomainError("unknown action '" + std::string(a) + "'");
}

std::size_t Hioa::location_index(std::string_view name) const {
  for (std::size_t i = 0; i < def_.locations.size(); ++i) {
    if (def_.locations[i].name == name) return i;
  }
  throw ModelError("unknown location '" + std::string(name) + "'");
}

void Hioa::fill_env(std::size_t loc, std::span<const double> internal, std::span<const double> inputs,
                    std::span<double> env) const {
  const std::size_t nx = def_.internal_vars.size();
  const std::size_t ni = def_.input_vars.size();
  std::copy(internal.begin(), internal.end(), env.begin());
  std::copy(inputs.begin(), inputs.end(), env.begin() + static_cast<std::ptrdiff_t>(nx));
  const auto& outs = compiled_[loc].outputs;
  for (std::size_t k = 0; k < outs.size(); ++k) env[nx + ni + k] = outs[k].eval(env);
}

std::vector<double> Hioa::internal_values(const State& s) const {
  auto r = restrict(s.values, def_.internal_vars);
  std::vector<double> out;
  out.reserve(r.size());
  for (auto v : r.values()) {
    if (v.is_inf()) throw DomainError("state variable is infinite");
    out.push_back(v.value());
  }
  return out;
}

State Hioa::make_state(std::size_t loc, std::span<const double> internal) const {
  return State{def_.locations[loc].name, Valuation(def_.internal_vars, {internal.begin(), internal.end()})};
}

std::vector<double> input_values(const Hioa& a, const Valuation& inputs) {
  if (a.input_vars().empty()) return {};
  auto r = restrict(inputs, a.input_vars());
  std::vector<double> out;
  for (auto v : r.values()) out.push_back(v.value());
  return out;
}

namespace {

std::vector<double> env_of(const Hioa& a, std::size_t loc, const State& s, const Valuation& inputs) {
  std::vector<double> env(a.layout().size(), 0.0);
  a.fill_env(loc, a.internal_values(s), input_values(a, inputs), env);
  return env;
}

}  // namespace

std::set<std::string> enabled_actions(const Hioa& a, const State& s, const Valuation& inputs) {
  std::size_t loc = a.location_index(s.location);
  auto env = env_of(a, loc, s, inputs);
  std::set<std::string> out(a.input_actions().begin(), a.input_actions().end());
  for (const auto& r : a.compiled(loc).rules) {
    if (r.guard.holds(env)) out.insert(a.transitions()[r.index].action);
  }
  return out;
}

State discrete_step(const Hioa& a, const State& s, std::string_view act, const Valuation& inputs) {
  if (!a.has_action(act)) throw DomainError("unknown action '" + std::string(act) + "'");
  std::size_t loc = a.location_index(s.location);
  auto env = env_of(a, loc, s, inputs);
  const Hioa::CompiledRule* chosen = nullptr;
  for (const auto& r : a.compiled(loc).rules) {
    if (a.transitions()[r.index].action != act || !r.guard.holds(env)) continue;
    if (chosen) throw NondeterminismError("two rules for '" + std::string(act) + "' are enabled in " + to_string(s));
    chosen = &r;
  }
  if (!chosen) {
    if (a.action_kind(act) == ActionKind::Input) return s;
    throw NotEnabledError("action '" + std::string(act) + "' is not enabled in " + to_string(s));
  }
  auto x = a.internal_values(s);
  std::vector<double> next = x;
  for (const auto& [idx, e] : chosen->reset) next[idx] = e.eval(env);
  std::vector<double> target_env(a.layout().size(), 0.0);
  a.fill_env(chosen->target, next, input_values(a, inputs), target_env);
  if (!a.compiled(chosen->target).invariant.holds(target_env, kInvariantTolerance)) {
    throw ModelError("target of '" + std::string(act) + "' violates the invariant of '" +
                     a.locations()[chosen->target].name + "'");
  }
  return a.make_state(chosen->target, next);
}

bool is_agile(const Hioa& a, const State& s, const Valuation& inputs) {
  constexpr double kMicroStep = 1e-6;
  std::size_t loc = a.location_index(s.location);
  auto x = a.internal_values(s);
  InputSignals in = a.input_vars().empty() ? InputSignals{} : InputSignals::constant(restrict(inputs, a.input_vars()));
  FlowEvaluator flow(a, loc, in);
  const auto& inv = a.compiled(loc).invariant;
  if (inv.margin(flow.env(0.0, x)) < -kInvariantTolerance) return false;
  std::vector<double> next(x.size());
  flow.rk4_step(0.0, x, kMicroStep, next);
  return inv.margin(flow.env(kMicroStep, next)) >= -kInvariantTolerance;
}

E1Report check_e1(const Hioa& a) {
  E1Report report;
  for (const auto& act : a.input_actions()) {
    for (std::size_t loc = 0; loc < a.locations().size(); ++loc) {
      bool unconditional = false;
      for (const auto& r : a.compiled(loc).rules) {
        if (a.transitions()[r.index].action == act && r.guard.is_true()) unconditional = true;
      }
      if (!unconditional) report.stutter.emplace_back(a.locations()[loc].name, act);
    }
  }
  return report;
}

Hioa build_thermostat() {
  HioaDefinition d;
  d.name = "thermostat";
  d.output_vars = {"y"};
  d.internal_vars = {"x"};
  d.input_actions = {"ON"};
  d.output_actions = {"OFF"};
  d.locations = {
      Location{"mode_ON", {{"x", parse_expr("-x + 20")}}, parse_predicate("x <= 20"), {{"y", parse_expr("x")}}},
      Location{"mode_OFF", {{"x", parse_expr("-x")}}, parse_predicate("x >= 0"), {{"y", parse_expr("x")}}},
  };
  d.transitions = {
      TransitionRule{"mode_ON", "mode_OFF", "OFF", parse_predicate("x >= 18"), {}},
      TransitionRule{"mode_OFF", "mode_ON", "ON", parse_predicate("x <= 2"), {}},
  };
  d.start = {State{"mode_ON", Valuation{{"x", 5.0}}}};
  return Hioa(std::move(d));
}

}  // namespace hconf
