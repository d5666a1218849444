#include "hconf/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hconf/errors.hpp"
#include "hconf/format.hpp"

namespace hconf {

void SimConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("simulation step must be > 0");
  if (!(event_tolerance > 0.0)) throw DomainError("event tolerance must be > 0");
}

void Stimulus::validate(const Hioa& a) const {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw DomainError("stimulus horizon must be >= 0");
  double prev = 0.0;
  for (const auto& sa : actions) {
    if (sa.time < prev || sa.time > horizon) throw DomainError("scheduled action times must be sorted within [0, T]");
    if (!a.has_action(sa.action)) throw DomainError("scheduled action '" + sa.action + "' is not declared");
    prev = sa.time;
  }
  if (signals.variables().empty() && !a.input_vars().empty()) throw DomainError("stimulus lacks input signals");
  InputSignals aligned = signals.aligned_to(a.input_vars());
  for (std::size_t k = 0; k < a.input_vars().size(); ++k) {
    if (aligned.first_time(k) > 0.0 || aligned.last_time(k) < horizon) {
      throw DomainError("input signal '" + a.input_vars()[k] + "' does not cover [0, T]");
    }
  }
}

namespace {

bool urgent_rule(const Hioa& a, const Hioa::CompiledRule& r) {
  const auto& act = a.transitions()[r.index].action;
  return a.action_kind(act) != ActionKind::Input || !r.guard.is_true();
}

class Integrator {
 public:
  Integrator(const Hioa& a, std::size_t loc, const SimConfig& cfg, const InputSignals& inputs)
      : a_(a), loc_(loc), cfg_(cfg), flow_(a, loc, inputs), inv_(a.compiled(loc).invariant) {
    if (cfg.policy == UrgencyPolicy::Urgent) {
      for (const auto& r : a.compiled(loc).rules) {
        if (urgent_rule(a, r)) urgent_.push_back(&r);
      }
    }
  }

  // First urgent rule whose guard holds at (t, x), if any.
  const Hioa::CompiledRule* firing(double t, std::span<const double> x) {
    auto env = flow_.env(t, x);
    for (const auto* r : urgent_) {
      if (r->guard.holds(env)) return r;
    }
    return nullptr;
  }

  bool invariant_ok(double t, std::span<const double> x) { return inv_.holds(flow_.env(t, x), kInvariantTolerance); }

  bool event(double t, std::span<const double> x) { return firing(t, x) != nullptr || !invariant_ok(t, x); }

  void record(double t, std::span<const double> x) {
    auto env = flow_.env(t, x);
    times_.push_back(t);
    values_.insert(values_.end(), env.begin(), env.end());
  }

  FlowResult integrate(std::vector<double> x, double t0, double t_end) {
    const double h = cfg_.step;
    if (const auto* r = firing(t0, x)) {
      record(t0, x);
      return finish(x, {StopKind::Guard, a_.transitions()[r->index].action});
    }
    if (!invariant_ok(t0, x)) {
      record(t0, x);
      return finish(x, {StopKind::Invariant, {}});
    }
    record(t0, x);
    std::vector<double> next(x.size()), probe(x.size());
    double t = t0;
    for (std::size_t k = 1; t < t_end; ++k) {
      double t_next = t0 + static_cast<double>(k) * h;
      // Absorb a final sliver instead of emitting a near-duplicate sample.
      if (t_next >= t_end || t_end - t_next < 1e-9 * h) t_next = t_end;
      const double dt = t_next - t;
      flow_.rk4_step(t, x, dt, next);
      if (!event(t_next, next)) {
        record(t_next, next);
        x.swap(next);
        t = t_next;
        continue;
      }
      double lo = 0.0;
      double hi = dt;
      while (hi - lo > cfg_.event_tolerance) {
        double mid = 0.5 * (lo + hi);
        flow_.rk4_step(t, x, mid, probe);
        if (event(t + mid, probe)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      flow_.rk4_step(t, x, hi, probe);
      if (const auto* r = firing(t + hi, probe)) {
        record(t + hi, probe);
        return finish(probe, {StopKind::Guard, a_.transitions()[r->index].action});
      }
      if (lo > 0.0) {
        flow_.rk4_step(t, x, lo, probe);
        record(t + lo, probe);
        return finish(probe, {StopKind::Invariant, {}});
      }
      return finish(x, {StopKind::Invariant, {}});
    }
    return finish(x, {StopKind::Horizon, {}});
  }

 private:
  FlowResult finish(std::span<const double> x, StopReason reason) {
    Trajectory traj(a_.layout(), std::move(times_), std::move(values_));
    return {std::move(traj), std::move(reason), a_.make_state(loc_, x)};
  }

  const Hioa& a_;
  std::size_t loc_;
  const SimConfig& cfg_;
  FlowEvaluator flow_;
  const CompiledPredicate& inv_;
  std::vector<const Hioa::CompiledRule*> urgent_;
  std::vector<double> times_;
  std::vector<ExtReal> values_;
};

}  // namespace

FlowResult integrate_flow(const Hioa& a, const State& s, double duration, const SimConfig& cfg,
                          const InputSignals& inputs, double t0) {
  cfg.validate();
  if (!(duration >= 0.0)) throw DomainError("flow duration must be >= 0");
  InputSignals aligned = inputs.empty() ? inputs : inputs.aligned_to(a.input_vars());
  std::size_t loc = a.location_index(s.location);
  Integrator integ(a, loc, cfg, aligned);
  return integ.integrate(a.internal_values(s), t0, t0 + duration);
}

ReplayResult integrate_through(const Hioa& a, const State& s, std::span<const double> times, const SimConfig& cfg,
                               const InputSignals& inputs) {
  cfg.validate();
  if (times.empty()) throw DomainError("integrate_through needs at least one time");
  InputSignals aligned = inputs.empty() ? inputs : inputs.aligned_to(a.input_vars());
  std::size_t loc = a.location_index(s.location);
  FlowEvaluator flow(a, loc, aligned);
  const auto& inv = a.compiled(loc).invariant;
  auto x = a.internal_values(s);
  std::vector<double> next(x.size());
  std::vector<ExtReal> values;
  bool ok = true;
  auto record = [&](double t) {
    auto env = flow.env(t, x);
    ok = ok && inv.holds(env, kInvariantTolerance);
    values.insert(values.end(), env.begin(), env.end());
  };
  record(times[0]);
  for (std::size_t i = 1; i < times.size(); ++i) {
    double gap = times[i] - times[i - 1];
    auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(gap / cfg.step - 1e-9)));
    double h = gap / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      flow.rk4_step(times[i - 1] + static_cast<double>(k) * h, x, h, next);
      x.swap(next);
    }
    record(times[i]);
  }
  return {Trajectory(a.layout(), {times.begin(), times.end()}, std::move(values)), a.make_state(loc, x), ok};
}

Execution run(const Hioa& a, const Stimulus& stim, const SimConfig& cfg) {
  cfg.validate();
  stim.validate(a);
  if (a.start_states().size() != 1) throw DomainError("run needs exactly one start state");
  InputSignals inputs = a.input_vars().empty() ? InputSignals{} : stim.signals.aligned_to(a.input_vars());

  Execution e;
  State state = a.start_states().front();
  double t = 0.0;
  std::size_t next_sched = 0;
  std::size_t instant_steps = 0;

  auto inputs_at = [&](double when) {
    if (a.input_vars().empty()) return Valuation{};
    std::vector<double> v(a.input_vars().size());
    inputs.eval(when, v);
    return Valuation(a.input_vars(), {v.begin(), v.end()});
  };
  auto step = [&](const std::string& act) {
    try {
      state = discrete_step(a, state, act, inputs_at(t));
    } catch (const std::exception& ex) {
      throw SimulationError("discrete step '" + act + "' at t=" + format_report(t) + " failed: " + ex.what(), e);
    }
    e.seq.actions.push_back(act);
  };

  for (;;) {
    double seg_end = next_sched < stim.actions.size() ? stim.actions[next_sched].time : stim.horizon;
    seg_end = std::max(seg_end, t);
    std::size_t loc = a.location_index(state.location);
    Integrator integ(a, loc, cfg, inputs);
    FlowResult fr = integ.integrate(a.internal_values(state), t, seg_end);
    e.first_states.push_back(state);
    e.last_states.push_back(fr.end_state);
    double begin = fr.trajectory.start();
    e.seq.trajectories.push_back(std::move(fr.trajectory));
    t = e.seq.trajectories.back().end();
    state = fr.end_state;

    if (fr.reason.kind == StopKind::Guard) {
      instant_steps = t == begin ? instant_steps + 1 : 0;
      if (instant_steps > cfg.max_instant_steps) {
        throw SimulationError("Zeno behaviour: too many urgent steps at t=" + format_report(t), e);
      }
      step(fr.reason.action);
      continue;
    }
    if (fr.reason.kind == StopKind::Invariant) {
      throw SimulationError("invariant of '" + state.location + "' violated at t=" + format_report(t), e);
    }
    if (next_sched < stim.actions.size() && stim.actions[next_sched].time <= t) {
      step(stim.actions[next_sched].action);
      ++next_sched;
      continue;
    }
    break;
  }
  return e;
}

Trace trace_of(const Hioa& a, const Execution& e) {
  e.seq.validate();
  const auto ext_vars = a.external_vars();
  Trace tr;
  tr.alphabet = a.external_actions();
  tr.seq.trajectories.push_back(restrict(e.seq.trajectories.front(), ext_vars));
  for (std::size_t i = 0; i < e.seq.actions.size(); ++i) {
    const auto& act = e.seq.actions[i];
    Trajectory next = restrict(e.seq.trajectories[i + 1], ext_vars);
    if (a.action_kind(act) == ActionKind::Internal) {
      try {
        tr.seq.trajectories.back() = concat(tr.seq.trajectories.back(), next);
        continue;
      } catch (const StateMismatchError&) {
        tr.seq.actions.emplace_back();
      }
    } else {
      tr.seq.actions.push_back(act);
    }
    tr.seq.trajectories.push_back(std::move(next));
  }
  return tr;
}

SolutionPair solution_pair(const Hioa& a, const Execution& e) {
  ATrace full = trace_to_atrace(trace_of(a, e));
  std::vector<std::string> u_vars = a.input_vars();
  for (const auto& act : a.input_actions()) u_vars.push_back(action_variable(act));
  std::vector<std::string> y_vars = a.output_vars();
  for (const auto& act : a.output_actions()) y_vars.push_back(action_variable(act));
  SolutionPair p{restrict(full, u_vars), restrict(full, y_vars)};
  p.validate();
  return p;
}

Stimulus read_stimulus_csv(std::istream& in, double horizon) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) { throw ParseError(msg, lineno, 1); };
  if (!std::getline(in, line)) {
    lineno = 1;
    fail("missing header");
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,kind,name,value") fail("header must be t,kind,name,value");

  Stimulus stim;
  stim.horizon = horizon;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> signals;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 4) fail("expected 4 columns");
    double t = 0.0;
    try {
      t = parse_double(cells[0]);
    } catch (const DomainError& e) {
      fail(e.what());
    }
    if (cells[1] == "action") {
      stim.actions.push_back({t, cells[2]});
    } else if (cells[1] == "signal") {
      double v = 0.0;
      try {
        v = parse_double(cells[3]);
      } catch (const DomainError& e) {
        fail(e.what());
      }
      if (!signals.contains(cells[2])) order.push_back(cells[2]);
      signals[cells[2]].first.push_back(t);
      signals[cells[2]].second.push_back(v);
    } else {
      fail("kind must be 'action' or 'signal'");
    }
  }
  std::vector<std::vector<double>> times, values;
  for (const auto& name : order) {
    times.push_back(signals[name].first);
    values.push_back(signals[name].second);
  }
  try {
    stim.signals = InputSignals(order, std::move(times), std::move(values));
  } catch (const DomainError& e) {
    throw ParseError(e.what(), lineno, 1);
  }
  return stim;
}

Stimulus load_stimulus_csv(const std::filesystem::path& path, double horizon) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  try {
    return read_stimulus_csv(in, horizon);
  } catch (const ParseError& e) {
    throw ParseError::in_file(path.string(), e);
  }
}

}  // namespace hconf
