#include "hconf/conformance.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "hconf/errors.hpp"
#include "hconf/format.hpp"
#include "hconf/parallel.hpp"

namespace hconf {

void PairSuite::validate() const {
  if (pairs.empty()) throw DomainError("pair suite is empty");
  for (const auto& p : pairs) {
    p.validate();
    if (p.u.variables() != pairs.front().u.variables() || p.y.variables() != pairs.front().y.variables()) {
      throw DomainError("pairs in a suite must share their variable lists");
    }
  }
}

namespace {

bool rows_close(const Valuation& a, const Valuation& b, double tol) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(abs_diff(a.values()[k], b.values()[k]) <= ExtReal(tol))) return false;
  }
  return true;
}

// Values of `a` and `b` agree at every sample time of either side.
bool samples_agree(const Trajectory& a, const Trajectory& b, double tol) {
  for (double t : a.times()) {
    double tb = std::clamp(t, b.start(), b.end());
    if (!rows_close(a.at(t), b.at(tb), tol)) return false;
  }
  for (double t : b.times()) {
    double ta = std::clamp(t, a.start(), a.end());
    if (!rows_close(a.at(ta), b.at(t), tol)) return false;
  }
  return true;
}

}  // namespace

bool input_equal(const ATrace& u1, const ATrace& u2, double tol) {
  if (u1.variables() != u2.variables()) return false;
  auto a1 = u1.actions();
  auto a2 = u2.actions();
  if (a1.size() != a2.size()) return false;
  for (std::size_t i = 0; i < a1.size(); ++i) {
    if (a1[i].action != a2[i].action || std::fabs(a1[i].time - a2[i].time) > tol) return false;
  }
  auto cont = u1.continuous_variables();
  if (cont.empty()) return true;
  if (!approx_equal(u1.domain(), u2.domain(), tol)) return false;
  for (std::size_t j = 0; j < u1.num_segments(); ++j) {
    if (!samples_agree(restrict(u1.segment(j), cont), restrict(u2.segment(j), cont), tol)) return false;
  }
  return true;
}

namespace {

ExtReal miss_distance(const ClosenessVerdict& v) { return v.worst ? v.worst->best_distance : ExtReal(0.0); }

}  // namespace

ConformanceReport conforms(const PairSuite& spec, const PairSuite& impl, const ClosenessParams& p, NormMode mode,
                           bool parallel) {
  spec.validate();
  impl.validate();
  p.validate();
  ConformanceReport report;
  report.mode = mode;
  report.params = p;
  report.results.resize(spec.pairs.size());
  parallel_for(spec.pairs.size(), parallel, [&](std::size_t i) {
    const auto& sp = spec.pairs[i];
    PairResult& r = report.results[i];
    for (std::size_t k = 0; k < impl.pairs.size(); ++k) {
      const auto& ip = impl.pairs[k];
      if (!input_equal(sp.u, ip.u)) continue;
      auto v = close_check(sp.y, ip.y, p, mode, {.parallel = false, .witness = false});
      if (v.close) {
        r = {PairOutcome::Matched, k, std::move(v)};
        return;
      }
      if (!r.verdict || miss_distance(v) < miss_distance(*r.verdict)) {
        r = {PairOutcome::NotClose, k, std::move(v)};
      }
    }
  });
  report.conforms = std::all_of(report.results.begin(), report.results.end(),
                                [](const PairResult& r) { return r.outcome == PairOutcome::Matched; });
  return report;
}

const char* to_string(PairOutcome o) {
  switch (o) {
    case PairOutcome::Matched:
      return "matched";
    case PairOutcome::NoInputMatch:
      return "no_input_match";
    case PairOutcome::NotClose:
      return "not_close";
  }
  return "?";
}

void write_report(std::ostream& out, const ConformanceReport& r) {
  out << "verdict = " << (r.conforms ? "conforms" : "does_not_conform") << '\n';
  out << "mode = " << to_string(r.mode) << '\n';
  out << "tau = " << format_report(r.params.tau) << '\n';
  out << "eps = " << format_report(r.params.eps) << '\n';
  out << "T = " << format_report(r.params.horizon) << '\n';
  out << "J = " << r.params.max_jumps << '\n';
  out << "pairs = " << r.results.size() << '\n';
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    const auto& pr = r.results[i];
    const std::string key = "pair." + std::to_string(i);
    out << key << ".outcome = " << to_string(pr.outcome) << '\n';
    if (pr.impl_index) out << key << ".impl = " << *pr.impl_index << '\n';
    if (pr.verdict && pr.verdict->worst) {
      const auto& w = *pr.verdict->worst;
      out << key << ".worst.direction = " << to_string(w.direction) << '\n';
      out << key << ".worst.t = " << format_report(w.point.t) << '\n';
      out << key << ".worst.j = " << w.point.j << '\n';
      out << key << ".worst.best_distance = " << format_report(w.best_distance) << '\n';
    }
  }
}

std::set<std::string> out_set(const Hioa& a, const std::vector<State>& states, const Valuation& inputs) {
  std::set<std::string> out;
  for (const auto& s : states) {
    for (const auto& act : enabled_actions(a, s, inputs)) {
      if (a.action_kind(act) == ActionKind::Output) out.insert(act);
    }
    if (is_agile(a, s, inputs)) out.insert(std::string(kAgilityAction));
  }
  return out;
}

namespace {

InputSignals signals_of(const Hioa& a, const Trajectory& traj) {
  if (a.input_vars().empty()) return {};
  auto idx = index_of(traj.variables(), a.input_vars());
  std::vector<std::vector<double>> times(idx.size(), traj.times());
  std::vector<std::vector<double>> values(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (std::size_t i = 0; i < traj.size(); ++i) values[k].push_back(traj.row(i)[idx[k]].value());
  }
  return InputSignals(a.input_vars(), std::move(times), std::move(values));
}

// Replays one start state; returns the failure reason or empty on success.
std::string replay(const Hioa& a, const Trace& tr, const SimConfig& cfg, double tol, State& state, Valuation& inputs) {
  const auto ext = a.external_vars();
  const auto& trajs = tr.seq.trajectories;
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    const Trajectory& want = trajs[k];
    Trajectory want_ext = [&] {
      try {
        return restrict(want, ext);
      } catch (const DomainError&) {
        throw DomainError("trace lacks external variables of '" + a.name() + "'");
      }
    }();
    InputSignals sig = signals_of(a, want_ext);
    ReplayResult rr = integrate_through(a, state, want_ext.times(), cfg, sig);
    if (!rr.invariant_ok) return "invariant violated while replaying trajectory " + std::to_string(k);
    Trajectory got = restrict(rr.trajectory, ext);
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (!rows_close(got.sample(i), want_ext.sample(i), tol)) {
        return "trajectory " + std::to_string(k) + " diverges at t=" + format_report(got.time(i));
      }
    }
    state = rr.end_state;
    inputs = a.input_vars().empty() ? Valuation{} : restrict(want_ext.lval(), a.input_vars());
    if (k + 1 == trajs.size()) break;

    const std::string& act = tr.seq.actions[k];
    if (!act.empty()) {
      if (!a.has_action(act)) return "action '" + act + "' is not in the signature";
      try {
        state = discrete_step(a, state, act, inputs);
      } catch (const std::exception& e) {
        return e.what();
      }
      continue;
    }
    bool stepped = false;
    for (const auto& hidden : a.internal_actions()) {
      try {
        state = discrete_step(a, state, hidden, inputs);
        stepped = true;
        break;
      } catch (const NotEnabledError&) {
      } catch (const std::exception& e) {
        return e.what();
      }
    }
    if (!stepped) return "no internal action explains the jump after trajectory " + std::to_string(k);
  }
  return {};
}

}  // namespace

AfterResult after(const Hioa& a, const Trace& t, const SimConfig& cfg, double tol) {
  if (!t.seq.trajectories.empty()) t.seq.validate();
  AfterResult result;
  for (const auto& start : a.start_states()) {
    State state = start;
    Valuation inputs;
    if (t.seq.trajectories.empty()) {
      result.states.push_back(state);
      continue;
    }
    std::string why = replay(a, t, cfg, tol, state, inputs);
    if (why.empty()) {
      result.states.push_back(state);
      result.inputs = inputs;
    } else if (result.failure.empty()) {
      result.failure = why;
    }
  }
  if (!result.states.empty()) result.failure.clear();
  return result;
}

std::vector<Trajectory> traj_set(const Hioa& a, const State& s, const std::vector<double>& probes,
                                 const SimConfig& cfg, const Valuation& inputs) {
  InputSignals sig;
  if (!a.input_vars().empty()) sig = InputSignals::constant(restrict(inputs, a.input_vars()));
  std::vector<Trajectory> out;
  out.reserve(probes.size());
  for (double d : probes) out.push_back(integrate_flow(a, s, d, cfg, sig).trajectory);
  return out;
}

bool same_trajectory(const Trajectory& a, const Trajectory& b, const std::vector<std::string>& vars, double tol) {
  if (std::fabs(a.start() - b.start()) > tol || std::fabs(a.end() - b.end()) > tol) return false;
  return samples_agree(restrict(a, vars), restrict(b, vars), tol);
}

std::vector<Trajectory> infilter(const std::vector<Trajectory>& impl, const std::vector<Trajectory>& spec,
                                 const std::vector<std::string>& input_vars, double tol) {
  std::vector<Trajectory> out;
  for (const auto& si : impl) {
    bool keep = std::any_of(spec.begin(), spec.end(), [&](const Trajectory& ss) {
      return input_vars.empty() || same_trajectory(si, ss, input_vars, tol);
    });
    if (keep) out.push_back(si);
  }
  return out;
}

const char* to_string(HiocoFailure f) {
  switch (f) {
    case HiocoFailure::None:
      return "none";
    case HiocoFailure::OutInclusion:
      return "out_inclusion";
    case HiocoFailure::TrajectoryInclusion:
      return "trajectory_inclusion";
    case HiocoFailure::SuiteError:
      return "suite_error";
  }
  return "?";
}

HiocoResult hioco(const Hioa& impl, const Hioa& spec, const std::vector<Trace>& suite, const HiocoOptions& opts) {
  HiocoResult r;
  r.impl_e1 = check_e1(impl);
  const auto ext = spec.external_vars();
  auto fail = [&](HiocoFailure f, std::size_t i, std::string msg) {
    r.conforms = false;
    r.failure = f;
    r.trace_index = i;
    r.message = std::move(msg);
  };
  for (std::size_t i = 0; i < suite.size(); ++i) {
    AfterResult s_after = after(spec, suite[i], opts.sim, opts.replay_tolerance);
    if (s_after.states.empty()) {
      fail(HiocoFailure::SuiteError, i, "not a trace of the specification: " + s_after.failure);
      return r;
    }
    AfterResult i_after = after(impl, suite[i], opts.sim, opts.replay_tolerance);
    if (i_after.states.empty()) continue;

    auto i_out = out_set(impl, i_after.states, i_after.inputs);
    auto s_out = out_set(spec, s_after.states, s_after.inputs);
    if (!opts.include_xi) {
      i_out.erase(std::string(kAgilityAction));
      s_out.erase(std::string(kAgilityAction));
    }
    if (!std::includes(s_out.begin(), s_out.end(), i_out.begin(), i_out.end())) {
      r.impl_out = i_out;
      r.spec_out = s_out;
      std::string extra;
      for (const auto& act : i_out) {
        if (!s_out.contains(act)) extra += (extra.empty() ? "" : ",") + act;
      }
      fail(HiocoFailure::OutInclusion, i, "implementation may output {" + extra + "} which the specification cannot");
      return r;
    }

    std::vector<Trajectory> ti, ts;
    for (const auto& s : i_after.states) {
      for (auto& tr : traj_set(impl, s, opts.probes, opts.sim, i_after.inputs)) ti.push_back(std::move(tr));
    }
    for (const auto& s : s_after.states) {
      for (auto& tr : traj_set(spec, s, opts.probes, opts.sim, s_after.inputs)) ts.push_back(std::move(tr));
    }
    for (const auto& sigma : infilter(ti, ts, spec.input_vars())) {
      bool found = std::any_of(ts.begin(), ts.end(), [&](const Trajectory& s) { return same_trajectory(sigma, s, ext); });
      if (!found) {
        r.impl_out = i_out;
        r.spec_out = s_out;
        r.trajectory = restrict(sigma, ext);
        fail(HiocoFailure::TrajectoryInclusion, i,
             "implementation trajectory of duration " + format_report(sigma.duration()) +
                 " has no counterpart in the specification");
        return r;
      }
    }
  }
  return r;
}

namespace {

std::string set_string(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& x : s) out += (out.size() > 1 ? "," : "") + x;
  return out + "}";
}

}  // namespace

void write_report(std::ostream& out, const HiocoResult& r) {
  out << "verdict = " << (r.conforms ? "conforms" : "does_not_conform") << '\n';
  out << "failure = " << to_string(r.failure) << '\n';
  if (r.trace_index) out << "trace = " << *r.trace_index << '\n';
  if (!r.conforms) {
    out << "impl_out = " << set_string(r.impl_out) << '\n';
    out << "spec_out = " << set_string(r.spec_out) << '\n';
    out << "message = " << r.message << '\n';
  }
  out << "impl_stuttering_inputs = " << r.impl_e1.stutter.size() << '\n';
}

void SemitransConfig::validate() const {
  if (trials == 0) throw DomainError("trials must be > 0");
  if (!(tau_min > 0.0 && tau_min <= tau_max)) throw DomainError("need 0 < tau_min <= tau_max");
  if (!(eps_min > 0.0 && eps_min <= eps_max)) throw DomainError("need 0 < eps_min <= eps_max");
  if (max_vars == 0 || max_segments == 0) throw DomainError("max_vars and max_segments must be > 0");
  if (!(horizon > 0.0) || !(step > 0.0) || step > horizon) throw DomainError("need 0 < step <= horizon");
  if (max_attempts == 0) throw DomainError("max_attempts must be > 0");
}

namespace {

std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  for (auto p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

ATrace random_base_trace(std::uint64_t seed, const SemitransConfig& cfg) {
  auto rng = make_rng({seed});
  const std::size_t nvars = pick(rng, 1, cfg.max_vars);
  const std::size_t nseg = pick(rng, 1, cfg.max_segments);
  const std::size_t nacts = pick(rng, 1, 2);

  // Segment bounds at least one step apart.
  std::vector<double> bounds{0.0};
  {
    std::vector<double> cuts;
    const double slack = cfg.horizon - static_cast<double>(nseg) * cfg.step;
    for (std::size_t k = 0; k + 1 < nseg; ++k) cuts.push_back(uniform(rng, 0.0, std::max(slack, 0.0)));
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k < cuts.size(); ++k) bounds.push_back(cuts[k] + static_cast<double>(k + 1) * cfg.step);
    bounds.push_back(cfg.horizon);
  }

  std::vector<std::string> vars;
  for (std::size_t v = 0; v < nvars; ++v) vars.push_back("v" + std::to_string(v));
  const std::vector<std::string> act_names{"A", "B"};
  for (std::size_t k = 0; k < nacts; ++k) vars.push_back(action_variable(act_names[k]));

  // Each variable is either a sinusoid with per-segment offsets or a
  // first-order relaxation towards a per-segment target.
  struct Shape {
    bool relax;
    double amp, omega, phase, start;
    std::vector<double> level;
  };
  std::vector<Shape> shapes;
  for (std::size_t v = 0; v < nvars; ++v) {
    Shape s{uniform(rng, 0.0, 1.0) < 0.5, uniform(rng, 0.0, 5.0), uniform(rng, 0.1, 3.0), uniform(rng, 0.0, 6.3),
            uniform(rng, 0.0, 20.0), {}};
    for (std::size_t j = 0; j < nseg; ++j) s.level.push_back(uniform(rng, -10.0, 25.0));
    shapes.push_back(std::move(s));
  }
  std::vector<std::ptrdiff_t> fired(nseg, -1);
  for (std::size_t j = 0; j + 1 < nseg; ++j) {
    if (uniform(rng, 0.0, 1.0) < 0.6) fired[j] = static_cast<std::ptrdiff_t>(pick(rng, 0, nacts - 1));
  }

  std::vector<double> relax_value(nvars);
  for (std::size_t v = 0; v < nvars; ++v) relax_value[v] = shapes[v].start;
  std::vector<Trajectory> segs;
  for (std::size_t j = 0; j < nseg; ++j) {
    const double a = bounds[j], b = bounds[j + 1];
    std::vector<double> times;
    for (double t = a; t < b - 1e-9 * cfg.step; t = a + static_cast<double>(times.size()) * cfg.step) times.push_back(t);
    times.push_back(b);
    std::vector<ExtReal> values;
    values.reserve(times.size() * vars.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      for (std::size_t v = 0; v < nvars; ++v) {
        const auto& s = shapes[v];
        if (s.relax) {
          values.emplace_back(s.level[j] + (relax_value[v] - s.level[j]) * std::exp(-(t - a)));
        } else {
          values.emplace_back(s.level[j] + s.amp * std::sin(s.omega * t + s.phase));
        }
      }
      for (std::size_t k = 0; k < nacts; ++k) {
        bool spike = i + 1 == times.size() && fired[j] == static_cast<std::ptrdiff_t>(k);
        values.push_back(spike ? ExtReal::inf() : ExtReal(0.0));
      }
    }
    for (std::size_t v = 0; v < nvars; ++v) {
      if (shapes[v].relax) relax_value[v] = values[(times.size() - 1) * vars.size() + v].value();
    }
    segs.emplace_back(vars, std::move(times), std::move(values));
  }
  return ATrace(vars, std::move(segs));
}

ATrace perturb(const ATrace& base, double tau, double eps, std::uint64_t seed) {
  auto rng = make_rng({seed});
  const double reach = 0.999 * tau;
  const double amp = uniform(rng, 0.0, reach / 2);
  const double offset = amp + uniform(rng, 0.0, reach - 2 * amp);
  const double omega = amp > 0.0 ? uniform(rng, 0.0, std::min(5.0, 0.9 / amp)) : 0.0;
  const double phase = uniform(rng, 0.0, 6.3);
  auto warp = [&](double t) { return t + offset + amp * std::sin(omega * t + phase); };

  std::normal_distribution<double> gauss;
  std::vector<std::size_t> cont;
  for (std::size_t k = 0; k < base.variables().size(); ++k) {
    if (!is_action_variable(base.variables()[k])) cont.push_back(k);
  }
  std::vector<Trajectory> segs;
  for (const auto& seg : base.segments()) {
    std::vector<double> times;
    for (double t : seg.times()) times.push_back(warp(t));
    std::vector<ExtReal> values(seg.data());
    const std::size_t dim = seg.dimension();
    std::vector<double> dir(cont.size());
    for (std::size_t i = 0; i < seg.size(); ++i) {
      double norm = 0.0;
      for (auto& d : dir) {
        d = gauss(rng);
        norm += d * d;
      }
      norm = std::sqrt(norm);
      const double radius = norm > 0.0 ? uniform(rng, 0.0, 0.999 * eps) / norm : 0.0;
      for (std::size_t c = 0; c < cont.size(); ++c) {
        auto& cell = values[i * dim + cont[c]];
        cell = ExtReal(cell.value() + radius * dir[c]);
      }
    }
    segs.emplace_back(seg.variables(), std::move(times), std::move(values));
  }
  return ATrace(base.variables(), std::move(segs));
}

SemitransReport semitrans_check(const SemitransConfig& cfg) {
  cfg.validate();
  struct Outcome {
    std::size_t regenerated = 0;
    bool abandoned = false;
    bool has_actions = false;
    std::optional<SemitransTriple> violation;
  };
  std::vector<Outcome> outcomes(cfg.trials);
  const double horizon = cfg.horizon + 2 * cfg.tau_max + 1.0;
  const std::size_t jumps = cfg.max_segments;

  parallel_for(cfg.trials, cfg.parallel, [&](std::size_t trial) {
    Outcome& o = outcomes[trial];
    for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
      auto rng = make_rng({cfg.seed, trial, attempt});
      SemitransTriple tr;
      tr.trial = trial;
      tr.tau1 = uniform(rng, cfg.tau_min, cfg.tau_max);
      tr.eps1 = uniform(rng, cfg.eps_min, cfg.eps_max);
      tr.tau2 = uniform(rng, cfg.tau_min, cfg.tau_max);
      tr.eps2 = uniform(rng, cfg.eps_min, cfg.eps_max);
      tr.y2 = random_base_trace(rng(), cfg);
      tr.y1 = perturb(tr.y2, tr.tau1, tr.eps1, rng());
      tr.y3 = perturb(tr.y2, tr.tau2, tr.eps2, rng());
      const CheckOptions opts{.parallel = false, .witness = false};
      bool premise = close_ext(tr.y1, tr.y2, {tr.tau1, tr.eps1, horizon, jumps}, opts).close &&
                     close_ext(tr.y2, tr.y3, {tr.tau2, tr.eps2, horizon, jumps}, opts).close;
      if (!premise) {
        ++o.regenerated;
        continue;
      }
      o.has_actions = !tr.y2.actions().empty();
      if (!close_ext(tr.y1, tr.y3, {tr.tau1 + tr.tau2, tr.eps1 + tr.eps2, horizon, jumps}, opts).close) {
        o.violation = std::move(tr);
      }
      return;
    }
    o.abandoned = true;
  });

  SemitransReport report;
  report.trials = cfg.trials;
  for (auto& o : outcomes) {
    report.regenerated += o.regenerated;
    report.abandoned += o.abandoned ? 1 : 0;
    report.with_actions += o.has_actions ? 1 : 0;
    if (o.violation) report.violations.push_back(std::move(*o.violation));
  }
  return report;
}

void write_report(std::ostream& out, const SemitransReport& r, const SemitransConfig& cfg) {
  out << "verdict = " << (r.passed() ? "holds" : "violated") << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "trials = " << r.trials << '\n';
  out << "trials_with_actions = " << r.with_actions << '\n';
  out << "regenerated = " << r.regenerated << '\n';
  out << "abandoned = " << r.abandoned << '\n';
  out << "violations = " << r.violations.size() << '\n';
  for (std::size_t i = 0; i < r.violations.size(); ++i) {
    const auto& v = r.violations[i];
    const std::string key = "violation." + std::to_string(i);
    out << key << ".trial = " << v.trial << '\n';
    out << key << ".tau1 = " << format_report(v.tau1) << '\n';
    out << key << ".eps1 = " << format_report(v.eps1) << '\n';
    out << key << ".tau2 = " << format_report(v.tau2) << '\n';
    out << key << ".eps2 = " << format_report(v.eps2) << '\n';
  }
}

}  // namespace hconf
