// Acceptance checks: one PASS/FAIL line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "fixtures.hpp"
#include "hconf/closeness.hpp"
#include "hconf/conformance.hpp"
#include "hconf/dsl.hpp"
#include "oracles.hpp"
#include "properties.hpp"
#include "random_traces.hpp"

using namespace hconf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool ok = false;
  std::string detail;
};

// 1. Retimed thermostat pair: close at (0.8, 1), not at (0.8, 0.4), the
// worst unmatched point of the first trace sitting on a y1 = 18 peak.
Outcome retimed_pair() {
  auto start = Clock::now();
  ATrace y1 = fixture::thermostat_y(10.0);
  ATrace y2 = fixture::retimed(y1);
  auto loose = close_plain(y1, y2, {0.8, 1.0, 10.0, 5});
  auto tight = close_plain(y1, y2, {0.8, 0.4, 10.0, 5});
  double elapsed = seconds_since(start);

  double y2_max = -1e300;
  for (const auto& seg : y2.segments()) {
    for (std::size_t i = 0; i < seg.size(); ++i) y2_max = std::max(y2_max, seg.row(i)[0].value());
  }
  bool peak = false;
  double y1_at = 0, gap = 0;
  if (tight.worst_first) {
    const auto& w = *tight.worst_first;
    y1_at = y1.segment(w.point.j).at(w.point.t).values()[0].value();
    gap = w.best_distance.value();
    peak = std::fabs(y1_at - 18.0) <= 1e-6 && gap >= 1.0 - 1e-6;
  }
  bool ok = loose.close && !tight.close && peak && std::fabs(y2_max - 17.0) <= 1e-6 && elapsed < 1.0;
  char buf[256];
  std::snprintf(buf, sizeof buf, "eps=1 %s, eps=0.4 %s, worst y1=%.9g gap=%.9g, max y2=%.9g, %.3fs",
                loose.close ? "close" : "not close", tight.close ? "close" : "not close", y1_at, gap, y2_max, elapsed);
  return {ok, buf};
}

double max_error_vs_closed_form(const Execution& e) {
  double err = 0.0;
  for (const auto& tr : e.seq.trajectories) {
    for (std::size_t i = 0; i < tr.size(); ++i) {
      err = std::max(err, std::fabs(tr.row(i)[0].value() - oracle::thermostat(tr.time(i)).x));
    }
  }
  return err;
}

// 2. RK4 at h = 1e-3 against closed forms, and switch times.
Outcome thermostat_numerics() {
  auto start = Clock::now();
  Execution e = fixture::thermostat_run(10.0);
  double err = max_error_vs_closed_form(e);
  double elapsed = seconds_since(start);
  auto exact = oracle::thermostat_switch_times(10.0);
  bool times_ok = e.seq.actions.size() == exact.size() && exact.size() >= 2;
  double worst_dt = 0.0;
  for (std::size_t k = 0; times_ok && k < exact.size(); ++k) {
    worst_dt = std::max(worst_dt, std::fabs(e.seq.trajectories[k].end() - exact[k]));
  }
  times_ok = times_ok && std::fabs(e.seq.trajectories[0].end() - std::log(7.5)) <= 1e-6 &&
             std::fabs(e.seq.trajectories[1].end() - (std::log(7.5) + std::log(9.0))) <= 1e-6 && worst_dt <= 1e-6;
  char buf[256];
  std::snprintf(buf, sizeof buf, "max |x - closed form| = %.3g, switch time error = %.3g, %.3fs", err, worst_dt,
                elapsed);
  return {err <= 1e-6 && times_ok && elapsed < 1.0, buf};
}

// 3. Error ratio when halving the step, on the full switching run over
// [0, 10] (event location tightened so it does not mask the integrator error)
// and on the heating flow alone.
Outcome convergence_order() {
  Hioa a = build_thermostat();
  auto run_err = [&](double h) {
    SimConfig cfg;
    cfg.step = h;
    cfg.event_tolerance = 1e-13;
    return max_error_vs_closed_form(fixture::thermostat_run(10.0, cfg));
  };
  auto flow_err = [&](double h) {
    SimConfig cfg;
    cfg.step = h;
    cfg.policy = UrgencyPolicy::Scheduled;
    auto fr = integrate_flow(a, a.start_states().front(), 10.0, cfg);
    double err = 0.0;
    for (std::size_t i = 0; i < fr.trajectory.size(); ++i) {
      double t = fr.trajectory.time(i);
      err = std::max(err, std::fabs(fr.trajectory.row(i)[0].value() - (20.0 - 15.0 * std::exp(-t))));
    }
    return err;
  };
  double run_ratio = run_err(1e-2) / run_err(5e-3);
  double flow_ratio = flow_err(1e-2) / flow_err(5e-3);
  char buf[256];
  std::snprintf(buf, sizeof buf, "switching run ratio = %.3f, heating flow ratio = %.3f", run_ratio, flow_ratio);
  auto in_range = [](double r) { return r >= 12.0 && r <= 20.0; };
  return {in_range(run_ratio) && in_range(flow_ratio), buf};
}

// 4. Trace with OFF against the same samples without the OFF marks.
Outcome action_separation() {
  ATrace y = fixture::thermostat_y(10.0);
  ATrace twin = fixture::without_action_marks(y);
  bool plain = close_plain(y, twin, {0.8, 1.0, 10.0, 5}).close;
  bool ext_rejects = true;
  for (double eps : {1.0, 10.0, 1000.0}) ext_rejects = ext_rejects && !close_ext(y, twin, {0.8, eps, 10.0, 5}).close;
  ExtReal m = min_epsilon(y, twin, 0.8, 10.0, 5, NormMode::Extended);
  char buf[256];
  std::snprintf(buf, sizeof buf, "plain %s, extended rejects eps in {1,10,1000}: %s, min eps = %s",
                plain ? "accepts" : "rejects", ext_rejects ? "yes" : "no", to_string(m).c_str());
  return {plain && ext_rejects && m.is_inf(), buf};
}

// 5. out(S after alpha) and an implementation with an extra ON output.
Outcome hioco_example() {
  Hioa spec = build_thermostat();
  Hioa impl = load_automaton(std::string(HCONF_MODELS_DIR) + "/thermostat_extra_on.hioa");
  Trace alpha = fixture::alpha();
  AfterResult s_after = after(spec, alpha);
  if (s_after.states.size() != 1) return {false, "after(S, alpha) is not a single state: " + s_after.failure};
  auto outs = out_set(spec, s_after.states);
  auto real = outs;
  real.erase(std::string(kAgilityAction));
  auto r = hioco(impl, spec, {alpha});
  bool ok = real == std::set<std::string>{"OFF"} && outs == std::set<std::string>{"OFF", "xi"} && !r.conforms &&
            r.failure == HiocoFailure::OutInclusion && r.impl_out.contains("ON") && !r.spec_out.contains("ON");
  char buf[256];
  std::snprintf(buf, sizeof buf, "state after alpha: %s; out = {OFF%s}; hioco: %s (%s)",
                to_string(s_after.states.front()).c_str(), outs.contains("xi") ? ",xi" : "",
                r.conforms ? "conforms" : "does not conform", to_string(r.failure));
  return {ok, buf};
}

// 6. Randomized semi-transitivity of extended closeness.
Outcome semi_transitivity() {
  auto start = Clock::now();
  SemitransConfig cfg;
  cfg.trials = 1000;
  cfg.seed = 2024;
  cfg.parallel = true;
  auto r = semitrans_check(cfg);
  double elapsed = seconds_since(start);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu trials (%zu with actions), %zu violations, %zu regenerated, %zu abandoned, %.2fs",
                r.trials, r.with_actions, r.violations.size(), r.regenerated, r.abandoned, elapsed);
  return {r.passed() && r.with_actions > 0 && elapsed < 30.0, buf};
}

// 7. Windowed checker against the serial reference and the brute-force oracle.
Outcome oracle_equivalence() {
  gen::Rng rng(7);
  std::size_t cases = 0, boundary = 0, disagreements = 0, on_tau = 0, on_eps = 0;
  for (auto mode : {NormMode::Plain, NormMode::Extended}) {
    for (int i = 0; i < 500; ++i) {
      auto c = gen::random_case(rng, i % 2 == 1);
      bool windowed = close_check(c.y1, c.y2, c.p, mode).close;
      bool parallel = close_check(c.y1, c.y2, c.p, mode, {.parallel = true, .witness = false}).close;
      bool naive = close_naive(c.y1, c.y2, c.p, mode).close;
      bool brute = oracle::close(c.y1, c.y2, c.p.tau, c.p.eps, c.p.horizon, c.p.max_jumps, mode == NormMode::Extended);
      ++cases;
      if (i % 2 == 1) ++boundary;
      if (windowed != naive || windowed != brute || parallel != windowed) ++disagreements;
      // Count cases whose verdict hinges on an exact boundary.
      auto nudged = c.p;
      nudged.tau = std::nextafter(c.p.tau, 0.0);
      if (close_naive(c.y1, c.y2, nudged, mode).close != naive) ++on_tau;
      nudged = c.p;
      nudged.eps = std::nextafter(c.p.eps, 0.0);
      if (close_naive(c.y1, c.y2, nudged, mode).close != naive) ++on_eps;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%zu cases (%zu boundary-seeded; %zu decided by a gap exactly tau, %zu by a distance exactly eps), "
                "%zu disagreements",
                cases, boundary, on_tau, on_eps, disagreements);
  return {disagreements == 0 && on_tau > 0 && on_eps > 0, buf};
}

// 8. Property suites, 200 seeded instances each.
Outcome property_suites() {
  const std::size_t n = 200;
  const std::pair<const char*, std::function<std::string()>> suites[] = {
      {"reflexivity", [&] { return props::reflexivity(11, n); }},
      {"symmetry", [&] { return props::symmetry(12, n); }},
      {"monotonicity", [&] { return props::monotonicity(13, n); }},
      {"extended-implies-plain", [&] { return props::extended_implies_plain(14, n); }},
      {"hioco reflexivity", [&] { return props::hioco_reflexivity(15, n); }},
      {"T1-T3 closure", [&] { return props::closure(16, n); }},
  };
  std::string failures;
  for (const auto& [name, check] : suites) {
    std::string why = check();
    if (!why.empty()) failures += (failures.empty() ? "" : "; ") + why;
  }
  return {failures.empty(), failures.empty() ? "6 suites x 200 instances" : failures};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"retimed thermostat pair (tau=0.8: eps=1 close, eps=0.4 not)", retimed_pair},
      {"thermostat numerics vs closed forms", thermostat_numerics},
      {"RK4 order of convergence", convergence_order},
      {"action-sensitivity separation", action_separation},
      {"hioco example", hioco_example},
      {"semi-transitivity, 1000 trials", semi_transitivity},
      {"windowed checker vs reference, 500 pairs per mode", oracle_equivalence},
      {"property suites", property_suites},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d. %s: %s\n", o.ok ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
