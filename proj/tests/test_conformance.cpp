#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "hconf/conformance.hpp"
#include "hconf/dsl.hpp"
#include "hconf/errors.hpp"
#include "properties.hpp"

using namespace hconf;

namespace {

const std::string kModels = HCONF_MODELS_DIR;

Hioa model(const std::string& name) { return load_automaton(kModels + "/" + name + ".hioa"); }

SolutionPair simulate(const Hioa& a, double horizon, std::vector<ScheduledAction> acts = {}) {
  return solution_pair(a, run(a, Stimulus{std::move(acts), {}, horizon}, SimConfig{}));
}

PairSuite suite_of(std::vector<SolutionPair> pairs) { return PairSuite{std::move(pairs), Provenance::Simulated}; }

ClosenessParams params(double tau, double eps) { return {tau, eps, 10.0, 100}; }

Hioa follower() {
  return parse_automaton(R"(
automaton follow
inputs var u
outputs var y
internal var x
location L
  flow x' = u - x
  output y = x
init L x = 0
)");
}

Trace start_trace(double y) {
  Trace t;
  t.seq.trajectories.push_back(Trajectory::point(0.0, Valuation{{"y", y}}));
  t.alphabet = {"ON", "OFF"};
  return t;
}

}  // namespace

TEST_CASE("suites conform to themselves") {
  PairSuite s = suite_of({simulate(build_thermostat(), 10.0), simulate(build_thermostat(), 10.0, {{1.0, "ON"}})});
  for (NormMode mode : {NormMode::Plain, NormMode::Extended}) {
    for (auto p : {params(0.01, 0.01), params(1, 1)}) {
      ConformanceReport r = conforms(s, s, p, mode);
      CHECK(r.conforms);
      REQUIRE(r.results.size() == 2);
      CHECK(r.results[0].outcome == PairOutcome::Matched);
      CHECK(r.results[1].impl_index == std::optional<std::size_t>(1));
    }
  }
}

TEST_CASE("dropping the OFF action") {
  PairSuite spec = suite_of({simulate(build_thermostat(), 10.0)});
  PairSuite impl = suite_of({simulate(model("thermostat_silent_off"), 10.0)});
  CHECK(impl.pairs[0].y.action_variables().empty());
  CHECK(conforms(spec, impl, params(0.8, 1.0), NormMode::Plain).conforms);
  ConformanceReport ext = conforms(spec, impl, params(0.8, 1.0), NormMode::Extended);
  CHECK_FALSE(ext.conforms);
  CHECK(ext.results[0].outcome == PairOutcome::NotClose);
  REQUIRE(ext.results[0].verdict);
  CHECK(ext.results[0].verdict->worst->best_distance.is_inf());
}

TEST_CASE("retimed closed-loop implementation") {
  SolutionPair sp = simulate(model("thermostat_closed"), 10.0);
  CHECK(sp.u.variables().empty());
  SolutionPair ip{shift(sp.u, 0.5), fixture::retimed(sp.y)};
  PairSuite spec = suite_of({sp});
  PairSuite impl = suite_of({ip});
  for (NormMode mode : {NormMode::Plain, NormMode::Extended}) {
    CHECK(conforms(spec, impl, {0.8, 1.0, 10.0, 5}, mode).conforms);
    ConformanceReport bad = conforms(spec, impl, {0.8, 0.4, 10.0, 5}, mode);
    CHECK_FALSE(bad.conforms);
    CHECK(bad.results[0].outcome == PairOutcome::NotClose);
    CHECK(bad.results[0].impl_index == std::optional<std::size_t>(0));
  }
}

TEST_CASE("input coverage failures are distinct") {
  PairSuite spec = suite_of({simulate(build_thermostat(), 10.0, {{0.5, "ON"}})});
  PairSuite impl = suite_of({simulate(build_thermostat(), 10.0)});
  ConformanceReport r = conforms(spec, impl, params(1, 1), NormMode::Extended);
  CHECK_FALSE(r.conforms);
  CHECK(r.results[0].outcome == PairOutcome::NoInputMatch);
  CHECK_FALSE(r.results[0].impl_index);
  std::ostringstream out;
  write_report(out, r);
  CHECK(out.str().rfind("verdict = does_not_conform\nmode = extended\n", 0) == 0);

  CHECK_THROWS_AS(conforms(PairSuite{}, impl, params(1, 1), NormMode::Plain), DomainError);
  PairSuite mixed = suite_of({simulate(build_thermostat(), 10.0), simulate(model("thermostat_silent_off"), 10.0)});
  CHECK_THROWS_AS(mixed.validate(), DomainError);
}

TEST_CASE("input equality") {
  Hioa f = follower();
  auto pair_for = [&](std::vector<double> times, std::vector<double> values) {
    Stimulus s{{}, InputSignals({"u"}, {std::move(times)}, {std::move(values)}), 4.0};
    return solution_pair(f, run(f, s, SimConfig{}));
  };
  SolutionPair a = pair_for({0, 4}, {1, 1});
  SolutionPair b = pair_for({0, 2, 4}, {1, 1, 1});
  SolutionPair c = pair_for({0, 4}, {1, 2});
  CHECK(input_equal(a.u, a.u));
  CHECK(input_equal(a.u, b.u));
  CHECK_FALSE(input_equal(a.u, c.u));
  SolutionPair on_early = simulate(build_thermostat(), 3.0, {{0.5, "ON"}});
  SolutionPair on_late = simulate(build_thermostat(), 3.0, {{0.6, "ON"}});
  CHECK_FALSE(input_equal(on_early.u, on_late.u));
  CHECK(input_equal(on_early.u, on_late.u, 0.2));
  CHECK_FALSE(input_equal(a.u, on_early.u));

  PairSuite spec = suite_of({a, c});
  PairSuite impl = suite_of({c, b});
  ConformanceReport r = conforms(spec, impl, params(0.1, 0.1), NormMode::Extended);
  CHECK(r.conforms);
  CHECK(r.results[0].impl_index == std::optional<std::size_t>(1));
  CHECK(r.results[1].impl_index == std::optional<std::size_t>(0));
}

TEST_CASE("parallel conformance reports match serial ones") {
  std::vector<SolutionPair> pairs;
  for (double t : {0.5, 1.0, 1.5, 2.0}) pairs.push_back(simulate(build_thermostat(), 10.0, {{t, "ON"}}));
  PairSuite spec = suite_of(pairs);
  std::vector<SolutionPair> shifted;
  for (const auto& p : pairs) shifted.push_back(SolutionPair{p.u, fixture::offset_values(p.y, 0.3)});
  PairSuite impl = suite_of(shifted);
  for (double eps : {0.2, 0.5}) {
    std::ostringstream a, b;
    write_report(a, conforms(spec, impl, params(0.5, eps), NormMode::Extended, false));
    write_report(b, conforms(spec, impl, params(0.5, eps), NormMode::Extended, true));
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("out sets") {
  Hioa a = build_thermostat();
  CHECK(out_set(a, {}).empty());
  CHECK(out_set(a, {State{"mode_ON", Valuation{{"x", 5.0}}}}) == std::set<std::string>{"xi"});
  CHECK(out_set(a, {State{"mode_ON", Valuation{{"x", 19.0}}}}) == std::set<std::string>{"OFF", "xi"});
  CHECK(out_set(a, {State{"mode_OFF", Valuation{{"x", 1.0}}}}) == std::set<std::string>{"xi"});
  Hioa stuck = parse_automaton(R"(
automaton stuck
internal var x
location L
  flow x' = 1
  invariant x <= 1
init L x = 0
)");
  CHECK(out_set(stuck, {State{"L", Valuation{{"x", 1.0}}}}).empty());
}

TEST_CASE("after") {
  Hioa a = build_thermostat();
  AfterResult none = after(a, Trace{{}, {"ON", "OFF"}});
  REQUIRE(none.states.size() == 1);
  CHECK(none.states[0] == State{"mode_ON", Valuation{{"x", 5.0}}});

  AfterResult point = after(a, start_trace(5.0));
  REQUIRE(point.states.size() == 1);
  CHECK(point.states[0] == State{"mode_ON", Valuation{{"x", 5.0}}});
  CHECK(after(a, start_trace(6.0)).states.empty());

  Trace alpha = fixture::alpha();
  AfterResult r = after(a, alpha);
  REQUIRE(r.states.size() == 1);
  CHECK(r.failure.empty());
  CHECK(r.states[0].location == "mode_ON");
  // tau_2 ends at the second OFF guard crossing
  CHECK(std::abs(r.states[0].values.at("x").value() - 18.0) < 1e-6);
  CHECK(out_set(a, r.states) == std::set<std::string>{"OFF", "xi"});

  Trace bent = alpha;
  {
    const Trajectory& t0 = bent.seq.trajectories[0];
    std::vector<ExtReal> vals(t0.data());
    for (auto& v : vals) v = v.value() + 0.01;
    bent.seq.trajectories[0] = Trajectory(t0.variables(), t0.times(), std::move(vals));
  }
  AfterResult diverged = after(a, bent);
  CHECK(diverged.states.empty());
  CHECK_FALSE(diverged.failure.empty());

  Trace wrong_action = alpha;
  wrong_action.seq.actions[0] = "ON";
  CHECK(after(a, wrong_action).states.empty());
}

TEST_CASE("trajectory sets") {
  Hioa a = build_thermostat();
  State s0{"mode_ON", Valuation{{"x", 5.0}}};
  auto one = traj_set(a, s0, {1.0});
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0].lval().at("x").value() - (20 - 15 * std::exp(-1.0))) < 1e-6);
  auto zero = traj_set(a, s0, {0.0});
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].size() == 1);
  auto cut = traj_set(a, s0, {5.0});
  REQUIRE(cut.size() == 1);
  CHECK(std::abs(cut[0].end() - std::log(7.5)) < 1e-8);
  CHECK(traj_set(a, s0, {0.5, 1.0, 2.0}).size() == 3);
}

TEST_CASE("infilter") {
  Hioa f = follower();
  State s{"L", Valuation{{"x", 0.0}}};
  auto low = traj_set(f, s, {1.0}, SimConfig{}, Valuation{{"u", 1.0}});
  auto high = traj_set(f, s, {1.0}, SimConfig{}, Valuation{{"u", 2.0}});
  std::vector<Trajectory> impl{low[0], high[0]};
  auto kept = infilter(impl, low, {"u"});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0] == low[0]);
  CHECK(infilter(impl, low, {}).size() == 2);
  CHECK(infilter(impl, {}, {"u"}).empty());
  CHECK(same_trajectory(low[0], low[0], {"x", "u", "y"}));
  CHECK_FALSE(same_trajectory(low[0], high[0], {"y"}));
}

TEST_CASE("hioco verdicts") {
  Hioa spec = build_thermostat();
  SUBCASE("reflexive") {
    HiocoResult r = hioco(spec, spec, props::own_prefixes(spec, 10.0));
    CHECK(r.conforms);
    CHECK(r.failure == HiocoFailure::None);
  }
  SUBCASE("extra output") {
    HiocoResult r = hioco(model("thermostat_extra_on"), spec, {fixture::alpha()});
    CHECK_FALSE(r.conforms);
    CHECK(r.failure == HiocoFailure::OutInclusion);
    CHECK(r.impl_out.contains("ON"));
    CHECK_FALSE(r.spec_out.contains("ON"));
    CHECK(r.trace_index == std::optional<std::size_t>(0));
    std::ostringstream out;
    write_report(out, r);
    CHECK(out.str().rfind("verdict = does_not_conform\nfailure = out_inclusion\ntrace = 0\n", 0) == 0);
  }
  SUBCASE("perturbed flow") {
    HiocoResult r = hioco(model("thermostat_weak"), spec, props::own_prefixes(spec, 10.0));
    CHECK_FALSE(r.conforms);
    CHECK(r.failure == HiocoFailure::TrajectoryInclusion);
    REQUIRE(r.trajectory);
    CHECK(r.trace_index == std::optional<std::size_t>(0));
    // 19 - 14e^{-t} against 20 - 15e^{-t} from the start state
    double t = r.trajectory->end();
    double y = r.trajectory->lval().at("y").value();
    CHECK(std::abs(y - (19 - 14 * std::exp(-t))) < 1e-6);
  }
  SUBCASE("silent implementation of OFF") {
    HiocoResult r = hioco(model("thermostat_silent_off"), spec, {fixture::alpha()});
    CHECK(r.conforms);
  }
  SUBCASE("agility only counts when asked") {
    HiocoOptions opts;
    opts.include_xi = true;
    CHECK(hioco(spec, spec, {fixture::alpha()}, opts).conforms);
  }
  SUBCASE("trace that the specification cannot produce") {
    HiocoResult r = hioco(spec, spec, {start_trace(6.0)});
    CHECK_FALSE(r.conforms);
    CHECK(r.failure == HiocoFailure::SuiteError);
  }
}

TEST_CASE("semi-transitivity harness") {
  SemitransConfig cfg;
  cfg.trials = 40;
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("degenerate bounds") {
    cfg.tau_min = cfg.tau_max = 1e-6;
    cfg.eps_min = cfg.eps_max = 1e-6;
    SemitransReport r = semitrans_check(cfg);
    CHECK(r.passed());
    CHECK(r.trials == 40);
  }
  SUBCASE("serial and parallel reports are identical") {
    std::ostringstream a, b;
    write_report(a, semitrans_check(cfg), cfg);
    cfg.parallel = true;
    write_report(b, semitrans_check(cfg), cfg);
    CHECK(a.str() == b.str());
  }
  SUBCASE("generator") {
    ATrace base = random_base_trace(7, cfg);
    CHECK(base == random_base_trace(7, cfg));
    CHECK_FALSE(base == random_base_trace(8, cfg));
    CHECK(base.domain().start() == 0.0);
    CHECK(base.domain().end() == doctest::Approx(cfg.horizon));
    ATrace y = perturb(base, 0.3, 0.2, 11);
    ClosenessParams p{0.3, 0.2, 100.0, 100};
    CHECK(close_ext(y, base, p).close);
    CHECK(y.actions().size() == base.actions().size());
  }
  SUBCASE("invalid configurations") {
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.trials = 1;
    cfg.tau_min = 2;
    CHECK_THROWS_AS(semitrans_check(cfg), DomainError);
  }
}

TEST_CASE("action points compose within the summed window") {
  // y2 fires A at 1.0; y1 at 1.25 and y3 at 0.75
  auto trace = [](double at) {
    std::vector<std::string> vars{"v", action_variable("A")};
    std::vector<double> t0, t1;
    for (int i = 0; i <= 64; ++i) t0.push_back(at * i / 64);
    for (int i = 0; i <= 64; ++i) t1.push_back(at + (4 - at) * i / 64);
    std::vector<ExtReal> v0, v1;
    for (std::size_t i = 0; i < t0.size(); ++i) {
      v0.emplace_back(1.0);
      v0.push_back(i + 1 == t0.size() ? ExtReal::inf() : ExtReal(0.0));
    }
    for (std::size_t i = 0; i < t1.size(); ++i) {
      v1.emplace_back(1.0);
      v1.emplace_back(0.0);
    }
    return ATrace(vars, {Trajectory(vars, t0, v0), Trajectory(vars, t1, v1)});
  };
  ATrace y1 = trace(1.25), y2 = trace(1.0), y3 = trace(0.75);
  CHECK(close_ext(y1, y2, {0.25, 0.1, 10, 10}).close);
  CHECK(close_ext(y2, y3, {0.25, 0.1, 10, 10}).close);
  CHECK(close_ext(y1, y3, {0.5, 0.2, 10, 10}).close);
  CHECK_FALSE(close_ext(y1, y3, {0.49, 0.2, 10, 10}).close);
}
