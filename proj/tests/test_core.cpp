#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "hconf/errors.hpp"
#include "hconf/ext_real.hpp"
#include "hconf/format.hpp"
#include "hconf/hybrid.hpp"
#include "hconf/trace_io.hpp"
#include "hconf/trajectory.hpp"
#include "hconf/valuation.hpp"

using namespace hconf;

namespace {

const ExtReal kInf = ExtReal::inf();

Trajectory constant(std::vector<std::string> vars, double a, double b, std::vector<ExtReal> row) {
  std::vector<ExtReal> values(row);
  values.insert(values.end(), row.begin(), row.end());
  return Trajectory(std::move(vars), {a, b}, std::move(values));
}

Trajectory ramp(double a, double b, double va, double vb) { return Trajectory({"x"}, {a, b}, {va, vb}); }

}  // namespace

TEST_CASE("extended reals order infinity above every finite value") {
  CHECK(kInf > ExtReal(1e308));
  CHECK(ExtReal(-5) < ExtReal(3));
  CHECK(kInf == ExtReal::inf());
  CHECK(kInf.is_inf());
  CHECK(ExtReal(2.5).is_finite());
}

TEST_CASE("absolute difference over extended reals") {
  CHECK(abs_diff(kInf, kInf) == ExtReal(0.0));
  CHECK(abs_diff(kInf, 3.0).is_inf());
  CHECK(abs_diff(3.0, kInf).is_inf());
  CHECK(abs_diff(-2.0, 5.0) == ExtReal(7.0));
  CHECK(abs_diff(5.0, -2.0) == abs_diff(-2.0, 5.0));
}

TEST_CASE("number formatting and parsing") {
  CHECK(format_exact(0.1) == "0.1");
  CHECK(parse_double(format_exact(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_report(2.014903020542265) == "2.01490302");
  CHECK(format_report(kInf) == "inf");
  CHECK(to_string(kInf) == "inf");
  CHECK(parse_ext_real("inf").is_inf());
  CHECK(parse_ext_real("INF").is_inf());
  CHECK(parse_ext_real("+2.5") == ExtReal(2.5));
  CHECK_THROWS_AS(parse_double("1.5x"), DomainError);
  CHECK_THROWS_AS(parse_double(""), DomainError);
}

TEST_CASE("valuation restriction") {
  Valuation v{{"x", 5.0}, {"y", 5.0}};
  CHECK(restrict(v, std::vector<std::string>{"y"}) == Valuation{{"y", 5.0}});
  Valuation single{{"x", 3.0}};
  CHECK(restrict(single, std::vector<std::string>{"x"}) == single);
  Valuation w{{"x", 5.0}, {"y", 2.0}, {"z", kInf}};
  CHECK(restrict(w, std::vector<std::string>{"y", "z"}) == Valuation{{"y", 2.0}, {"z", kInf}});
  CHECK_THROWS_AS(restrict(v, std::vector<std::string>{"q"}), DomainError);
  CHECK_THROWS_AS(v.at("q"), DomainError);
  CHECK_THROWS_AS(Valuation({"x", "x"}, {1.0, 2.0}), DomainError);
}

TEST_CASE("valuation comparison within tolerance") {
  Valuation a{{"x", 1.0}, {"a", kInf}};
  Valuation b{{"x", 1.0 + 1e-12}, {"a", kInf}};
  CHECK(approx_equal(a, b));
  CHECK_FALSE(approx_equal(a, Valuation{{"x", 1.0}, {"a", 0.0}}));
  CHECK_FALSE(approx_equal(a, Valuation{{"a", kInf}, {"x", 1.0}}));
}

TEST_CASE("trajectory construction is validated") {
  CHECK_THROWS_AS(Trajectory({"x"}, {}, {}), DomainError);
  CHECK_THROWS_AS(Trajectory({"x"}, {0.0, 0.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(Trajectory({"x"}, {1.0, 0.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(Trajectory({"x"}, {0.0, 1.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(Trajectory({"x", "x"}, {0.0}, {1.0, 1.0}), DomainError);
  auto p = Trajectory::point(2.0, Valuation{{"x", 4.0}});
  CHECK(p.size() == 1);
  CHECK(p.duration() == 0.0);
  CHECK(p.fval() == p.lval());
}

TEST_CASE("trajectory interpolation") {
  Trajectory t = ramp(0.0, 2.0, 0.0, 4.0);
  CHECK(t.at(0.5).at("x") == ExtReal(1.0));
  CHECK(t.fval().at("x") == ExtReal(0.0));
  CHECK(t.lval().at("x") == ExtReal(4.0));
  CHECK_THROWS_AS(t.at(2.5), DomainError);
  Trajectory spike({"a"}, {0.0, 1.0}, {0.0, kInf});
  CHECK(spike.at(0.5).at("a") == ExtReal(0.0));
  CHECK(spike.at(1.0).at("a").is_inf());
}

TEST_CASE("trajectory restriction") {
  auto c = constant({"x", "y"}, 0.0, 1.0, {1.0, 2.0});
  auto r = restrict(c, std::vector<std::string>{"x"});
  CHECK(r == constant({"x"}, 0.0, 1.0, {1.0}));
  CHECK(restrict(c, c.variables()) == c);

  auto e = fixture::thermostat_run(1.0);
  Hioa a = build_thermostat();
  const auto& full = e.seq.trajectories.front();
  auto ext = restrict(full, std::vector<std::string>{"y"});
  REQUIRE(ext.size() == full.size());
  for (std::size_t i = 0; i < full.size(); ++i) CHECK(ext.row(i)[0] == full.sample(i).at("y"));
}

TEST_CASE("shift") {
  auto s = ramp(0.0, 1.0, 5.0, 6.0);
  CHECK(shift(s, 0.0) == s);
  auto moved = shift(s, 2.0);
  CHECK(moved.start() == 2.0);
  CHECK(moved.end() == 3.0);
  CHECK(moved.fval().at("x") == ExtReal(5.0));
  CHECK(shift(shift(s, 1.0), 2.0) == shift(s, 3.0));
}

TEST_CASE("suffix") {
  auto s = Trajectory({"x"}, {1.0, 2.0, 3.0}, {1.0, 2.0, 4.0});
  CHECK(suffix(s, 1.0) == shift(s, -1.0));
  auto last = suffix(s, 3.0);
  CHECK(last.size() == 1);
  CHECK(last.start() == 0.0);
  CHECK(last.fval().at("x") == ExtReal(4.0));
  auto mid = suffix(s, 2.5);
  CHECK(mid.start() == 0.0);
  CHECK(mid.fval().at("x") == ExtReal(3.0));
  CHECK(mid.end() == doctest::Approx(0.5));
  CHECK_THROWS_AS(suffix(s, 3.5), DomainError);
  // suffix undoes shift
  CHECK(suffix(shift(s, 4.0), 5.0) == shift(s, -1.0 + 0.0));

  auto e = fixture::thermostat_run(2.0);
  auto tail = suffix(e.seq.trajectories.front(), 1.0);
  CHECK(tail.fval().at("x").value() == doctest::Approx(20.0 - 15.0 * std::exp(-1.0)).epsilon(1e-9));
  CHECK(tail.fval().at("x").value() == doctest::Approx(14.482).epsilon(1e-4));
}

TEST_CASE("prefix and concatenation") {
  auto a = ramp(0.0, 1.0, 0.0, 1.0);
  auto b = ramp(1.0, 2.0, 1.0, 3.0);
  auto ab = concat(a, b);
  CHECK(ab.start() == 0.0);
  CHECK(ab.end() == 2.0);
  CHECK(ab.size() == 3);
  CHECK(prefix(ab, a.end()) == a);
  CHECK(is_prefix(a, ab));

  CHECK_THROWS_AS(concat(a, ramp(1.5, 2.0, 1.0, 2.0)), ConcatError);
  CHECK_THROWS_AS(concat(a, ramp(0.5, 2.0, 1.0, 2.0)), ConcatError);
  CHECK_THROWS_AS(concat(a, ramp(1.0, 2.0, 1.5, 2.0)), StateMismatchError);
  CHECK_NOTHROW(concat(a, ramp(1.0, 2.0, 1.0 + 1e-12, 2.0)));

  // thermostat heating curve does not continue into a state with x reset
  auto e = fixture::thermostat_run(3.0);
  const auto& heat = e.seq.trajectories.front();
  auto jumped = Trajectory(heat.variables(), {heat.end(), heat.end() + 1.0}, {0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(concat(heat, jumped), StateMismatchError);
}

TEST_CASE("is_prefix") {
  auto five = constant({"x"}, 0.0, 1.0, {5.0});
  CHECK(is_prefix(five, five));
  CHECK(is_prefix(five, constant({"x"}, 0.0, 2.0, {5.0})));
  CHECK_FALSE(is_prefix(five, constant({"x"}, 0.0, 2.0, {6.0})));
  CHECK_FALSE(is_prefix(constant({"x"}, 0.0, 2.0, {5.0}), five));
}

TEST_CASE("hybrid time domain") {
  HybridTimeDomain d({0.0, 1.0, 1.0, 3.0});
  CHECK(d.segments() == 3);
  CHECK(d.segment(1) == std::pair{1.0, 1.0});
  CHECK(HybridTimeDomain().empty());
  CHECK_THROWS_AS(HybridTimeDomain({0.0, 2.0, 1.0}), TraceFormatError);
  CHECK_THROWS_AS(HybridTimeDomain({-1.0, 2.0}), TraceFormatError);
}

TEST_CASE("a-trace invariants") {
  std::vector<std::string> vars{"y", "act:OFF"};
  auto s0 = Trajectory(vars, {0.0, 1.0}, {1.0, 0.0, 2.0, kInf});
  auto s1 = Trajectory(vars, {1.0, 2.0}, {2.0, 0.0, 1.0, 0.0});
  ATrace ok(vars, {s0, s1});
  CHECK(ok.num_segments() == 2);
  CHECK(ok.num_points() == 4);
  REQUIRE(ok.actions().size() == 1);
  CHECK(ok.actions()[0] == ActionOccurrence{"OFF", 0, 1.0});
  CHECK(ok.continuous_variables() == std::vector<std::string>{"y"});
  CHECK(ok.action_variables() == std::vector<std::string>{"act:OFF"});

  SUBCASE("gap between segments") {
    auto late = Trajectory(vars, {1.5, 2.0}, {2.0, 0.0, 1.0, 0.0});
    CHECK_THROWS_AS(ATrace(vars, {s0, late}), TraceFormatError);
  }
  SUBCASE("action value other than 0 or inf") {
    auto bad = Trajectory(vars, {0.0, 1.0}, {1.0, 0.5, 2.0, 0.0});
    CHECK_THROWS_AS(ATrace(vars, {bad}), TraceFormatError);
  }
  SUBCASE("action spike before the closing sample") {
    auto early = Trajectory(vars, {0.0, 1.0}, {1.0, kInf, 2.0, 0.0});
    CHECK_THROWS_AS(ATrace(vars, {early}), TraceFormatError);
  }
  SUBCASE("two actions at one point") {
    std::vector<std::string> two{"act:A", "act:B"};
    auto both = Trajectory(two, {0.0, 1.0}, {0.0, 0.0, kInf, kInf});
    CHECK_THROWS_AS(ATrace(two, {both}), TraceFormatError);
  }
}

TEST_CASE("trace to a-trace") {
  SUBCASE("single trajectory without actions") {
    Trace t{{{ramp(0.0, 1.0, 0.0, 1.0)}, {}, {}}, {"ON", "OFF"}};
    ATrace a = trace_to_atrace(t);
    CHECK(a.num_segments() == 1);
    CHECK(a.actions().empty());
    CHECK(a.variables() == std::vector<std::string>{"x", "act:ON", "act:OFF"});
  }
  SUBCASE("thermostat trace with OFF then ON") {
    Trace alpha = fixture::alpha();
    ATrace a = trace_to_atrace(alpha);
    CHECK(a.num_segments() == 3);
    auto acts = a.actions();
    REQUIRE(acts.size() == 2);
    CHECK(acts[0].action == "OFF");
    CHECK(acts[0].segment == 0);
    CHECK(acts[1].action == "ON");
    CHECK(a.domain().bounds()[1] == doctest::Approx(std::log(7.5)).epsilon(1e-9));
    CHECK(a.domain().bounds()[2] == doctest::Approx(std::log(7.5) + std::log(9.0)).epsilon(1e-9));
    double total = 0.0;
    for (const auto& tr : alpha.seq.trajectories) total += tr.duration();
    CHECK(a.domain().end() == doctest::Approx(total).epsilon(1e-12));
    // and back again
    Trace back = atrace_to_trace(a);
    CHECK(back.seq.actions == alpha.seq.actions);
    CHECK(back.alphabet == alpha.alphabet);
  }
  SUBCASE("two trajectories, first one OFF") {
    Trace t = trace_prefix(fixture::alpha(), 2);
    ATrace a = trace_to_atrace(t);
    REQUIRE(a.num_segments() == 2);
    auto off = a.segment(0).lval();
    CHECK(off.at("act:OFF").is_inf());
    CHECK(off.at("act:ON") == ExtReal(0.0));
  }
  SUBCASE("trajectories starting at 0 are laid end to end") {
    Trace t{{{ramp(0.0, 1.0, 0.0, 1.0), ramp(0.0, 2.0, 1.0, 1.0)}, {"OFF"}, {}}, {"OFF"}};
    ATrace a = trace_to_atrace(t);
    CHECK(a.domain().bounds() == std::vector<double>{0.0, 1.0, 3.0});
  }
  SUBCASE("undeclared action is ill-formed") {
    Trace t{{{ramp(0.0, 1.0, 0.0, 1.0), ramp(1.0, 2.0, 1.0, 1.0)}, {"ON"}, {}}, {"OFF"}};
    CHECK_THROWS_AS(trace_to_atrace(t), TraceFormatError);
  }
  SUBCASE("open non-final trajectory is ill-formed") {
    Trace t{{{ramp(0.0, 1.0, 0.0, 1.0), ramp(1.0, 3.0, 1.0, 1.0)}, {"OFF"}, {true, false}}, {"OFF"}};
    CHECK_THROWS_AS(trace_to_atrace(t), TraceFormatError);
  }
}

TEST_CASE("solution pair domains must agree") {
  auto y = fixture::thermostat_y(3.0);
  SolutionPair ok{restrict(y, std::vector<std::string>{}), y};
  CHECK_NOTHROW(ok.validate());
  SolutionPair bad{shift(restrict(y, std::vector<std::string>{}), 1.0), y};
  CHECK_THROWS_AS(bad.validate(), TraceFormatError);
}

TEST_CASE("trace CSV round trip is exact") {
  auto y = fixture::thermostat_y(10.0);
  std::stringstream ss;
  write_atrace_csv(ss, y);
  std::string text = ss.str();
  CHECK(text.rfind("t,j,y,act:OFF\n", 0) == 0);
  CHECK(text.find(",inf\n") != std::string::npos);
  ATrace back = read_atrace_csv(ss);
  CHECK(back == y);
}

TEST_CASE("trace CSV errors carry the line") {
  auto expect_error = [](const std::string& text, const std::string& fragment) {
    std::istringstream in(text);
    try {
      read_atrace_csv(in);
      FAIL("no error for: " << text);
    } catch (const TraceFormatError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
    }
  };
  expect_error("", "header");
  expect_error("x,j,y\n", "header");
  expect_error("t,j,y\n0,0,1\n1,0,abc\n", "line 3");
  expect_error("t,j,y\n0,0,1\n1,2,1\n", "line 3");
  expect_error("t,j,y\n0,0,1\n1,0\n", "line 3");
  expect_error("t,j,act:A,y\n0,0,0,1\n", "");
  expect_error("t,j,y,act:A\n0,0,1,2\n", "");
}
