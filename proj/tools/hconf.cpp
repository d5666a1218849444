// Command-line front end: simulate, close, conform, hioco, semitrans.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hconf/closeness.hpp"
#include "hconf/conformance.hpp"
#include "hconf/dsl.hpp"
#include "hconf/errors.hpp"
#include "hconf/format.hpp"
#include "hconf/simulate.hpp"
#include "hconf/trace_io.hpp"

namespace fs = std::filesystem;
using namespace hconf;

namespace {

enum Status { kPass = 0, kFail = 1, kInputError = 2, kInternalError = 3 };

struct Common {
  double tau = 0.8;
  double eps = 1.0;
  double T = 10.0;
  std::size_t J = 100;
  double step = 1e-3;
  std::uint64_t seed = 1;
  std::string mode = "extended";
  std::string out;
  std::string policy = "urgent";
  bool parallel = false;
};

ClosenessParams params(const Common& c) {
  ClosenessParams p{c.tau, c.eps, c.T, c.J};
  p.validate();
  return p;
}

SimConfig sim_config(const Common& c) {
  SimConfig cfg;
  cfg.step = c.step;
  if (c.policy == "urgent") {
    cfg.policy = UrgencyPolicy::Urgent;
  } else if (c.policy == "scheduled") {
    cfg.policy = UrgencyPolicy::Scheduled;
  } else {
    throw DomainError("policy must be 'urgent' or 'scheduled'");
  }
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  std::ofstream f(fs::path(c.out) / name);
  if (!f) throw DomainError("cannot write " + (fs::path(c.out) / name).string());
  return f;
}

// Writes `text` to stdout and, with --out, to <out>/<name>.
void emit(const Common& c, const std::string& name, const std::string& text) {
  std::cout << text;
  if (!c.out.empty()) open_out(c, name) << text;
}

Stimulus stimulus_for(const std::string& path, double horizon) {
  if (path.empty()) return Stimulus{{}, {}, horizon};
  return load_stimulus_csv(path, horizon);
}

void write_plot_csv(std::ostream& out, const Hioa& a, const Execution& e) {
  out << "t,j";
  for (const auto& v : a.layout()) out << ',' << v;
  out << '\n';
  for (std::size_t j = 0; j < e.seq.trajectories.size(); ++j) {
    const auto& tr = e.seq.trajectories[j];
    for (std::size_t i = 0; i < tr.size(); ++i) {
      out << format_report(tr.time(i)) << ',' << j;
      for (auto v : tr.row(i)) out << ',' << format_report(v);
      out << '\n';
    }
  }
}

int cmd_simulate(const Common& c, const std::string& model, const std::string& stim_path) {
  Hioa a = load_automaton(model);
  SimConfig cfg = sim_config(c);
  Stimulus stim = stimulus_for(stim_path, c.T);
  Execution e;
  int status = kPass;
  try {
    e = run(a, stim, cfg);
  } catch (const SimulationError& err) {
    std::cerr << "hconf: " << err.what() << '\n';
    e = err.partial();
    status = kFail;
  }
  std::ostringstream summary;
  summary << "automaton = " << a.name() << '\n';
  summary << "horizon = " << format_report(c.T) << '\n';
  summary << "step = " << format_report(cfg.step) << '\n';
  summary << "trajectories = " << e.seq.trajectories.size() << '\n';
  double t = 0.0;
  for (std::size_t k = 0; k < e.seq.actions.size(); ++k) {
    t = e.seq.trajectories[k].end();
    summary << "action." << k << " = " << e.seq.actions[k] << " @ " << format_report(t) << '\n';
  }
  emit(c, "summary.txt", summary.str());
  if (!c.out.empty() && !e.seq.trajectories.empty()) {
    auto plot = open_out(c, "plot.csv");
    write_plot_csv(plot, a, e);
    if (status == kPass) {
      SolutionPair sp = solution_pair(a, e);
      auto trace = open_out(c, "trace.csv");
      write_atrace_csv(trace, trace_to_atrace(trace_of(a, e)));
      auto u = open_out(c, "u.csv");
      write_atrace_csv(u, sp.u);
      auto y = open_out(c, "y.csv");
      write_atrace_csv(y, sp.y);
    }
  }
  return status;
}

int cmd_close(const Common& c, const std::string& f1, const std::string& f2) {
  ClosenessParams p = params(c);
  NormMode mode = parse_norm_mode(c.mode);
  ATrace y1 = load_atrace_csv(f1);
  ATrace y2 = load_atrace_csv(f2);
  auto v = close_check(y1, y2, p, mode, {.parallel = c.parallel, .witness = !c.out.empty()});
  std::ostringstream report;
  write_report(report, v);
  emit(c, "report.txt", report.str());
  if (!c.out.empty() && v.close) {
    auto w = open_out(c, "witness.csv");
    write_witness_csv(w, v);
  }
  return v.close ? kPass : kFail;
}

// A suite is either a manifest of `u.csv y.csv` lines (paths relative to the
// manifest) or a .hioa model simulated under each stimulus.
PairSuite load_suite(const std::string& path, const std::vector<std::string>& stimuli, const Common& c) {
  PairSuite suite;
  if (fs::path(path).extension() == ".hioa") {
    Hioa a = load_automaton(path);
    SimConfig cfg = sim_config(c);
    std::vector<std::string> stims = stimuli.empty() ? std::vector<std::string>{""} : stimuli;
    for (const auto& s : stims) suite.pairs.push_back(solution_pair(a, run(a, stimulus_for(s, c.T), cfg)));
    suite.provenance = Provenance::Simulated;
    return suite;
  }
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  const fs::path dir = fs::path(path).parent_path();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string u, y, extra;
    if (!(ss >> u)) continue;
    if (!(ss >> y) || (ss >> extra)) {
      throw ParseError::in_file(path, ParseError("expected '<u.csv> <y.csv>'", lineno, 1));
    }
    SolutionPair sp{load_atrace_csv(dir / u), load_atrace_csv(dir / y)};
    sp.validate();
    suite.pairs.push_back(std::move(sp));
  }
  suite.provenance = Provenance::Recorded;
  if (suite.pairs.empty()) {
    throw ParseError::in_file(path, ParseError("suite manifest lists no pairs", lineno, 1));
  }
  return suite;
}

int cmd_conform(const Common& c, const std::string& spec_path, const std::string& impl_path,
                const std::vector<std::string>& stimuli) {
  ClosenessParams p = params(c);
  NormMode mode = parse_norm_mode(c.mode);
  PairSuite spec = load_suite(spec_path, stimuli, c);
  PairSuite impl = load_suite(impl_path, stimuli, c);
  auto r = conforms(spec, impl, p, mode, c.parallel);
  std::ostringstream report;
  write_report(report, r);
  emit(c, "report.txt", report.str());
  return r.conforms ? kPass : kFail;
}

int cmd_hioco(const Common& c, const std::string& impl_path, const std::string& spec_path,
              const std::vector<std::string>& traces, const std::vector<std::string>& stimuli,
              const std::vector<double>& probes, bool include_xi) {
  Hioa impl = load_automaton(impl_path);
  Hioa spec = load_automaton(spec_path);
  HiocoOptions opts;
  opts.sim = sim_config(c);
  opts.include_xi = include_xi;
  if (!probes.empty()) opts.probes = probes;
  for (double d : opts.probes) {
    if (!(d >= 0.0)) throw DomainError("probe durations must be >= 0");
  }
  std::vector<Trace> suite;
  for (const auto& f : traces) suite.push_back(atrace_to_trace(load_atrace_csv(f)));
  if (traces.empty()) {
    // Every prefix of the specification's own run under each stimulus.
    std::vector<std::string> stims = stimuli.empty() ? std::vector<std::string>{""} : stimuli;
    for (const auto& s : stims) {
      Trace full = trace_of(spec, run(spec, stimulus_for(s, c.T), opts.sim));
      const Trajectory& first = full.seq.trajectories.front();
      suite.push_back(Trace{{{prefix(first, first.start())}, {}, {}}, full.alphabet});
      for (std::size_t n = 1; n <= full.seq.trajectories.size(); ++n) suite.push_back(trace_prefix(full, n));
    }
  }
  auto r = hioco(impl, spec, suite, opts);
  std::ostringstream report;
  write_report(report, r);
  report << "suite = " << suite.size() << '\n';
  emit(c, "report.txt", report.str());
  if (!c.out.empty() && r.trace_index) {
    auto f = open_out(c, "counterexample.csv");
    write_atrace_csv(f, trace_to_atrace(suite[*r.trace_index]));
  }
  if (r.failure == HiocoFailure::SuiteError) return kInputError;
  return r.conforms ? kPass : kFail;
}

int cmd_semitrans(const Common& c, std::size_t trials) {
  SemitransConfig cfg;
  cfg.trials = trials;
  cfg.seed = c.seed;
  cfg.parallel = c.parallel;
  auto r = semitrans_check(cfg);
  std::ostringstream report;
  write_report(report, r, cfg);
  emit(c, "report.txt", report.str());
  if (!c.out.empty()) {
    for (std::size_t i = 0; i < r.violations.size(); ++i) {
      const auto& v = r.violations[i];
      const std::string stem = "violation_" + std::to_string(v.trial) + "_";
      auto f1 = open_out(c, stem + "y1.csv");
      write_atrace_csv(f1, v.y1);
      auto f2 = open_out(c, stem + "y2.csv");
      write_atrace_csv(f2, v.y2);
      auto f3 = open_out(c, stem + "y3.csv");
      write_atrace_csv(f3, v.y3);
    }
  }
  return r.passed() ? kPass : kFail;
}

void add_common(CLI::App* app, Common& c, bool closeness, bool simulation) {
  if (closeness) {
    app->add_option("--tau", c.tau, "time tolerance")->capture_default_str();
    app->add_option("--eps", c.eps, "value tolerance")->capture_default_str();
    app->add_option("--J", c.J, "maximum jump count checked")->capture_default_str();
    app->add_option("--mode", c.mode, "plain or extended")->capture_default_str()->check(
        CLI::IsMember({"plain", "extended"}));
  }
  app->add_option("--T", c.T, "time horizon")->capture_default_str();
  if (simulation) {
    app->add_option("--step", c.step, "integration step")->capture_default_str();
    app->add_option("--policy", c.policy, "urgent or scheduled")->capture_default_str()->check(
        CLI::IsMember({"urgent", "scheduled"}));
  }
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--out", c.out, "directory for reports and CSV files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformance checks for hybrid I/O automata"};
  app.require_subcommand(1);
  Common c;

  std::string model, stim, f1, f2;
  std::vector<std::string> stimuli, traces;
  std::vector<double> probes;
  bool include_xi = false;
  std::size_t trials = 1000;

  auto* sim = app.add_subcommand("simulate", "simulate an automaton and write trace and plot CSV");
  sim->add_option("model", model, "automaton file")->required();
  sim->add_option("--stimulus", stim, "stimulus CSV (t,kind,name,value)");
  add_common(sim, c, false, true);

  auto* close = app.add_subcommand("close", "check (tau, eps)-closeness of two trace CSV files");
  close->add_option("first", f1, "first trace")->required();
  close->add_option("second", f2, "second trace")->required();
  close->add_flag("--parallel", c.parallel, "check points concurrently");
  add_common(close, c, true, false);

  auto* conform = app.add_subcommand("conform", "check conformance of an implementation suite to a specification");
  conform->add_option("spec", f1, "suite manifest or automaton")->required();
  conform->add_option("impl", f2, "suite manifest or automaton")->required();
  conform->add_option("--stimulus", stimuli, "stimulus CSV for simulated suites (repeatable)");
  conform->add_flag("--parallel", c.parallel, "check pairs concurrently");
  add_common(conform, c, true, true);

  auto* hio = app.add_subcommand("hioco", "check hybrid input-output conformance of two automata");
  hio->add_option("impl", f1, "implementation automaton")->required();
  hio->add_option("spec", f2, "specification automaton")->required();
  hio->add_option("--trace", traces, "suite trace CSV (repeatable); default: the start point and every prefix of the spec run");
  hio->add_option("--stimulus", stimuli, "stimulus CSV for the default suite (repeatable)");
  hio->add_option("--probes", probes, "probe durations in seconds");
  hio->add_flag("--include-xi", include_xi, "count the agility marker as an output");
  add_common(hio, c, false, true);

  auto* semi = app.add_subcommand("semitrans", "randomized semi-transitivity check of extended closeness");
  semi->add_option("--trials", trials, "number of trials")->capture_default_str()->check(CLI::PositiveNumber);
  semi->add_flag("--parallel", c.parallel, "run trials concurrently");
  add_common(semi, c, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kInputError;
  }

  try {
    if (*sim) return cmd_simulate(c, model, stim);
    if (*close) return cmd_close(c, f1, f2);
    if (*conform) return cmd_conform(c, f1, f2, stimuli);
    if (*hio) return cmd_hioco(c, f1, f2, traces, stimuli, probes, include_xi);
    if (*semi) return cmd_semitrans(c, trials);
  } catch (const ParseError& e) {
    std::cerr << "hconf: " << e.what() << '\n';
    return kInputError;
  } catch (const TraceFormatError& e) {
    std::cerr << "hconf: " << e.what() << '\n';
    return kInputError;
  } catch (const ModelError& e) {
    std::cerr << "hconf: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "hconf: " << e.what() << '\n';
    return kInputError;
  } catch (const SimulationError& e) {
    std::cerr << "hconf: " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "hconf: internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}
