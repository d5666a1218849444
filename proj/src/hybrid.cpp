#include "hconf/hybrid.hpp"

#include <algorithm>
#include <cmath>

#include "hconf/errors.hpp"
#include "hconf/format.hpp"

namespace hconf {

std::string action_variable(std::string_view action) { return std::string(kActionPrefix) + std::string(action); }

bool is_action_variable(std::string_view var) { return var.starts_with(kActionPrefix); }

std::string action_name(std::string_view var) {
  if (!is_action_variable(var)) throw DomainError("not an action variable: '" + std::string(var) + "'");
  return std::string(var.substr(kActionPrefix.size()));
}

HybridTimeDomain::HybridTimeDomain(std::vector<double> bounds) : bounds_(std::move(bounds)) {
  if (bounds_.empty()) return;
  if (!(bounds_.front() >= 0.0)) throw TraceFormatError("hybrid time domain must start at t >= 0");
  for (std::size_t i = 1; i < bounds_.size(); ++i) {
    if (!(bounds_[i] >= bounds_[i - 1])) throw TraceFormatError("hybrid time domain bounds must be non-decreasing");
  }
}

bool approx_equal(const HybridTimeDomain& a, const HybridTimeDomain& b, double tol) {
  if (a.segments() != b.segments()) return false;
  if (a.empty()) return true;
  for (std::size_t i = 0; i < a.bounds().size(); ++i) {
    if (std::fabs(a.bounds()[i] - b.bounds()[i]) > tol) return false;
  }
  return true;
}

ATrace::ATrace(std::vector<std::string> variables, std::vector<Trajectory> segments)
    : vars_(std::move(variables)), segments_(std::move(segments)) {
  try {
    require_distinct(vars_);
  } catch (const DomainError& e) {
    throw TraceFormatError(e.what());
  }
  if (segments_.empty()) return;

  std::vector<std::size_t> action_cols;
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    if (is_action_variable(vars_[k])) action_cols.push_back(k);
  }

  std::vector<double> bounds;
  bounds.push_back(segments_.front().start());
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const auto& seg = segments_[j];
    if (seg.variables() != vars_) throw TraceFormatError("segment " + std::to_string(j) + " has a different variable list");
    if (j > 0 && std::fabs(seg.start() - bounds.back()) > kMergeTolerance) {
      throw TraceFormatError("segment " + std::to_string(j) + " does not start where segment " + std::to_string(j - 1) +
                             " ends (" + format_report(seg.start()) + " vs " + format_report(bounds.back()) + ")");
    }
    bounds.push_back(seg.end());
    for (std::size_t i = 0; i < seg.size(); ++i) {
      auto row = seg.row(i);
      int infinite = 0;
      for (auto k : action_cols) {
        ExtReal v = row[k];
        if (v.is_inf()) {
          ++infinite;
          if (i + 1 != seg.size()) {
            throw TraceFormatError("action " + vars_[k] + " is inf before the closing point of segment " + std::to_string(j));
          }
        } else if (v.value() != 0.0) {
          throw TraceFormatError("action variable " + vars_[k] + " must be 0 or inf");
        }
      }
      if (infinite > 1) throw TraceFormatError("two actions fire at the same point of segment " + std::to_string(j));
    }
  }
  domain_ = HybridTimeDomain(std::move(bounds));
}

std::size_t ATrace::num_points() const {
  std::size_t n = 0;
  for (const auto& s : segments_) n += s.size();
  return n;
}

std::vector<std::string> ATrace::continuous_variables() const {
  std::vector<std::string> out;
  std::copy_if(vars_.begin(), vars_.end(), std::back_inserter(out), [](const auto& v) { return !is_action_variable(v); });
  return out;
}

std::vector<std::string> ATrace::action_variables() const {
  std::vector<std::string> out;
  std::copy_if(vars_.begin(), vars_.end(), std::back_inserter(out), [](const auto& v) { return is_action_variable(v); });
  return out;
}

std::vector<ActionOccurrence> ATrace::actions() const {
  std::vector<ActionOccurrence> out;
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    auto row = segments_[j].row(segments_[j].size() - 1);
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      if (is_action_variable(vars_[k]) && row[k].is_inf()) {
        out.push_back({action_name(vars_[k]), j, segments_[j].end()});
      }
    }
  }
  return out;
}

ATrace restrict(const ATrace& trace, std::span<const std::string> vars) {
  std::vector<Trajectory> segs;
  segs.reserve(trace.num_segments());
  for (const auto& s : trace.segments()) segs.push_back(restrict(s, vars));
  if (trace.empty()) index_of(trace.variables(), vars);
  return ATrace({vars.begin(), vars.end()}, std::move(segs));
}

ATrace strip_actions(const ATrace& trace) { return restrict(trace, trace.continuous_variables()); }

ATrace shift(const ATrace& trace, double t) {
  std::vector<Trajectory> segs;
  segs.reserve(trace.num_segments());
  for (const auto& s : trace.segments()) segs.push_back(shift(s, t));
  return ATrace(trace.variables(), std::move(segs));
}

void HybridSequence::validate() const {
  if (trajectories.empty()) throw TraceFormatError("hybrid sequence has no trajectory");
  if (actions.size() + 1 != trajectories.size()) {
    throw TraceFormatError("hybrid sequence must alternate trajectories and actions and end with a trajectory");
  }
  if (!right_open.empty() && right_open.size() != trajectories.size()) {
    throw TraceFormatError("hybrid sequence: right_open flags do not match trajectories");
  }
  for (std::size_t i = 0; i + 1 < trajectories.size(); ++i) {
    if (!right_open.empty() && right_open[i]) {
      throw TraceFormatError("non-final trajectory " + std::to_string(i) + " is not closed");
    }
  }
  for (const auto& t : trajectories) {
    if (t.variables() != trajectories.front().variables()) {
      throw TraceFormatError("hybrid sequence trajectories have different variables");
    }
  }
}

double HybridSequence::duration() const {
  double d = 0.0;
  for (const auto& t : trajectories) d += t.duration();
  return d;
}

Trace trace_prefix(const Trace& trace, std::size_t n) {
  if (n == 0 || n > trace.seq.trajectories.size()) throw DomainError("trace_prefix: bad trajectory count");
  Trace out;
  out.alphabet = trace.alphabet;
  out.seq.trajectories.assign(trace.seq.trajectories.begin(), trace.seq.trajectories.begin() + n);
  out.seq.actions.assign(trace.seq.actions.begin(), trace.seq.actions.begin() + (n - 1));
  if (!trace.seq.right_open.empty()) out.seq.right_open.assign(trace.seq.right_open.begin(), trace.seq.right_open.begin() + n);
  return out;
}

ATrace trace_to_atrace(const Trace& trace) {
  trace.seq.validate();
  const auto& trajs = trace.seq.trajectories;
  const auto& base_vars = trajs.front().variables();
  for (const auto& v : base_vars) {
    if (is_action_variable(v)) throw TraceFormatError("trace variable '" + v + "' collides with action variables");
  }
  std::vector<std::string> vars = base_vars;
  for (const auto& a : trace.alphabet) vars.push_back(action_variable(a));
  const std::size_t nb = base_vars.size();
  const std::size_t nv = vars.size();

  std::vector<Trajectory> segs;
  segs.reserve(trajs.size());
  double cursor = 0.0;
  for (std::size_t j = 0; j < trajs.size(); ++j) {
    Trajectory seg = shift(trajs[j], cursor - trajs[j].start());
    std::ptrdiff_t fired = -1;
    if (j + 1 < trajs.size() && !trace.seq.actions[j].empty()) {
      auto it = std::find(trace.alphabet.begin(), trace.alphabet.end(), trace.seq.actions[j]);
      if (it == trace.alphabet.end()) {
        throw TraceFormatError("action '" + trace.seq.actions[j] + "' is not an external action of the trace");
      }
      fired = it - trace.alphabet.begin();
    }
    std::vector<ExtReal> values(seg.size() * nv, 0.0);
    for (std::size_t i = 0; i < seg.size(); ++i) {
      auto r = seg.row(i);
      std::copy(r.begin(), r.end(), values.begin() + static_cast<std::ptrdiff_t>(i * nv));
    }
    if (fired >= 0) values[(seg.size() - 1) * nv + nb + static_cast<std::size_t>(fired)] = ExtReal::inf();
    cursor = seg.end();
    segs.emplace_back(vars, seg.times(), std::move(values));
  }
  return ATrace(std::move(vars), std::move(segs));
}

Trace atrace_to_trace(const ATrace& trace) {
  if (trace.empty()) throw TraceFormatError("empty a-trace");
  const auto cont = trace.continuous_variables();
  const auto acts = trace.action_variables();
  Trace out;
  for (const auto& v : acts) out.alphabet.push_back(action_name(v));
  auto occurrences = trace.actions();
  std::size_t next = 0;
  for (std::size_t j = 0; j < trace.num_segments(); ++j) {
    out.seq.trajectories.push_back(restrict(trace.segment(j), cont));
    if (j + 1 == trace.num_segments()) break;
    if (next < occurrences.size() && occurrences[next].segment == j) {
      out.seq.actions.push_back(occurrences[next++].action);
    } else {
      out.seq.actions.emplace_back();
    }
  }
  return out;
}

void SolutionPair::validate(double tol) const {
  if (!approx_equal(u.domain(), y.domain(), tol)) throw TraceFormatError("solution pair: dom(u) != dom(y)");
}

}  // namespace hconf
