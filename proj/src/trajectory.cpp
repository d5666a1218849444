#include "hconf/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "hconf/errors.hpp"
#include "hconf/format.hpp"

namespace hconf {
namespace {

ExtReal lerp(ExtReal a, ExtReal b, double w) {
  if (w <= 0.0) return a;
  if (w >= 1.0) return b;
  if (a.is_inf() && b.is_inf()) return ExtReal::inf();
  if (a.is_inf()) return b;
  if (b.is_inf()) return a;
  return a.value() + w * (b.value() - a.value());
}

// Row of values at t, which must lie in [start, end].
std::vector<ExtReal> row_at(const Trajectory& traj, double t) {
  const auto& times = traj.times();
  auto it = std::lower_bound(times.begin(), times.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times.begin());
  if (hi < times.size() && times[hi] == t) {
    auto r = traj.row(hi);
    return {r.begin(), r.end()};
  }
  if (hi == 0) {
    auto r = traj.row(0);
    return {r.begin(), r.end()};
  }
  if (hi == times.size()) {
    auto r = traj.row(times.size() - 1);
    return {r.begin(), r.end()};
  }
  std::size_t lo = hi - 1;
  double w = (t - times[lo]) / (times[hi] - times[lo]);
  auto a = traj.row(lo);
  auto b = traj.row(hi);
  std::vector<ExtReal> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = lerp(a[k], b[k], w);
  return out;
}

void require_in_domain(const Trajectory& traj, double t, double tol) {
  if (!(t >= traj.start() - tol && t <= traj.end() + tol)) {
    throw DomainError("time " + format_report(t) + " outside trajectory domain [" + format_report(traj.start()) +
                      ", " + format_report(traj.end()) + "]");
  }
}

}  // namespace

Trajectory::Trajectory(std::vector<std::string> variables, std::vector<double> times, std::vector<ExtReal> values)
    : vars_(std::move(variables)), times_(std::move(times)), values_(std::move(values)) {
  require_distinct(vars_);
  if (times_.empty()) throw DomainError("trajectory needs at least one sample");
  if (values_.size() != times_.size() * vars_.size()) throw DomainError("trajectory: value table has wrong size");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw DomainError("trajectory: non-finite sample time");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw DomainError("trajectory: sample times not strictly increasing at " + format_report(times_[i]));
    }
  }
}

Trajectory Trajectory::point(double t, const Valuation& val) { return Trajectory(val.names(), {t}, val.values()); }

Valuation Trajectory::sample(std::size_t i) const {
  auto r = row(i);
  return Valuation(vars_, {r.begin(), r.end()});
}

Valuation Trajectory::at(double t) const {
  require_in_domain(*this, t, 0.0);
  return Valuation(vars_, row_at(*this, t));
}

double Trajectory::max_step() const {
  double m = 0.0;
  for (std::size_t i = 1; i < times_.size(); ++i) m = std::max(m, times_[i] - times_[i - 1]);
  return m;
}

Trajectory restrict(const Trajectory& traj, std::span<const std::string> vars) {
  auto idx = index_of(traj.variables(), vars);
  std::vector<ExtReal> values;
  values.reserve(traj.size() * idx.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    auto r = traj.row(i);
    for (auto k : idx) values.push_back(r[k]);
  }
  return Trajectory({vars.begin(), vars.end()}, traj.times(), std::move(values));
}

Trajectory shift(const Trajectory& traj, double t) {
  if (t == 0.0) return traj;
  std::vector<double> times = traj.times();
  for (auto& s : times) s += t;
  return Trajectory(traj.variables(), std::move(times), traj.data());
}

Trajectory suffix(const Trajectory& traj, double t) {
  require_in_domain(traj, t, 0.0);
  const auto& times = traj.times();
  auto first = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  std::vector<double> out_t;
  std::vector<ExtReal> out_v;
  if (first == times.size() || times[first] != t) {
    auto r = row_at(traj, t);
    out_t.push_back(0.0);
    out_v.insert(out_v.end(), r.begin(), r.end());
  }
  for (std::size_t i = first; i < times.size(); ++i) {
    out_t.push_back(times[i] - t);
    auto r = traj.row(i);
    out_v.insert(out_v.end(), r.begin(), r.end());
  }
  return Trajectory(traj.variables(), std::move(out_t), std::move(out_v));
}

Trajectory prefix(const Trajectory& traj, double t) {
  require_in_domain(traj, t, 0.0);
  const auto& times = traj.times();
  std::vector<double> out_t;
  std::vector<ExtReal> out_v;
  std::size_t i = 0;
  for (; i < times.size() && times[i] < t; ++i) {
    out_t.push_back(times[i]);
    auto r = traj.row(i);
    out_v.insert(out_v.end(), r.begin(), r.end());
  }
  auto r = row_at(traj, t);
  out_t.push_back(t);
  out_v.insert(out_v.end(), r.begin(), r.end());
  return Trajectory(traj.variables(), std::move(out_t), std::move(out_v));
}

Trajectory concat(const Trajectory& first, const Trajectory& second, double tol) {
  if (first.variables() != second.variables()) throw DomainError("concat: variable sets differ");
  double gap = second.start() - first.end();
  if (gap > tol) throw ConcatError("concat: gap of " + format_report(gap) + " between domains");
  if (gap < -tol) throw ConcatError("concat: domains overlap by " + format_report(-gap));
  if (!approx_equal(first.lval(), second.fval(), tol)) {
    throw StateMismatchError("concat: boundary valuations differ: " + to_string(first.lval()) + " vs " +
                             to_string(second.fval()));
  }
  std::vector<double> times = first.times();
  std::vector<ExtReal> values = first.data();
  for (std::size_t i = 1; i < second.size(); ++i) {
    times.push_back(second.time(i));
    auto r = second.row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return Trajectory(first.variables(), std::move(times), std::move(values));
}

namespace {

// Every sample of `a` inside [lo, hi] matches `b` there within tol.
bool samples_match(const Trajectory& a, const Trajectory& b, double lo, double hi, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a.time(i);
    if (t < lo || t > hi) continue;
    double tb = std::clamp(t, b.start(), b.end());
    auto rb = row_at(b, tb);
    auto ra = a.row(i);
    for (std::size_t k = 0; k < ra.size(); ++k) {
      if (abs_diff(ra[k], rb[k]) > tol) return false;
    }
  }
  return true;
}

}  // namespace

bool is_prefix(const Trajectory& prefix_candidate, const Trajectory& whole, double tol) {
  const auto& p = prefix_candidate;
  if (p.variables() != whole.variables()) return false;
  if (std::fabs(p.start() - whole.start()) > tol) return false;
  if (p.end() > whole.end() + tol) return false;
  return samples_match(p, whole, p.start(), p.end(), tol) && samples_match(whole, p, p.start(), p.end(), tol);
}

bool approx_equal(const Trajectory& a, const Trajectory& b, double tol) {
  if (a.variables() != b.variables()) return false;
  if (std::fabs(a.start() - b.start()) > tol || std::fabs(a.end() - b.end()) > tol) return false;
  return samples_match(a, b, a.start(), a.end(), tol) && samples_match(b, a, b.start(), b.end(), tol);
}

}  // namespace hconf
