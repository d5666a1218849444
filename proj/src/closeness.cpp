#include "hconf/closeness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hconf/errors.hpp"
#include "hconf/format.hpp"
#include "hconf/parallel.hpp"

namespace hconf {

void ClosenessParams::validate() const {
  if (!(tau > 0.0)) throw DomainError("tau must be > 0");
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  if (!(horizon > 0.0)) throw DomainError("test duration T must be > 0");
}

ExtReal ext_norm(std::span<const ExtReal> a, std::span<const ExtReal> b) {
  if (a.size() != b.size()) throw DomainError("ext_norm: dimension mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].is_inf() != b[k].is_inf()) return ExtReal::inf();
    if (a[k].is_inf()) continue;
    double d = a[k].value() - b[k].value();
    sum += d * d;
  }
  return std::sqrt(sum);
}

ExtReal ext_norm(const Valuation& a, const Valuation& b) {
  if (a.names() != b.names()) throw DomainError("ext_norm: variable sets differ");
  return ext_norm(a.values(), b.values());
}

namespace {

// Time-ordered point list of one trace. Segment-major order is already
// sorted by time because segments are adjacent.
struct Flat {
  std::vector<double> t;
  std::vector<std::size_t> j;
  std::vector<ExtReal> v;
  std::size_t dim = 0;
  double max_gap = 0.0;

  std::size_t size() const { return t.size(); }
  std::span<const ExtReal> row(std::size_t i) const { return {v.data() + i * dim, dim}; }
};

Flat flatten(const ATrace& tr) {
  Flat f;
  f.dim = tr.variables().size();
  f.t.reserve(tr.num_points());
  f.j.reserve(tr.num_points());
  f.v.reserve(tr.num_points() * f.dim);
  for (std::size_t j = 0; j < tr.num_segments(); ++j) {
    const auto& seg = tr.segment(j);
    f.max_gap = std::max(f.max_gap, seg.max_step());
    f.t.insert(f.t.end(), seg.times().begin(), seg.times().end());
    f.j.insert(f.j.end(), seg.size(), j);
    f.v.insert(f.v.end(), seg.data().begin(), seg.data().end());
  }
  return f;
}

ATrace with_actions(const ATrace& tr, const std::vector<std::string>& vars) {
  auto idx = std::vector<std::ptrdiff_t>(vars.size(), -1);
  for (std::size_t k = 0; k < vars.size(); ++k) {
    auto it = std::find(tr.variables().begin(), tr.variables().end(), vars[k]);
    if (it != tr.variables().end()) idx[k] = it - tr.variables().begin();
  }
  std::vector<Trajectory> segs;
  for (const auto& seg : tr.segments()) {
    std::vector<ExtReal> values;
    values.reserve(seg.size() * vars.size());
    for (std::size_t i = 0; i < seg.size(); ++i) {
      auto row = seg.row(i);
      for (auto k : idx) values.push_back(k < 0 ? ExtReal(0.0) : row[static_cast<std::size_t>(k)]);
    }
    segs.emplace_back(vars, seg.times(), std::move(values));
  }
  return ATrace(vars, std::move(segs));
}

std::pair<Flat, Flat> prepare(const ATrace& y1, const ATrace& y2, NormMode mode) {
  // An empty trace has no points to match and offers no targets.
  if (y1.empty() || y2.empty()) return {flatten(y1), flatten(y2)};
  if (mode == NormMode::Plain) {
    ATrace a = strip_actions(y1);
    ATrace b = strip_actions(y2);
    if (a.variables() != b.variables()) throw DomainError("closeness: continuous variable lists differ");
    return {flatten(a), flatten(b)};
  }
  if (y1.variables() == y2.variables()) return {flatten(y1), flatten(y2)};
  if (y1.continuous_variables() != y2.continuous_variables()) {
    throw DomainError("closeness: continuous variable lists differ");
  }
  // An action missing from one alphabet never occurs there: its column is 0.
  std::vector<std::string> vars = y1.variables();
  for (const auto& v : y2.variables()) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  }
  return {flatten(with_actions(y1, vars)), flatten(with_actions(y2, vars))};
}

bool in_scope(const Flat& f, std::size_t i, double horizon, std::size_t max_jumps) {
  return f.t[i] <= horizon && f.j[i] <= max_jumps;
}

struct PointResult {
  bool matched = false;
  bool has_target = false;
  std::size_t target = 0;
  ExtReal distance = ExtReal::inf();
};

// Searches `tgt` for a point within tau in time and eps in norm. With
// `exhaustive` the whole window is scanned for the minimum distance;
// otherwise the scan runs outward from the nearest time and stops at the
// first match.
PointResult search_window(const Flat& src, std::size_t i, const Flat& tgt, double tau, double eps, bool exhaustive) {
  PointResult r;
  const double t = src.t[i];
  const double slack = (std::fabs(t) + tau) * 4e-16;
  auto lo_it = std::lower_bound(tgt.t.begin(), tgt.t.end(), t - tau - slack);
  auto hi_it = std::upper_bound(lo_it, tgt.t.end(), t + tau + slack);
  const auto lo = static_cast<std::ptrdiff_t>(lo_it - tgt.t.begin());
  const auto hi = static_cast<std::ptrdiff_t>(hi_it - tgt.t.begin());
  auto centre = static_cast<std::ptrdiff_t>(std::lower_bound(lo_it, hi_it, t) - tgt.t.begin());
  std::ptrdiff_t left = centre - 1;
  std::ptrdiff_t right = centre;
  const auto row = src.row(i);
  while (left >= lo || right < hi) {
    std::ptrdiff_t k;
    if (left < lo) {
      k = right++;
    } else if (right >= hi) {
      k = left--;
    } else if (tgt.t[static_cast<std::size_t>(right)] - t <= t - tgt.t[static_cast<std::size_t>(left)]) {
      k = right++;
    } else {
      k = left--;
    }
    const auto uk = static_cast<std::size_t>(k);
    if (!(std::fabs(t - tgt.t[uk]) <= tau)) continue;
    ExtReal d = ext_norm(row, tgt.row(uk));
    if (!r.has_target || d < r.distance) {
      r.has_target = true;
      r.target = uk;
      r.distance = d;
    }
    if (d <= ExtReal(eps)) {
      r.matched = true;
      if (!exhaustive) return r;
    }
  }
  return r;
}

PointResult search_all(const Flat& src, std::size_t i, const Flat& tgt, double tau, double eps) {
  PointResult r;
  const auto row = src.row(i);
  for (std::size_t k = 0; k < tgt.size(); ++k) {
    if (!(std::fabs(src.t[i] - tgt.t[k]) <= tau)) continue;
    ExtReal d = ext_norm(row, tgt.row(k));
    if (!r.has_target || d < r.distance) {
      r.has_target = true;
      r.target = k;
      r.distance = d;
    }
    if (d <= ExtReal(eps)) {
      r.matched = true;
      break;
    }
  }
  return r;
}

template <class Search>
std::vector<PointResult> check_direction(const Flat& src, const Flat& tgt, const ClosenessParams& p, bool parallel,
                                         Search&& search) {
  std::vector<PointResult> out(src.size());
  parallel_for(src.size(), parallel, [&](std::size_t i) {
    if (in_scope(src, i, p.horizon, p.max_jumps)) {
      out[i] = search(src, i, tgt);
    } else {
      out[i].matched = true;
    }
  });
  return out;
}

void collect(ClosenessVerdict& v, Direction dir, const Flat& src, const Flat& tgt, const std::vector<PointResult>& res,
             const ClosenessParams& p, bool witness, bool& ok, std::size_t& checked, std::size_t& unmatched,
             std::optional<UnmatchedPoint>& worst) {
  ok = true;
  checked = 0;
  unmatched = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!in_scope(src, i, p.horizon, p.max_jumps)) continue;
    ++checked;
    const auto& r = res[i];
    HybridPoint here{src.t[i], src.j[i]};
    if (r.matched) {
      if (witness) v.witness.push_back({dir, here, {tgt.t[r.target], tgt.j[r.target]}, r.distance});
      continue;
    }
    ok = false;
    ++unmatched;
    UnmatchedPoint u{dir, here, r.distance, std::nullopt};
    if (r.has_target) u.best_target = HybridPoint{tgt.t[r.target], tgt.j[r.target]};
    if (!v.counterexample) v.counterexample = u;
    if (!worst || u.best_distance > worst->best_distance) worst = u;
    if (!v.worst || u.best_distance > v.worst->best_distance) v.worst = u;
  }
}

template <class Search>
ClosenessVerdict run_check(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, NormMode mode, bool parallel,
                           bool witness, Search&& search) {
  p.validate();
  auto [a, b] = prepare(y1, y2, mode);
  ClosenessVerdict v;
  v.mode = mode;
  v.params = p;
  v.sample_gap_first = a.max_gap;
  v.sample_gap_second = b.max_gap;
  auto r12 = check_direction(a, b, p, parallel, search);
  auto r21 = check_direction(b, a, p, parallel, search);
  collect(v, Direction::FirstToSecond, a, b, r12, p, witness, v.first_to_second_ok, v.checked_first,
          v.unmatched_first, v.worst_first);
  collect(v, Direction::SecondToFirst, b, a, r21, p, witness, v.second_to_first_ok, v.checked_second,
          v.unmatched_second, v.worst_second);
  v.close = v.first_to_second_ok && v.second_to_first_ok;
  if (!v.close) v.witness.clear();
  return v;
}

}  // namespace

ClosenessVerdict close_check(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, NormMode mode,
                             const CheckOptions& opts) {
  return run_check(y1, y2, p, mode, opts.parallel, opts.witness, [&](const Flat& s, std::size_t i, const Flat& t) {
    return search_window(s, i, t, p.tau, p.eps, false);
  });
}

ClosenessVerdict close_plain(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, const CheckOptions& opts) {
  return close_check(y1, y2, p, NormMode::Plain, opts);
}

ClosenessVerdict close_ext(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, const CheckOptions& opts) {
  return close_check(y1, y2, p, NormMode::Extended, opts);
}

ClosenessVerdict close_naive(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, NormMode mode) {
  return run_check(y1, y2, p, mode, false, false,
                   [&](const Flat& s, std::size_t i, const Flat& t) { return search_all(s, i, t, p.tau, p.eps); });
}

ExtReal min_epsilon(const ATrace& y1, const ATrace& y2, double tau, double horizon, std::size_t max_jumps,
                    NormMode mode, bool parallel) {
  if (!(tau > 0.0)) throw DomainError("tau must be > 0");
  auto [a, b] = prepare(y1, y2, mode);
  ClosenessParams p{tau, 1.0, horizon, max_jumps};
  ExtReal worst = 0.0;
  for (const auto* dir : {&a, &b}) {
    const Flat& src = *dir;
    const Flat& tgt = dir == &a ? b : a;
    // eps = -1 disables early exit: every window is scanned for its minimum.
    auto res = check_direction(src, tgt, p, parallel, [&](const Flat& s, std::size_t i, const Flat& t) {
      return search_window(s, i, t, tau, -1.0, true);
    });
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (!in_scope(src, i, horizon, max_jumps)) continue;
      worst = std::max(worst, res[i].distance);
    }
  }
  return worst;
}

const char* to_string(NormMode m) { return m == NormMode::Plain ? "plain" : "extended"; }

const char* to_string(Direction d) { return d == Direction::FirstToSecond ? "first_to_second" : "second_to_first"; }

NormMode parse_norm_mode(const std::string& s) {
  if (s == "plain") return NormMode::Plain;
  if (s == "extended") return NormMode::Extended;
  throw DomainError("mode must be 'plain' or 'extended'");
}

namespace {

void write_unmatched(std::ostream& out, const char* key, const UnmatchedPoint& u) {
  out << key << ".direction = " << to_string(u.direction) << '\n';
  out << key << ".t = " << format_report(u.point.t) << '\n';
  out << key << ".j = " << u.point.j << '\n';
  out << key << ".best_distance = " << format_report(u.best_distance) << '\n';
  if (u.best_target) {
    out << key << ".best_t = " << format_report(u.best_target->t) << '\n';
    out << key << ".best_j = " << u.best_target->j << '\n';
  }
}

}  // namespace

void write_report(std::ostream& out, const ClosenessVerdict& v) {
  out << "verdict = " << (v.close ? "close" : "not_close") << '\n';
  out << "mode = " << to_string(v.mode) << '\n';
  out << "tau = " << format_report(v.params.tau) << '\n';
  out << "eps = " << format_report(v.params.eps) << '\n';
  out << "T = " << format_report(v.params.horizon) << '\n';
  out << "J = " << v.params.max_jumps << '\n';
  out << "first_to_second = " << (v.first_to_second_ok ? "ok" : "failed") << '\n';
  out << "second_to_first = " << (v.second_to_first_ok ? "ok" : "failed") << '\n';
  out << "checked_first = " << v.checked_first << '\n';
  out << "checked_second = " << v.checked_second << '\n';
  out << "unmatched_first = " << v.unmatched_first << '\n';
  out << "unmatched_second = " << v.unmatched_second << '\n';
  out << "sample_gap_first = " << format_report(v.sample_gap_first) << '\n';
  out << "sample_gap_second = " << format_report(v.sample_gap_second) << '\n';
  if (v.counterexample) write_unmatched(out, "counterexample", *v.counterexample);
  if (v.worst) write_unmatched(out, "worst", *v.worst);
  if (v.worst_first) write_unmatched(out, "worst_first", *v.worst_first);
  if (v.worst_second) write_unmatched(out, "worst_second", *v.worst_second);
}

void write_witness_csv(std::ostream& out, const ClosenessVerdict& v) {
  out << "direction,t,j,s,k,distance\n";
  for (const auto& m : v.witness) {
    out << to_string(m.direction) << ',' << format_report(m.source.t) << ',' << m.source.j << ','
        << format_report(m.target.t) << ',' << m.target.j << ',' << format_report(m.distance) << '\n';
  }
}

}  // namespace hconf
