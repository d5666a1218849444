#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hconf/hybrid.hpp"

namespace hconf {

enum class NormMode {
  /// Euclidean norm on continuous variables; action variables are dropped.
  Plain,
  /// Extended norm over all variables including action variables.
  Extended,
};

struct ClosenessParams {
  double tau = 0.0;
  double eps = 0.0;
  /// Test duration T: only points with t <= T are quantified over.
  double horizon = 0.0;
  /// Maximum jump count J: only points with segment index <= J are
  /// quantified over.
  std::size_t max_jumps = 0;

  /// Throws DomainError unless tau, eps and T are positive.
  void validate() const;
};

/// inf when some component is infinite on exactly one side; otherwise the
/// Euclidean norm of the differences, with inf - inf contributing 0.
ExtReal ext_norm(std::span<const ExtReal> a, std::span<const ExtReal> b);
/// Throws DomainError when the variable lists differ.
ExtReal ext_norm(const Valuation& a, const Valuation& b);

struct HybridPoint {
  double t = 0.0;
  std::size_t j = 0;

  friend bool operator==(const HybridPoint&, const HybridPoint&) = default;
};

enum class Direction {
  /// Points of the first trace matched in the second.
  FirstToSecond,
  /// Points of the second trace matched in the first.
  SecondToFirst,
};

struct PointMatch {
  Direction direction;
  HybridPoint source;
  HybridPoint target;
  ExtReal distance;
};

struct UnmatchedPoint {
  Direction direction;
  HybridPoint point;
  /// Smallest distance to any target within the tau-window (inf when the
  /// window is empty).
  ExtReal best_distance;
  std::optional<HybridPoint> best_target;
};

struct ClosenessVerdict {
  bool close = false;
  NormMode mode = NormMode::Extended;
  ClosenessParams params;
  bool first_to_second_ok = false;
  bool second_to_first_ok = false;
  /// One match per checked point, both directions; present when close and
  /// witnesses were requested.
  std::vector<PointMatch> witness;
  /// First unmatched point in scan order (first direction, then second).
  std::optional<UnmatchedPoint> counterexample;
  /// Unmatched point with the largest best distance.
  std::optional<UnmatchedPoint> worst;
  /// Same, restricted to points of the first (second) trace.
  std::optional<UnmatchedPoint> worst_first;
  std::optional<UnmatchedPoint> worst_second;
  std::size_t checked_first = 0;
  std::size_t checked_second = 0;
  std::size_t unmatched_first = 0;
  std::size_t unmatched_second = 0;
  /// Largest sampling step of each trace; bounds the error of matching on
  /// samples instead of continuous signals.
  double sample_gap_first = 0.0;
  double sample_gap_second = 0.0;
};

struct CheckOptions {
  bool parallel = false;
  bool witness = true;
};

/// Windowed checker with the plain Euclidean norm (action variables
/// stripped). Throws DomainError for mismatched continuous variables.
ClosenessVerdict close_plain(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, const CheckOptions& opts = {});

/// Windowed checker with the extended norm: an action occurrence must meet
/// the same action within tau. Traces over different action alphabets are
/// compared over the union, a missing action column reading 0.
ClosenessVerdict close_ext(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, const CheckOptions& opts = {});

/// Windowed checker with a selectable norm. An empty trace is close to a
/// trace without in-scope points, in particular to another empty trace.
ClosenessVerdict close_check(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, NormMode mode,
                             const CheckOptions& opts = {});

/// Serial reference: the literal double loop over all point pairs. No
/// witnesses are recorded.
ClosenessVerdict close_naive(const ATrace& y1, const ATrace& y2, const ClosenessParams& p, NormMode mode);

/// Smallest eps for which the traces are close at fixed tau, T, J: the
/// largest best-match distance over all checked points of both traces.
ExtReal min_epsilon(const ATrace& y1, const ATrace& y2, double tau, double horizon, std::size_t max_jumps,
                    NormMode mode = NormMode::Extended, bool parallel = false);

const char* to_string(NormMode m);
const char* to_string(Direction d);
/// "plain" or "extended"; throws DomainError otherwise.
NormMode parse_norm_mode(const std::string& s);

/// Line-oriented `key = value` report.
void write_report(std::ostream& out, const ClosenessVerdict& v);
/// `direction,t,j,s,k,distance`, one row per witness match.
void write_witness_csv(std::ostream& out, const ClosenessVerdict& v);

}  // namespace hconf
