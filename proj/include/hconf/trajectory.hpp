#pragma once

#include <span>
#include <string>
#include <vector>

#include "hconf/valuation.hpp"

namespace hconf {

/// A sampled function from a closed interval [start, end] to valuations over
/// a fixed variable list. Samples are strictly increasing in time; the first
/// sample sits at `start` and the last at `end`. Off-sample values are
/// linearly interpolated.
class Trajectory {
 public:
  /// `values` is row-major: one row of `variables.size()` entries per time.
  Trajectory(std::vector<std::string> variables, std::vector<double> times, std::vector<ExtReal> values);

  static Trajectory point(double t, const Valuation& val);

  const std::vector<std::string>& variables() const { return vars_; }
  std::size_t dimension() const { return vars_.size(); }
  std::size_t size() const { return times_.size(); }

  double start() const { return times_.front(); }
  double end() const { return times_.back(); }
  double duration() const { return end() - start(); }

  const std::vector<double>& times() const { return times_; }
  double time(std::size_t i) const { return times_[i]; }
  std::span<const ExtReal> row(std::size_t i) const {
    return {values_.data() + i * vars_.size(), vars_.size()};
  }
  const std::vector<ExtReal>& data() const { return values_; }

  Valuation sample(std::size_t i) const;
  Valuation fval() const { return sample(0); }
  Valuation lval() const { return sample(size() - 1); }

  /// Value at an arbitrary t in the domain. An interior point between a
  /// finite sample and an infinite one takes the finite value, so action
  /// spikes do not spread. Throws DomainError outside [start, end].
  Valuation at(double t) const;

  /// Largest distance between consecutive sample times (0 for a point).
  double max_step() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<std::string> vars_;
  std::vector<double> times_;
  std::vector<ExtReal> values_;
};

/// Pointwise restriction to `vars`; domain unchanged.
Trajectory restrict(const Trajectory& traj, std::span<const std::string> vars);

/// Domain D + t, values carried to the shifted times.
Trajectory shift(const Trajectory& traj, double t);

/// Part of the trajectory on [t, end], shifted to start at 0. An interpolated
/// sample is inserted when t is not a sample time.
Trajectory suffix(const Trajectory& traj, double t);

/// Part of the trajectory on [start, t], with an interpolated closing sample
/// when t is not a sample time.
Trajectory prefix(const Trajectory& traj, double t);

/// Union of two adjacent trajectories. The boundary sample is stored once
/// (from `first`). Throws ConcatError on a gap or overlap and
/// StateMismatchError when the boundary valuations differ by more than `tol`.
Trajectory concat(const Trajectory& first, const Trajectory& second, double tol = kMergeTolerance);

/// True iff `prefix_candidate` equals `whole` restricted to the candidate's
/// domain, sample by sample within `tol`.
bool is_prefix(const Trajectory& prefix_candidate, const Trajectory& whole, double tol = kMergeTolerance);

/// Same variables, domains within `tol`, and every sample of each side
/// matches the other side's interpolated value within `tol`.
bool approx_equal(const Trajectory& a, const Trajectory& b, double tol = kMergeTolerance);

}  // namespace hconf
