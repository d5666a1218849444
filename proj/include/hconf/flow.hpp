#pragma once

#include <span>
#include <string>
#include <vector>

#include "hconf/automaton.hpp"

namespace hconf {

/// Piecewise-linear input variable signals, held constant outside their
/// sample range.
class InputSignals {
 public:
  InputSignals() = default;
  /// One (times, values) series per variable; times strictly increasing.
  InputSignals(std::vector<std::string> vars, std::vector<std::vector<double>> times,
               std::vector<std::vector<double>> values);
  static InputSignals constant(const Valuation& v);

  const std::vector<std::string>& variables() const { return vars_; }
  bool empty() const { return vars_.empty(); }
  double first_time(std::size_t k) const { return times_[k].front(); }
  double last_time(std::size_t k) const { return times_[k].back(); }

  /// Values at t in the order of `vars` (which must match the signal set).
  void eval(double t, std::span<double> out) const;
  /// Reorders to the automaton's input declaration; throws DomainError when
  /// a variable has no signal.
  InputSignals aligned_to(const std::vector<std::string>& vars) const;

 private:
  std::vector<std::string> vars_;
  std::vector<std::vector<double>> times_;
  std::vector<std::vector<double>> values_;
};

/// Scratch buffers for repeated flow evaluation in one location.
class FlowEvaluator {
 public:
  FlowEvaluator(const Hioa& a, std::size_t loc, const InputSignals& inputs);

  void derivative(double t, std::span<const double> x, std::span<double> dx);
  /// One classical fourth-order Runge-Kutta step of size h.
  void rk4_step(double t, std::span<const double> x, double h, std::span<double> out);
  /// Environment [internal | inputs | outputs] at time t.
  std::span<const double> env(double t, std::span<const double> x);

 private:
  const Hioa& a_;
  std::size_t loc_;
  const InputSignals& inputs_;
  std::size_t nx_;
  std::vector<double> env_;
  std::vector<double> in_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace hconf
