#include "hconf/flow.hpp"

#include <algorithm>

#include "hconf/errors.hpp"

namespace hconf {

InputSignals::InputSignals(std::vector<std::string> vars, std::vector<std::vector<double>> times,
                           std::vector<std::vector<double>> values)
    : vars_(std::move(vars)), times_(std::move(times)), values_(std::move(values)) {
  require_distinct(vars_);
  if (times_.size() != vars_.size() || values_.size() != vars_.size()) throw DomainError("input signals: size mismatch");
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    if (times_[k].empty() || times_[k].size() != values_[k].size()) {
      throw DomainError("input signal '" + vars_[k] + "' needs matching, non-empty samples");
    }
    for (std::size_t i = 1; i < times_[k].size(); ++i) {
      if (!(times_[k][i] > times_[k][i - 1])) throw DomainError("input signal '" + vars_[k] + "' times not increasing");
    }
  }
}

InputSignals InputSignals::constant(const Valuation& v) {
  std::vector<std::vector<double>> times(v.size(), std::vector<double>{0.0});
  std::vector<std::vector<double>> values;
  for (auto x : v.values()) values.push_back({x.value()});
  return InputSignals(v.names(), std::move(times), std::move(values));
}

void InputSignals::eval(double t, std::span<double> out) const {
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    const auto& ts = times_[k];
    const auto& vs = values_[k];
    if (t <= ts.front()) {
      out[k] = vs.front();
    } else if (t >= ts.back()) {
      out[k] = vs.back();
    } else {
      auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
      std::size_t lo = hi - 1;
      double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
      out[k] = vs[lo] + w * (vs[hi] - vs[lo]);
    }
  }
}

InputSignals InputSignals::aligned_to(const std::vector<std::string>& vars) const {
  auto idx = index_of(vars_, vars);
  std::vector<std::vector<double>> t, v;
  for (auto i : idx) {
    t.push_back(times_[i]);
    v.push_back(values_[i]);
  }
  return InputSignals(vars, std::move(t), std::move(v));
}

FlowEvaluator::FlowEvaluator(const Hioa& a, std::size_t loc, const InputSignals& inputs)
    : a_(a), loc_(loc), inputs_(inputs), nx_(a.internal_vars().size()), env_(a.layout().size(), 0.0) {
  if (inputs.variables() != a.input_vars()) throw DomainError("input signals do not match the automaton's inputs");
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->resize(nx_);
  in_.resize(a.input_vars().size());
}

std::span<const double> FlowEvaluator::env(double t, std::span<const double> x) {
  inputs_.eval(t, in_);
  a_.fill_env(loc_, x, in_, env_);
  return env_;
}

void FlowEvaluator::derivative(double t, std::span<const double> x, std::span<double> dx) {
  env(t, x);
  const auto& flow = a_.compiled(loc_).flow;
  for (std::size_t k = 0; k < nx_; ++k) dx[k] = flow[k].eval(env_);
}

void FlowEvaluator::rk4_step(double t, std::span<const double> x, double h, std::span<double> out) {
  derivative(t, x, k1_);
  for (std::size_t k = 0; k < nx_; ++k) tmp_[k] = x[k] + 0.5 * h * k1_[k];
  derivative(t + 0.5 * h, tmp_, k2_);
  for (std::size_t k = 0; k < nx_; ++k) tmp_[k] = x[k] + 0.5 * h * k2_[k];
  derivative(t + 0.5 * h, tmp_, k3_);
  for (std::size_t k = 0; k < nx_; ++k) tmp_[k] = x[k] + h * k3_[k];
  derivative(t + h, tmp_, k4_);
  for (std::size_t k = 0; k < nx_; ++k) out[k] = x[k] + h / 6.0 * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
}

}  // namespace hconf
