// Shared construction of thermostat traces used by several test programs.
#pragma once

#include <string>
#include <vector>

#include "hconf/automaton.hpp"
#include "hconf/hybrid.hpp"
#include "hconf/simulate.hpp"

namespace fixture {

inline hconf::Execution thermostat_run(double horizon, hconf::SimConfig cfg = {}) {
  hconf::Hioa a = hconf::build_thermostat();
  return hconf::run(a, hconf::Stimulus{{}, {}, horizon}, cfg);
}

/// Output a-trace (y, act:OFF) of the thermostat over [0, horizon].
inline hconf::ATrace thermostat_y(double horizon, hconf::SimConfig cfg = {}) {
  hconf::Hioa a = hconf::build_thermostat();
  return hconf::solution_pair(a, thermostat_run(horizon, cfg)).y;
}

/// Adds `dv` to every continuous variable; action columns are untouched.
inline hconf::ATrace offset_values(const hconf::ATrace& tr, double dv) {
  std::vector<hconf::Trajectory> segs;
  for (const auto& seg : tr.segments()) {
    std::vector<hconf::ExtReal> values(seg.data());
    for (std::size_t i = 0; i < seg.size(); ++i) {
      for (std::size_t k = 0; k < seg.dimension(); ++k) {
        if (!hconf::is_action_variable(seg.variables()[k])) {
          auto& c = values[i * seg.dimension() + k];
          c = c.value() + dv;
        }
      }
    }
    segs.emplace_back(seg.variables(), seg.times(), std::move(values));
  }
  return hconf::ATrace(tr.variables(), std::move(segs));
}

/// Delayed by 0.5 s and lowered by 1: y2(t + 0.5) = y1(t) - 1.
inline hconf::ATrace retimed(const hconf::ATrace& y1) { return offset_values(hconf::shift(y1, 0.5), -1.0); }

/// Same samples with every action column set to 0.
inline hconf::ATrace without_action_marks(const hconf::ATrace& tr) {
  std::vector<hconf::Trajectory> segs;
  for (const auto& seg : tr.segments()) {
    std::vector<hconf::ExtReal> values(seg.data());
    for (std::size_t i = 0; i < seg.size(); ++i) {
      for (std::size_t k = 0; k < seg.dimension(); ++k) {
        if (hconf::is_action_variable(seg.variables()[k])) values[i * seg.dimension() + k] = 0.0;
      }
    }
    segs.emplace_back(seg.variables(), seg.times(), std::move(values));
  }
  return hconf::ATrace(tr.variables(), std::move(segs));
}

/// Trace tau_0, OFF, tau_1, ON, tau_2 of the thermostat (ends at the second OFF guard).
inline hconf::Trace alpha() {
  hconf::Hioa a = hconf::build_thermostat();
  hconf::Trace full = hconf::trace_of(a, thermostat_run(7.0));
  return hconf::trace_prefix(full, 3);
}

}  // namespace fixture
