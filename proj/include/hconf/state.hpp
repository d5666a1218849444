#pragma once

#include <string>

#include "hconf/valuation.hpp"

namespace hconf {

/// Location plus a valuation of the internal continuous variables.
struct State {
  std::string location;
  Valuation values;

  friend bool operator==(const State&, const State&) = default;
};

bool approx_equal(const State& a, const State& b, double tol = kMergeTolerance);
std::string to_string(const State& s);

}  // namespace hconf
