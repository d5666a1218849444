#include "hconf/valuation.hpp"

#include <algorithm>
#include <unordered_set>

#include "hconf/errors.hpp"
#include "hconf/state.hpp"

namespace hconf {

void require_distinct(std::span<const std::string> names) {
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw DomainError("duplicate variable '" + n + "'");
  }
}

std::vector<std::size_t> index_of(std::span<const std::string> names, std::span<const std::string> wanted) {
  std::vector<std::size_t> idx;
  idx.reserve(wanted.size());
  for (const auto& w : wanted) {
    auto it = std::find(names.begin(), names.end(), w);
    if (it == names.end()) throw DomainError("unknown variable '" + w + "'");
    idx.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  return idx;
}

Valuation::Valuation(std::vector<std::string> names, std::vector<ExtReal> values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (names_.size() != values_.size()) throw DomainError("valuation: names and values differ in length");
  require_distinct(names_);
}

Valuation::Valuation(std::initializer_list<std::pair<std::string, ExtReal>> entries) {
  for (const auto& [n, v] : entries) {
    names_.push_back(n);
    values_.push_back(v);
  }
  require_distinct(names_);
}

bool Valuation::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

ExtReal Valuation::at(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DomainError("unknown variable '" + name + "'");
  return values_[static_cast<std::size_t>(it - names_.begin())];
}

Valuation restrict(const Valuation& val, std::span<const std::string> vars) {
  auto idx = index_of(val.names(), vars);
  std::vector<ExtReal> values;
  values.reserve(idx.size());
  for (auto i : idx) values.push_back(val.values()[i]);
  return Valuation({vars.begin(), vars.end()}, std::move(values));
}

bool approx_equal(const Valuation& a, const Valuation& b, double tol) {
  if (a.names() != b.names()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (abs_diff(a.values()[i], b.values()[i]) > tol) return false;
  }
  return true;
}

std::string to_string(const Valuation& val) {
  std::string out = "{";
  for (std::size_t i = 0; i < val.size(); ++i) {
    if (i) out += ", ";
    out += val.names()[i] + ":" + to_string(val.values()[i]);
  }
  return out + "}";
}

bool approx_equal(const State& a, const State& b, double tol) {
  return a.location == b.location && approx_equal(a.values, b.values, tol);
}

std::string to_string(const State& s) { return "(" + s.location + ", " + to_string(s.values) + ")"; }

}  // namespace hconf
