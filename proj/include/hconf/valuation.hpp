#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hconf/ext_real.hpp"

namespace hconf {

/// Default tolerance for boundary and state equality.
inline constexpr double kMergeTolerance = 1e-9;

/// Ordered mapping from variable name to extended real. Names are distinct;
/// order is significant for componentwise comparison.
class Valuation {
 public:
  Valuation() = default;
  Valuation(std::vector<std::string> names, std::vector<ExtReal> values);
  Valuation(std::initializer_list<std::pair<std::string, ExtReal>> entries);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ExtReal>& values() const { return values_; }

  bool contains(const std::string& name) const;
  /// Throws DomainError for an unknown name.
  ExtReal at(const std::string& name) const;

  friend bool operator==(const Valuation&, const Valuation&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<ExtReal> values_;
};

/// Projection onto `vars`, in the order given. Throws DomainError when a
/// variable is not part of `val`.
Valuation restrict(const Valuation& val, std::span<const std::string> vars);

/// Same variables in the same order and componentwise |a - b| <= tol.
bool approx_equal(const Valuation& a, const Valuation& b, double tol = kMergeTolerance);

/// Index of each name of `wanted` within `names`; throws DomainError.
std::vector<std::size_t> index_of(std::span<const std::string> names, std::span<const std::string> wanted);

/// Throws DomainError when `names` contains a duplicate.
void require_distinct(std::span<const std::string> names);

std::string to_string(const Valuation& val);

}  // namespace hconf
