#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>

namespace hconf {

/// A real number or the distinguished value infinity, which is larger than
/// every finite value. Action occurrences are encoded as infinity.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  // Implicit on purpose: a finite double is an ExtReal.
  constexpr ExtReal(double v) : v_(v) {}  // NOLINT

  static constexpr ExtReal inf() { return ExtReal(std::numeric_limits<double>::infinity()); }

  constexpr bool is_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_finite() const { return !is_inf(); }

  /// Finite value; infinity maps to +inf for arithmetic callers that handle it.
  constexpr double value() const { return v_; }

  friend constexpr bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend constexpr std::partial_ordering operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

 private:
  double v_ = 0.0;
};

/// |a - b| over the extended reals with inf - inf = 0 and |c - inf| = inf.
inline ExtReal abs_diff(ExtReal a, ExtReal b) {
  if (a.is_inf() && b.is_inf()) return 0.0;
  if (a.is_inf() || b.is_inf()) return ExtReal::inf();
  return std::fabs(a.value() - b.value());
}

/// "inf" for infinity, shortest round-trip decimal otherwise.
std::string to_string(ExtReal v);

/// Accepts "inf" (any case) or a decimal number. Throws DomainError.
ExtReal parse_ext_real(const std::string& text);

}  // namespace hconf
