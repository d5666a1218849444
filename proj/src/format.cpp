#include "hconf/format.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "hconf/errors.hpp"

namespace hconf {

std::string format_exact(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw DomainError("cannot format number");
  return {buf.data(), ptr};
}

std::string format_report(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.9g", v);
  return buf.data();
}

std::string format_report(ExtReal v) { return v.is_inf() ? "inf" : format_report(v.value()); }

double parse_double(const std::string& text) {
  if (text.empty()) throw DomainError("empty number");
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw DomainError("not a number: '" + text + "'");
  return v;
}

std::string to_string(ExtReal v) { return v.is_inf() ? "inf" : format_exact(v.value()); }

ExtReal parse_ext_real(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "+inf") return ExtReal::inf();
  double v = parse_double(text);
  if (!std::isfinite(v)) throw DomainError("not a finite number: '" + text + "'");
  return v;
}

}  // namespace hconf
