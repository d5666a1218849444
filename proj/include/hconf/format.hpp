#pragma once

#include <string>

#include "hconf/ext_real.hpp"

namespace hconf {

/// Shortest decimal that round-trips to the same double.
std::string format_exact(double v);

/// Nine significant digits, used for every report value.
std::string format_report(double v);
std::string format_report(ExtReal v);

/// Parses a decimal number; the whole string must be consumed.
/// Throws DomainError.
double parse_double(const std::string& text);

}  // namespace hconf
