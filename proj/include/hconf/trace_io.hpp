#pragma once

#include <filesystem>
#include <iosfwd>

#include "hconf/hybrid.hpp"

namespace hconf {

/// Trace CSV: header `t,j,<var>...,<act:NAME>...`, one row per sample,
/// rows sorted by (j, t), action columns hold `0` or `inf`. Continuous
/// columns precede action columns. Boundary samples appear once per segment.
void write_atrace_csv(std::ostream& out, const ATrace& trace);
void save_atrace_csv(const std::filesystem::path& path, const ATrace& trace);

/// Parses and validates every a-trace invariant; throws TraceFormatError
/// carrying the offending line number.
ATrace read_atrace_csv(std::istream& in);
ATrace load_atrace_csv(const std::filesystem::path& path);

}  // namespace hconf
