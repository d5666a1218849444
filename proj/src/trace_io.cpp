#include "hconf/trace_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "hconf/errors.hpp"
#include "hconf/format.hpp"

namespace hconf {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw TraceFormatError("trace csv line " + std::to_string(line) + ": " + msg);
}

}  // namespace

void write_atrace_csv(std::ostream& out, const ATrace& trace) {
  std::vector<std::string> ordered = trace.continuous_variables();
  auto acts = trace.action_variables();
  ordered.insert(ordered.end(), acts.begin(), acts.end());
  const ATrace& t = ordered == trace.variables() ? trace : restrict(trace, ordered);

  out << "t,j";
  for (const auto& v : ordered) out << ',' << v;
  out << '\n';
  for (std::size_t j = 0; j < t.num_segments(); ++j) {
    const auto& seg = t.segment(j);
    for (std::size_t i = 0; i < seg.size(); ++i) {
      out << format_exact(seg.time(i)) << ',' << j;
      for (auto v : seg.row(i)) out << ',' << to_string(v);
      out << '\n';
    }
  }
}

void save_atrace_csv(const std::filesystem::path& path, const ATrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_atrace_csv(out, trace);
}

ATrace read_atrace_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail(1, "missing header");
  ++lineno;
  auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "t" || header[1] != "j") fail(lineno, "header must start with t,j");
  std::vector<std::string> vars(header.begin() + 2, header.end());
  bool seen_action = false;
  for (const auto& v : vars) {
    if (v.empty()) fail(lineno, "empty column name");
    if (is_action_variable(v)) {
      seen_action = true;
    } else if (seen_action) {
      fail(lineno, "continuous column '" + v + "' after action columns");
    }
  }

  const std::size_t nv = vars.size();
  std::vector<Trajectory> segments;
  std::vector<double> times;
  std::vector<ExtReal> values;
  long current = -1;
  auto flush = [&] {
    if (times.empty()) return;
    try {
      segments.emplace_back(vars, std::move(times), std::move(values));
    } catch (const DomainError& e) {
      fail(lineno, std::string("segment ") + std::to_string(current) + ": " + e.what());
    }
    times.clear();
    values.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() != nv + 2) fail(lineno, "expected " + std::to_string(nv + 2) + " columns");
    double t = 0.0;
    long j = 0;
    try {
      t = parse_double(cells[0]);
      double jd = parse_double(cells[1]);
      if (jd != static_cast<double>(static_cast<long>(jd)) || jd < 0) fail(lineno, "segment index must be a non-negative integer");
      j = static_cast<long>(jd);
    } catch (const DomainError& e) {
      fail(lineno, e.what());
    }
    if (j != current) {
      if (j != current + 1) fail(lineno, "segment indices must be consecutive from 0");
      flush();
      current = j;
    }
    times.push_back(t);
    for (std::size_t k = 0; k < nv; ++k) {
      try {
        ExtReal v = parse_ext_real(cells[k + 2]);
        if (is_action_variable(vars[k]) && !(v.is_inf() || v.value() == 0.0)) {
          fail(lineno, "action column " + vars[k] + " must be 0 or inf");
        }
        values.push_back(v);
      } catch (const DomainError& e) {
        fail(lineno, e.what());
      }
    }
  }
  flush();
  return ATrace(std::move(vars), std::move(segments));
}

ATrace load_atrace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot open " + path.string());
  try {
    return read_atrace_csv(in);
  } catch (const TraceFormatError& e) {
    throw TraceFormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hconf
