#include "hconf/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hconf/errors.hpp"
#include "hconf/format.hpp"

namespace hconf {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return pos_ + 1; }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, column()); }

  std::string ident(const char* what) {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail(std::string("expected ") + what);
    std::size_t b = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(b, pos_ - b));
  }

  bool peek_word(std::string_view w) {
    skip_ws();
    if (text_.substr(pos_, w.size()) != w) return false;
    std::size_t end = pos_ + w.size();
    return end >= text_.size() || !is_ident_char(text_[end]);
  }

  void expect_word(std::string_view w) {
    if (!peek_word(w)) fail("expected '" + std::string(w) + "'");
    pos_ += w.size();
  }

  void expect(std::string_view sym) {
    skip_ws();
    if (text_.substr(pos_, sym.size()) != sym) fail("expected '" + std::string(sym) + "'");
    pos_ += sym.size();
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  /// Text up to (not including) the first top-level occurrence of any stop
  /// word, or the end of the line.
  std::string_view until(std::initializer_list<std::string_view> stops, std::size_t& col) {
    skip_ws();
    col = column();
    std::size_t b = pos_;
    std::size_t e = text_.size();
    for (std::size_t i = pos_; i < text_.size(); ++i) {
      if (i > 0 && is_ident_char(text_[i - 1])) continue;
      for (auto s : stops) {
        if (text_.substr(i, s.size()) == s && (i + s.size() >= text_.size() || !is_ident_char(text_[i + s.size()]))) {
          e = i;
          break;
        }
      }
      if (e != text_.size()) break;
    }
    pos_ = e;
    std::string_view out = text_.substr(b, e - b);
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.remove_suffix(1);
    return out;
  }

  /// Rest of the line split at top-level commas.
  std::vector<std::pair<std::string_view, std::size_t>> comma_list() {
    skip_ws();
    std::vector<std::pair<std::string_view, std::size_t>> out;
    std::size_t b = pos_;
    int depth = 0;
    for (std::size_t i = pos_; i <= text_.size(); ++i) {
      char c = i < text_.size() ? text_[i] : ',';
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth <= 0) {
        std::string_view item = text_.substr(b, i - b);
        std::size_t lead = 0;
        while (lead < item.size() && std::isspace(static_cast<unsigned char>(item[lead]))) ++lead;
        item.remove_prefix(lead);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
        out.emplace_back(item, b + lead + 1);
        b = i + 1;
      }
    }
    pos_ = text_.size();
    return out;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

struct Parser {
  HioaDefinition def;
  bool named = false;
  std::vector<std::string> vars;
  std::map<std::string, std::size_t> location_lines;
  std::vector<std::pair<std::size_t, std::size_t>> transition_refs;  // (transition, line)
  std::vector<std::size_t> init_lines;

  bool declared_var(const std::string& n) const { return std::find(vars.begin(), vars.end(), n) != vars.end(); }

  bool declared_action(const std::string& n) const {
    for (const auto* list : {&def.input_actions, &def.output_actions, &def.internal_actions}) {
      if (std::find(list->begin(), list->end(), n) != list->end()) return true;
    }
    return false;
  }

  void check_vars(LineCursor& c, const std::vector<std::string>& used, std::size_t col) const {
    for (const auto& v : used) {
      if (!declared_var(v)) throw ParseError("undeclared variable '" + v + "'", c.line(), col);
    }
  }

  Expr expr(LineCursor& c, std::string_view text, std::size_t col) const {
    if (text.empty()) throw ParseError("expected expression", c.line(), col);
    Expr e = parse_expr(text, c.line(), col);
    check_vars(c, e.variables(), col);
    return e;
  }

  Predicate pred(LineCursor& c, std::string_view text, std::size_t col) const {
    if (text.empty()) throw ParseError("expected predicate", c.line(), col);
    Predicate p = parse_predicate(text, c.line(), col);
    check_vars(c, p.variables(), col);
    return p;
  }

  std::vector<Assignment> assignments(LineCursor& c) const {
    std::vector<Assignment> out;
    for (auto [item, col] : c.comma_list()) {
      auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected 'name = expression'", c.line(), col);
      LineCursor lhs(item.substr(0, eq), c.line());
      std::string name = lhs.ident("variable name");
      if (!lhs.at_end()) throw ParseError("expected '='", c.line(), col + lhs.column() - 1);
      if (!declared_var(name)) throw ParseError("undeclared variable '" + name + "'", c.line(), col);
      out.emplace_back(name, expr(c, item.substr(eq + 1), col + eq + 1));
    }
    return out;
  }

  Location& current(LineCursor& c, const char* what) {
    if (def.locations.empty()) c.fail(std::string("'") + what + "' outside a location");
    return def.locations.back();
  }

  void declaration(LineCursor& c, const std::string& scope) {
    bool is_var = c.peek_word("var");
    if (is_var) {
      c.expect_word("var");
    } else {
      c.expect_word("action");
    }
    std::vector<std::string>* target = nullptr;
    if (scope == "inputs") target = is_var ? &def.input_vars : &def.input_actions;
    if (scope == "outputs") target = is_var ? &def.output_vars : &def.output_actions;
    if (scope == "internal") target = is_var ? &def.internal_vars : &def.internal_actions;
    for (auto [item, col] : c.comma_list()) {
      LineCursor ic(item, c.line());
      std::string name;
      try {
        name = ic.ident(is_var ? "variable name" : "action name");
      } catch (const ParseError&) {
        throw ParseError(is_var ? "expected variable name" : "expected action name", c.line(), col);
      }
      if (!ic.at_end()) throw ParseError("unexpected text after name", c.line(), col + ic.column() - 1);
      if (is_var ? declared_var(name) : declared_action(name)) {
        throw ParseError("duplicate declaration of '" + name + "'", c.line(), col);
      }
      if (is_var) vars.push_back(name);
      target->push_back(name);
    }
  }

  void line(LineCursor& c) {
    c.at_end();
    std::size_t kw_col = c.column();
    std::string kw = c.ident("keyword");
    if (kw == "automaton") {
      if (named) c.fail("second 'automaton' line");
      def.name = c.ident("automaton name");
      named = true;
    } else if (kw == "inputs" || kw == "outputs" || kw == "internal") {
      declaration(c, kw);
      return;
    } else if (kw == "location") {
      std::string name = c.ident("location name");
      if (auto it = location_lines.find(name); it != location_lines.end()) {
        c.fail("duplicate location '" + name + "' (first declared on line " + std::to_string(it->second) + ")");
      }
      location_lines[name] = c.line();
      def.locations.push_back(Location{name, {}, {}, {}});
    } else if (kw == "flow") {
      Location& loc = current(c, "flow");
      std::string var = c.ident("variable name");
      if (!declared_var(var)) c.fail("undeclared variable '" + var + "'");
      c.expect("'");
      c.expect("=");
      std::size_t col = 0;
      auto text = c.until({}, col);
      loc.flow.emplace_back(var, expr(c, text, col));
    } else if (kw == "invariant") {
      Location& loc = current(c, "invariant");
      std::size_t col = 0;
      auto text = c.until({}, col);
      loc.invariant = pred(c, text, col);
    } else if (kw == "output") {
      Location& loc = current(c, "output");
      std::string var = c.ident("variable name");
      if (!declared_var(var)) c.fail("undeclared variable '" + var + "'");
      c.expect("=");
      std::size_t col = 0;
      auto text = c.until({}, col);
      loc.output_map.emplace_back(var, expr(c, text, col));
    } else if (kw == "transition") {
      TransitionRule r;
      r.source = c.ident("source location");
      c.expect("->");
      r.target = c.ident("target location");
      c.expect_word("on");
      c.at_end();
      std::size_t act_col = c.column();
      r.action = c.ident("action name");
      if (!declared_action(r.action)) throw ParseError("undeclared action '" + r.action + "'", c.line(), act_col);
      if (c.peek_word("guard")) {
        c.expect_word("guard");
        std::size_t col = 0;
        auto text = c.until({"reset"}, col);
        r.guard = pred(c, text, col);
      }
      if (c.peek_word("reset")) {
        c.expect_word("reset");
        r.reset = assignments(c);
      }
      transition_refs.emplace_back(def.transitions.size(), c.line());
      def.transitions.push_back(std::move(r));
    } else if (kw == "init") {
      State s;
      s.location = c.ident("location name");
      std::vector<std::string> names;
      std::vector<ExtReal> values;
      if (!c.at_end()) {
        for (auto& [name, e] : assignments(c)) {
          if (!e.variables().empty()) c.fail("initial values must be constants");
          names.push_back(name);
          values.emplace_back(e.eval(Valuation{}));
        }
      }
      s.values = Valuation(names, values);
      init_lines.push_back(c.line());
      def.start.push_back(std::move(s));
    } else {
      throw ParseError("unknown keyword '" + kw + "'", c.line(), kw_col);
    }
    if (!c.at_end()) c.fail("unexpected text");
  }

  void finish(std::size_t last_line) {
    if (!named) throw ParseError("missing 'automaton' line", 1, 1);
    auto check_loc = [&](const std::string& name, std::size_t line) {
      if (!location_lines.contains(name)) throw ParseError("undeclared location '" + name + "'", line, 1);
    };
    for (auto [idx, line] : transition_refs) {
      check_loc(def.transitions[idx].source, line);
      check_loc(def.transitions[idx].target, line);
    }
    for (std::size_t i = 0; i < def.start.size(); ++i) check_loc(def.start[i].location, init_lines[i]);
    if (def.start.empty()) throw ParseError("missing 'init' line", last_line, 1);
  }
};

}  // namespace

Hioa parse_automaton(std::string_view text) {
  Parser p;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    LineCursor c(raw, lineno);
    if (c.at_end()) continue;
    p.line(c);
  }
  p.finish(lineno);
  try {
    return Hioa(std::move(p.def));
  } catch (const ModelError& e) {
    throw ParseError(e.what(), lineno, 1);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), lineno, 1);
  }
}

Hioa load_automaton(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_automaton(ss.str());
  } catch (const ParseError& e) {
    throw ParseError::in_file(path.string(), e);
  }
}

namespace {

void names_line(std::ostream& out, const char* scope, const char* kind, const std::vector<std::string>& names) {
  if (names.empty()) return;
  out << scope << ' ' << kind << ' ';
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  out << '\n';
}

void assignment_list(std::ostream& out, const std::vector<Assignment>& list) {
  for (std::size_t i = 0; i < list.size(); ++i) out << (i ? ", " : "") << list[i].first << " = " << to_string(list[i].second);
}

}  // namespace

std::string print_automaton(const Hioa& a) {
  const auto& d = a.definition();
  std::ostringstream out;
  out << "automaton " << d.name << '\n';
  names_line(out, "inputs", "var", d.input_vars);
  names_line(out, "outputs", "var", d.output_vars);
  names_line(out, "internal", "var", d.internal_vars);
  names_line(out, "inputs", "action", d.input_actions);
  names_line(out, "outputs", "action", d.output_actions);
  names_line(out, "internal", "action", d.internal_actions);
  for (const auto& loc : d.locations) {
    out << "\nlocation " << loc.name << '\n';
    for (const auto& [v, e] : loc.flow) out << "  flow " << v << "' = " << to_string(e) << '\n';
    if (!loc.invariant.is_true()) out << "  invariant " << to_string(loc.invariant) << '\n';
    for (const auto& [v, e] : loc.output_map) out << "  output " << v << " = " << to_string(e) << '\n';
  }
  if (!d.transitions.empty()) out << '\n';
  for (const auto& r : d.transitions) {
    out << "transition " << r.source << " -> " << r.target << " on " << r.action;
    if (!r.guard.is_true()) out << " guard " << to_string(r.guard);
    if (!r.reset.empty()) {
      out << " reset ";
      assignment_list(out, r.reset);
    }
    out << '\n';
  }
  out << '\n';
  for (const auto& s : d.start) {
    out << "init " << s.location;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      double v = s.values.values()[i].value();
      out << (i ? ", " : " ") << s.values.names()[i] << " = " << (v < 0 ? "-" : "") << format_exact(std::fabs(v));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hconf
