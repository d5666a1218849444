#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hconf/automaton.hpp"

namespace hconf {

/// Line-oriented automaton description:
///
///   automaton thermostat
///   internal var x
///   outputs var y
///   inputs action ON
///   outputs action OFF
///   location mode_ON
///     flow x' = -x + 20
///     invariant x <= 20
///     output y = x
///   transition mode_OFF -> mode_ON on ON guard x <= 2 reset x = x
///   init mode_ON x = 5
///
/// `#` starts a comment. Declarations list names separated by commas.
/// `guard` and `reset` are optional. Throws ParseError with the line and
/// column of the offending text.
Hioa parse_automaton(std::string_view text);
Hioa load_automaton(const std::filesystem::path& path);

/// Inverse of parse_automaton up to whitespace and comments.
std::string print_automaton(const Hioa& a);

}  // namespace hconf
