#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chrtc/syntax.hpp"

namespace chrtc {

/// Parses a source file and validates constructor and class arities.
/// Throws ParseError.
SurfaceProgram parse_program(std::string_view source);

/// Variables named in a piece of standalone syntax, by source name.
using VarScope = std::map<std::string, Var>;

/// A goal for the CHR engine: `True` or comma-separated class constraints
/// and equations. Variables are added to `scope` (existing entries reused).
std::vector<Item> parse_goal(std::string_view text, VarScope& scope);

/// A single raw CHR rule in dump syntax.
ChrRule parse_rule(std::string_view text);

/// A type scheme `[context =>] type`; all its variables are quantified.
TypeScheme parse_scheme(std::string_view text);

/// Operator precedence and associativity used by the expression parser.
struct Fixity {
  enum class Assoc { left, right, none };
  int precedence = 9;
  Assoc assoc = Assoc::left;
};
Fixity fixity_of(const std::string& op);

}  // namespace chrtc
