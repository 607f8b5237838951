#pragma once

#include <string>

#include "chrtc/constraint.hpp"
#include "chrtc/desugar.hpp"
#include "chrtc/engine.hpp"
#include "chrtc/parser.hpp"

namespace chrtc::testing {

inline ClassConstraint con(const std::string& text, VarScope& scope) {
  return std::get<ClassConstraint>(parse_goal(text, scope).front());
}

/// A type term; variables are shared through `scope`.
inline Term ty(const std::string& text, VarScope& scope) {
  return con("Wrap (" + text + ")", scope).args.front();
}

inline std::vector<Item> goal(const std::string& text, VarScope& scope) {
  return parse_goal(text, scope);
}

inline VarSet vars_of_scope(const VarScope& scope) {
  VarSet v;
  for (const auto& [_, var] : scope) v.insert(var);
  return v;
}

/// Derives the goal `text`, protecting its variables. The goal is parsed
/// before the scope is read, which a single call expression cannot ensure.
inline Derivation derive_goal(const std::string& text, const Program& program, VarScope& scope,
                              const DeriveOptions& options = {}) {
  auto g = goal(text, scope);
  return derive(std::move(g), program, vars_of_scope(scope), options);
}

inline RuleSet rules_of(const std::string& source, bool check_confluence = true) {
  BuildOptions o;
  o.check_confluence = check_confluence;
  return build_ruleset(parse_program(source), o);
}

inline const char* const kPrelude = R"(class Eq t where
  (==) :: t -> t -> Bool
class Eq t => Ord t where
  (<) :: t -> t -> Bool
instance Eq t => Eq [t]
instance Ord t => Ord [t]
)";

}  // namespace chrtc::testing
