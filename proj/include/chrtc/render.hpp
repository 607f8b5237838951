#pragma once

// Concrete syntax for terms, constraints, rules, states and schemes. The rule
// syntax produced here is accepted back by the parser.

#include <map>
#include <set>
#include <span>
#include <string>

#include "chrtc/engine.hpp"
#include "chrtc/scheme.hpp"

namespace chrtc {

/// Assigns stable display names to variables on first use.
class NameSupply {
 public:
  enum class Style {
    hints,    // the variable's hint, suffixed _1, _2, ... on clashes
    letters,  // a, b, c, ..., z, a1, b1, ...
  };

  explicit NameSupply(Style style = Style::hints) : style_(style) {}

  const std::string& name(const Var& v);

 private:
  std::string next_candidate(const Var& v);

  Style style_;
  std::map<Var, std::string> names_;
  std::set<std::string> used_;
  std::size_t letters_ = 0;
};

std::string render(const Term& t, NameSupply& names);
std::string render(const ClassConstraint& c, NameSupply& names);
std::string render(const Item& item, NameSupply& names);
std::string render(const Guard& g, NameSupply& names);
/// Comma-separated conjunction, or "True" when empty.
std::string render_items(std::span<const Item> items, NameSupply& names);
std::string render_constraints(std::span<const ClassConstraint> cs, NameSupply& names);
std::string render_substitution(const Substitution& h, NameSupply& names);

/// `name @ H1, ..., Hn <=> g | B` (or `==>`), guards omitted when empty.
std::string render(const ChrRule& r);

/// `goal=...<TAB>store=...<TAB>h=...`; goal and store are shown normalized by h.
std::string render_state(const ChrState& s, NameSupply& names);

/// `idx<TAB>transition<TAB>rule<TAB>state` per step, one line each.
std::string render_trace(const Derivation& d, NameSupply& names);

/// `(C1, C2) => t`, variables lettered by first printed occurrence.
std::string render(const TypeScheme& s);
std::string render_signature(const std::string& name, const TypeScheme& s);

/// Convenience for tests and diagnostics; uses a private NameSupply.
std::string show(const Term& t);
std::string show(const ClassConstraint& c);

}  // namespace chrtc
