#pragma once

#include <utility>
#include <vector>

#include "chrtc/engine.hpp"

namespace chrtc {

/// Representation of a final state up to renaming of non-protected
/// variables. Two final states are variants iff their forms are equal.
struct CanonicalForm {
  bool unsatisfiable = false;
  std::vector<std::pair<Var, Term>> bindings;  // protected var -> image, by stamp
  std::vector<ClassConstraint> store;          // sorted, duplicates merged
  std::vector<Item> goal;                      // non-empty only for non-final states

  friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

/// Stamps at or above this value denote canonical placeholder variables.
inline constexpr VarId kCanonicalBase = VarId{1} << 62;
inline bool is_canonical_var(const Var& v) { return v.id >= kCanonicalBase; }

CanonicalForm canonicalize(const ChrState& state);
CanonicalForm canonicalize(const Derivation& d);

/// Rewrites h so that no protected variable is bound to a non-protected
/// variable (the local one is bound to the protected one instead).
Substitution orient_protected(const Substitution& h, const VarSet& protected_vars);

bool variants(const ChrState& a, const ChrState& b);

}  // namespace chrtc
