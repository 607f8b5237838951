#pragma once

#include <vector>

#include "chrtc/constraint.hpp"

namespace chrtc {

/// Qualified type  forall quantified. context => type.
struct TypeScheme {
  std::vector<Var> quantified;
  std::vector<ClassConstraint> context;
  Term type;

  friend bool operator==(const TypeScheme&, const TypeScheme&) = default;
};

/// A monomorphic scheme (nothing quantified, empty context).
inline TypeScheme mono(Term t) { return TypeScheme{{}, {}, std::move(t)}; }

/// Free variables of the scheme that are not quantified.
VarSet free_vars(const TypeScheme& s);

/// Fresh instance of the scheme: its context and type with every quantified
/// variable replaced by a new one.
std::pair<std::vector<ClassConstraint>, Term> instantiate(const TypeScheme& s);

}  // namespace chrtc
