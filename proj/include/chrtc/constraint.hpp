#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chrtc/term.hpp"

namespace chrtc {

/// A class (CHR) constraint `C t1 ... tn`.
struct ClassConstraint {
  std::string cls;
  std::vector<Term> args;

  friend bool operator==(const ClassConstraint&, const ClassConstraint&) = default;
};

ClassConstraint apply(const Substitution& s, const ClassConstraint& c);
ClassConstraint instantiate(const Matcher& m, const ClassConstraint& c);
void collect_vars(const ClassConstraint& c, std::vector<Var>& out);
bool is_ground(const ClassConstraint& c);
int compare(const ClassConstraint& a, const ClassConstraint& b);

struct ConstraintLess {
  bool operator()(const ClassConstraint& a, const ClassConstraint& b) const {
    return compare(a, b) < 0;
  }
};

enum class GuardKind { equal, not_equal };

struct Guard {
  GuardKind kind = GuardKind::equal;
  Term lhs;
  Term rhs;

  friend bool operator==(const Guard&, const Guard&) = default;
};

/// One-sided match of a rule head against a store constraint normalized by h.
/// Only pattern variables are bound.
std::optional<Matcher> match_head(const ClassConstraint& pattern,
                                  const ClassConstraint& candidate,
                                  const Substitution& h);

/// Matches `pattern` against the already-normalized `candidate`, extending m.
bool match_into(const ClassConstraint& pattern, const ClassConstraint& candidate, Matcher& m);

enum class GuardStatus { entailed, refuted, undetermined };

/// Evaluates a single guard conjunct. Equations are entailed when h implies
/// them for some value of the guard's local variables; disequations use the
/// constructor-clash test, plus any disequalities already known to hold.
GuardStatus evaluate_guard(const Guard& g, const Matcher& theta, const Substitution& h,
                           std::span<const Equation> known_disequalities = {});

/// True iff every conjunct is entailed. Never modifies h.
bool guard_entailed(std::span<const Guard> guard, const Matcher& theta, const Substitution& h,
                    std::span<const Equation> known_disequalities = {});

}  // namespace chrtc
