#pragma once

// Critical pairs, joinability and the confluence verdict, plus the syntactic
// termination precheck that makes the verdict meaningful.

#include <optional>
#include <string>
#include <vector>

#include "chrtc/canonical.hpp"
#include "chrtc/engine.hpp"
#include "chrtc/syntax.hpp"

namespace chrtc {

/// Two rules overlapping on part of their heads, and the two states reached
/// by firing either rule on the overlapped constraints.
struct CriticalPair {
  std::string rule1;
  std::string rule2;
  std::vector<ClassConstraint> overlap;  // shared head part, under `unifier`
  Substitution unifier;                  // heads, overlap and guard equations
  ChrState left;                         // rule1 fired
  ChrState right;                        // rule2 fired
  bool left_fails = false;               // rule1 has a False body
  bool right_fails = false;              // rule2 has a False body
};

/// Every pair of rules (a rule also with a renamed copy of itself) and every
/// nonempty injective overlap of their heads whose unification, together with
/// both guards, is satisfiable. Deterministic order.
std::vector<CriticalPair> critical_pairs(const Program& program);

enum class JoinStatus { joinable, not_joinable, inconclusive };

struct JoinResult {
  JoinStatus status = JoinStatus::joinable;
  Derivation left;
  Derivation right;
  CanonicalForm left_form;
  CanonicalForm right_form;
};

JoinResult joinable(const CriticalPair& pair, const Program& program,
                    std::size_t fuel = kDefaultFuel);

enum class Verdict { confluent, non_confluent, inconclusive };
std::string_view to_string(Verdict v);

struct ConfluenceOptions {
  std::size_t fuel = kDefaultFuel;
  /// Reason the termination precheck failed, if it did.
  std::optional<std::string> termination_failure;
  /// Check anyway when the precheck failed, treating fuel exhaustion as
  /// inconclusive.
  bool fuel_guarded = false;
};

struct ConfluenceVerdict {
  Verdict verdict = Verdict::confluent;
  std::string reason;  // set when inconclusive
  std::size_t pairs_checked = 0;
  std::optional<CriticalPair> witness;
  std::optional<JoinResult> witness_result;

  bool confluent() const { return verdict == Verdict::confluent; }
};

ConfluenceVerdict check_confluence(const Program& program, const ConfluenceOptions& options = {});

struct TerminationCheck {
  bool passed = true;
  std::string reason;                  // first failure
  std::vector<std::string> raw_rules;  // raw rules that need fuel-guarded treatment
};

/// Passes iff the superclass graph is acyclic and every instance context
/// constraint uses only head variables and is strictly smaller (constructor
/// nodes) than the instance head.
TerminationCheck check_termination_syntactic(const SurfaceProgram& program);

}  // namespace chrtc
