#pragma once

// Constraint generation, CHR solving and let-generalization for the
// expression language, plus presentation, the ambiguity check and signature
// checking.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chrtc/desugar.hpp"
#include "chrtc/syntax.hpp"

namespace chrtc {

/// Name is not bound in the environment.
class ScopeError : public LocatedError {
  using LocatedError::LocatedError;
};

class TypeError : public LocatedError {
 public:
  enum class Kind { unsatisfiable, fuel };

  TypeError(SourceLoc loc, const std::string& what, Kind kind, Derivation derivation)
      : LocatedError(loc, what), kind_(kind), derivation_(std::move(derivation)) {}
  Kind kind() const { return kind_; }
  const Derivation& derivation() const { return derivation_; }

 private:
  Kind kind_;
  Derivation derivation_;
};

class TypeEnv {
 public:
  const TypeScheme* find(const std::string& name) const;
  void bind(const std::string& name, TypeScheme scheme);
  /// Free type variables of all bindings (the protected variables).
  VarSet free_vars() const;
  const std::map<std::string, TypeScheme>& entries() const { return entries_; }

 private:
  std::map<std::string, TypeScheme> entries_;
};

struct InferOptions {
  std::size_t fuel = kDefaultFuel;
  bool kind_constraints = false;
};

/// Type and constraint conjunction for an expression.
struct Generated {
  Term type;
  std::vector<Item> constraints;
};

struct AmbiguityResult {
  bool inconclusive = false;  // the check ran out of fuel
  std::vector<Var> ambiguous;

  bool unambiguous() const { return !inconclusive && ambiguous.empty(); }
};

struct SignatureResult {
  enum class Status { ok, body_mismatch, unentailed };
  Status status = Status::ok;
  std::string message;
  std::optional<ClassConstraint> constraint;  // the unentailed one
  std::vector<Item> deferred;                 // constraints over environment variables only

  bool ok() const { return status == Status::ok; }
};

class Inferencer {
 public:
  Inferencer(const RuleSet& rules, InferOptions options = {})
      : rules_(rules), options_(options) {}

  /// Constraint generation. Let-bound groups inside `e` are solved and
  /// generalized on the way; their constraints over enclosing variables are
  /// part of the result.
  Generated generate(const ExprPtr& e, const TypeEnv& env) const;

  /// Solves `g` and generalizes over variables not free in `env`. Throws
  /// TypeError. Constraints mentioning no generalizable variable are
  /// returned in `deferred` (with the bindings of environment variables).
  TypeScheme solve_and_generalize(const Generated& g, const TypeEnv& env, SourceLoc loc,
                                  const std::string& name, std::vector<Item>* deferred) const;

  /// Removes constraints implied by class contexts, using the presentation rules.
  TypeScheme present(const TypeScheme& s) const;

  AmbiguityResult check_ambiguity(const TypeScheme& s) const;

  /// Checks the generated constraints of a binding against its declared
  /// scheme: declared variables are rigid, the types must agree, and each
  /// remaining constraint must lie in the solved closure of the declared
  /// context.
  SignatureResult check_signature(const TypeScheme& declared, const Generated& g,
                                  const TypeEnv& env) const;

  /// Generalized schemes for one binding group, in dependency order, added
  /// to `env`. Returns constraints deferred to the enclosing scope.
  std::vector<Item> infer_group(const std::vector<LocalBinding>& group, TypeEnv& env) const;

  /// Constraints from `scheme` instantiated, with --kind-constraints applied.
  std::pair<std::vector<ClassConstraint>, Term> instantiate_scheme(const TypeScheme& s) const;

  const RuleSet& rules() const { return rules_; }
  const InferOptions& options() const { return options_; }

 private:
  Derivation run(std::vector<Item> goal, const Program& program, VarSet v) const;
  Generated literal(const ELit& lit) const;

  const RuleSet& rules_;
  InferOptions options_;
};

/// Bindings grouped into strongly connected components of the reference
/// graph, dependencies first; ties follow source order.
std::vector<std::vector<std::size_t>> binding_groups(
    const std::vector<std::pair<std::string, ExprPtr>>& bindings);

/// Free term variables of an expression.
std::set<std::string> free_names(const Expr& e);

struct BindingReport {
  std::string name;
  SourceLoc loc;
  std::optional<TypeScheme> solved;     // before presentation
  std::optional<TypeScheme> presented;  // what is shown
  AmbiguityResult ambiguity;
  std::optional<TypeScheme> declared;
  std::optional<SignatureResult> signature;
  std::optional<std::string> error;  // located diagnostic
  bool fuel_exhausted = false;
};

/// Initial environment: builtins, data constructors, class methods and
/// primitive signatures (signatures without a binding).
TypeEnv initial_env(const SurfaceProgram& program, const RuleSet& rules);

/// The whole pipeline for the top-level bindings of an already-built rule
/// set. Reports are in source order.
std::vector<BindingReport> infer_program(const SurfaceProgram& program, const RuleSet& rules,
                                         const InferOptions& options = {});

}  // namespace chrtc
