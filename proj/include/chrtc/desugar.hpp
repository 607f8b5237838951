#pragma once

// Translation of class, instance and functional-dependency declarations into
// CHR solving and presentation rules.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chrtc/confluence.hpp"
#include "chrtc/syntax.hpp"

namespace chrtc {

/// Allocates the generated rule names S<n>, P<n> and T<n>.
class RuleNamer {
 public:
  std::string solving() { return "S" + std::to_string(++s_); }
  std::string presentation() { return "P" + std::to_string(++p_); }
  std::string fundep() { return "T" + std::to_string(++t_); }

 private:
  std::size_t s_ = 0;
  std::size_t p_ = 0;
  std::size_t t_ = 0;
};

struct ClassRules {
  std::optional<ChrRule> superclass;  // C x ==> d1, ..., dm  (m >= 1)
  std::vector<ChrRule> presentation;  // C x, d_i <=> C x
  std::vector<ChrRule> fundeps;
};

ClassRules translate_class(const ClassDecl& decl, RuleNamer& names);
ChrRule translate_instance(const InstanceDecl& decl, RuleNamer& names);

/// One propagation rule per dependency. Determinant positions share their
/// variable between the two heads, so no guard is needed:
///   C x1..xn, C y1..yn ==> y0 = x0   with y_i = x_i for determinants.
std::vector<ChrRule> translate_fundep(const ClassDecl& decl, RuleNamer& names);

/// The functional, surjective and kinding rules for Kind1/Kind0 constraints.
std::vector<ChrRule> builtin_kind_ruleset();

/// Replaces each application with a variable head (f e) by a fresh variable
/// fe, innermost first, returning the Kind1 f e fe constraints introduced.
std::pair<Term, std::vector<ClassConstraint>> desugar_constructor_apps(const Term& t);

/// Full method type: forall (class params + locals). C params, local ctx => t.
TypeScheme method_scheme(const ClassDecl& cls, const MethodSig& m);

struct RuleOrigin {
  std::string description;  // e.g. "instance Ord [t]"
  SourceLoc loc;
};

struct RuleSet {
  Program solving;
  Program presentation;
  std::map<std::string, ClassDecl> classes;
  std::map<std::string, RuleOrigin> origins;
  TerminationCheck termination;
  ConfluenceVerdict confluence;
  std::vector<std::string> warnings;

  /// Location of the declaration that produced `rule`, or "?" if unknown.
  std::string describe(const std::string& rule) const;
};

struct BuildOptions {
  bool kind_constraints = false;
  bool check_confluence = true;
  std::size_t fuel = kDefaultFuel;
};

class DeclError : public LocatedError {
 public:
  DeclError(SourceLoc loc, const std::string& what,
            std::optional<ConfluenceVerdict> verdict = std::nullopt)
      : LocatedError(loc, what), verdict_(std::move(verdict)) {}
  const std::optional<ConfluenceVerdict>& verdict() const { return verdict_; }

 private:
  std::optional<ConfluenceVerdict> verdict_;
};

/// Translates every declaration (in source order), appends raw rules and,
/// if requested, the kind rules, then runs the termination precheck and the
/// confluence check. Throws DeclError on name or class errors and when the
/// solving rules are not confluent. A failed precheck only adds a warning and
/// checks confluence with fuel as the safety net.
RuleSet build_ruleset(const SurfaceProgram& program, const BuildOptions& options = {});

}  // namespace chrtc
