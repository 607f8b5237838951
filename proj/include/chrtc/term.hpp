#pragma once

// First-order Herbrand terms, idempotent substitutions and unification.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace chrtc {

using VarId = std::uint64_t;

/// A type variable. Identity is the freshness stamp `id`; `hint` is only
/// used when printing.
struct Var {
  VarId id = 0;
  std::string hint;

  friend bool operator==(const Var& a, const Var& b) { return a.id == b.id; }
  friend std::strong_ordering operator<=>(const Var& a, const Var& b) {
    return a.id <=> b.id;
  }
};

using VarSet = std::set<Var>;

/// Returns a variable with a process-unique stamp.
Var fresh_var(std::string hint);

// Constructor names with a fixed meaning.
inline constexpr const char* kArrow = "->";
inline constexpr const char* kList = "[]";
inline constexpr const char* kUnit = "()";
inline constexpr const char* kTypeApp = "@";  // application with a variable head
std::string tuple_ctor(std::size_t arity);
bool is_tuple_ctor(const std::string& name);

class Term {
 public:
  Term();  // the unit constructor `()`

  static Term variable(Var v);
  static Term fresh(std::string hint);
  static Term app(std::string ctor, std::vector<Term> args = {});
  static Term arrow(Term from, Term to);
  static Term list(Term elem);

  bool is_var() const;
  const Var& var() const;
  const std::string& ctor() const;
  const std::vector<Term>& args() const;
  bool is_ground() const;

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Total order: variables (by stamp) before applications; applications by
/// constructor name, arity, then arguments.
int compare(const Term& a, const Term& b);

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};

/// Number of constructor nodes.
std::size_t term_size(const Term& t);
std::size_t term_depth(const Term& t);
bool occurs(const Var& v, const Term& t);

/// Free variables in first-occurrence order (no duplicates).
void collect_vars(const Term& t, std::vector<Var>& out);
std::vector<Var> vars_of(const Term& t);

struct Equation {
  Term lhs;
  Term rhs;

  friend bool operator==(const Equation&, const Equation&) = default;
};

/// Finite idempotent mapping from variables to terms.
class Substitution {
 public:
  Substitution() = default;
  /// Throws std::invalid_argument when the mapping is not idempotent (some
  /// mapped variable occurs in an image term).
  explicit Substitution(std::map<Var, Term> bindings);

  const Term* find(const Var& v) const;
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<Var, Term>& bindings() const { return bindings_; }

  /// Bindings whose key lies in `keep`.
  Substitution restricted(const VarSet& keep) const;

  /// Adds v := t, composing it into the existing images. Preconditions: v is
  /// unbound, t is normalized under this substitution and v does not occur in t.
  void bind(const Var& v, const Term& t);

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<Var, Term> bindings_;
};

Term apply(const Substitution& s, const Term& t);
Equation apply(const Substitution& s, const Equation& e);

/// Most general unifier of `eqs` extending `base`, or nullopt on a constructor
/// clash or occurs-check failure. Variables in `rigid` behave like constants:
/// they are never bound except to a non-rigid variable's benefit.
std::optional<Substitution> unify(std::span<const Equation> eqs,
                                  const Substitution& base = {},
                                  const VarSet* rigid = nullptr);
std::optional<Substitution> unify(const Term& a, const Term& b,
                                  const Substitution& base = {},
                                  const VarSet* rigid = nullptr);

/// One-pass simultaneous replacement; unlike Substitution it needs not be
/// idempotent (used for rule instantiation and renaming).
using Matcher = std::map<Var, Term>;
Term instantiate(const Matcher& m, const Term& t);

/// One-sided matching of `pattern` against `target`, extending `m`.
/// Variables of `target` are never bound.
bool match_term(const Term& pattern, const Term& target, Matcher& m);

}  // namespace chrtc
