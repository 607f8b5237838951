#pragma once

// Surface syntax of the mini-Haskell language: declarations and expressions.
// Type-level syntax is represented directly as Terms; each declaration has
// its own variable scope.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "chrtc/rule.hpp"
#include "chrtc/scheme.hpp"

namespace chrtc {

struct SourceLoc {
  std::size_t line = 0;  // 1-based; 0 means unknown
  std::size_t column = 0;

  std::string str() const;
};

/// Error with a source location; the message does not repeat the location.
class LocatedError : public std::runtime_error {
 public:
  LocatedError(SourceLoc loc, const std::string& what) : std::runtime_error(what), loc_(loc) {}
  const SourceLoc& loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

class ParseError : public LocatedError {
  using LocatedError::LocatedError;
};

// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LocalBinding;

struct EVar {
  std::string name;  // operators are stored without parentheses
};
struct ECon {
  std::string name;
};
struct ELit {
  enum class Kind { integer, character, string };
  Kind kind = Kind::integer;
  std::string text;
};
struct EApp {
  ExprPtr fn;
  ExprPtr arg;
};
struct ELam {
  std::vector<std::string> params;  // "_" is a wildcard
  ExprPtr body;
};
struct ELet {
  std::vector<LocalBinding> bindings;  // one recursive group, sorted by dependencies later
  ExprPtr body;
};
struct EIf {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;
};
struct EList {
  std::vector<ExprPtr> elems;
};
struct ETuple {
  std::vector<ExprPtr> elems;  // size >= 2
};

struct Expr {
  std::variant<EVar, ECon, ELit, EApp, ELam, ELet, EIf, EList, ETuple> node;
  SourceLoc loc;
};

template <typename T>
ExprPtr make_expr(T node, SourceLoc loc) {
  return std::make_shared<const Expr>(Expr{std::move(node), loc});
}

struct LocalBinding {
  std::string name;
  std::optional<TypeScheme> signature;
  ExprPtr expr;
  SourceLoc loc;
};

// Declarations

/// (x_from...) ~> x_to, as indices into the class parameters.
struct FunDep {
  std::vector<std::size_t> from;
  std::size_t to = 0;

  friend bool operator==(const FunDep&, const FunDep&) = default;
};

struct MethodSig {
  std::string name;
  TypeScheme scheme;  // as written: local context only, all variables quantified
  SourceLoc loc;
};

struct ClassDecl {
  std::string name;
  std::vector<Var> params;
  std::vector<ClassConstraint> context;
  std::vector<FunDep> fundeps;
  std::vector<MethodSig> methods;
  SourceLoc loc;
};

struct InstanceDecl {
  std::string cls;
  std::vector<Term> args;
  std::vector<ClassConstraint> context;
  SourceLoc loc;
};

struct RawRule {
  ChrRule rule;
  SourceLoc loc;
};

struct DataCon {
  std::string name;
  std::vector<Term> fields;
};

struct DataDecl {
  std::string name;
  std::vector<Var> params;
  std::vector<DataCon> constructors;
  SourceLoc loc;
};

/// `f :: sigma` at top level. Without a matching binding the name is a
/// primitive of the given type.
struct Signature {
  std::string name;
  TypeScheme scheme;
  SourceLoc loc;
};

struct Binding {
  std::string name;
  ExprPtr expr;  // parameters already turned into lambdas
  SourceLoc loc;
};

using Declaration =
    std::variant<ClassDecl, InstanceDecl, RawRule, DataDecl, Signature, Binding>;

struct SurfaceProgram {
  std::vector<Declaration> decls;  // source order

  template <typename T>
  std::vector<const T*> all() const {
    std::vector<const T*> out;
    for (const auto& d : decls) {
      if (const auto* p = std::get_if<T>(&d)) out.push_back(p);
    }
    return out;
  }
};

}  // namespace chrtc
