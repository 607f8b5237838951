#include "chrtc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>

#include "chrtc/lexer.hpp"
#include "chrtc/render.hpp"

namespace chrtc {

Fixity fixity_of(const std::string& op) {
  using A = Fixity::Assoc;
  static const std::map<std::string, Fixity> table = {
      {"$", {0, A::right}},   {">>=", {1, A::left}}, {"||", {2, A::right}},
      {"&&", {3, A::right}},  {"==", {4, A::none}},  {"/=", {4, A::none}},
      {"<", {4, A::none}},    {"<=", {4, A::none}},  {">", {4, A::none}},
      {">=", {4, A::none}},   {"elem", {4, A::none}}, {":", {5, A::right}},
      {"++", {5, A::right}},  {"+", {6, A::left}},   {"-", {6, A::left}},
      {"*", {7, A::left}},    {"/", {7, A::left}},   {"div", {7, A::left}},
      {"mod", {7, A::left}},  {".", {9, A::right}},
  };
  auto it = table.find(op);
  return it == table.end() ? Fixity{} : it->second;
}

namespace {

bool is_class_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

class Parser {
 public:
  explicit Parser(std::string_view source) : toks_(layout(lex(source))) {}

  SurfaceProgram program() {
    SurfaceProgram out;
    expect_special("{");
    while (!at_special("}")) {
      if (accept_special(";")) continue;
      for (auto& d : declarations()) out.decls.push_back(std::move(d));
      if (!at_special("}")) expect_special(";");
    }
    expect_special("}");
    expect_eof();
    return out;
  }

  std::vector<Item> goal(VarScope& scope) {
    scope_ = &scope;
    expect_special("{");
    std::vector<Item> items;
    if (!at_special("}")) {
      if (at_conid("True") && is_end(1)) {
        advance();
      } else {
        items = item_list();
      }
    }
    expect_special("}");
    expect_eof();
    return items;
  }

  ChrRule single_rule() {
    expect_special("{");
    ChrRule r = raw_rule().rule;
    accept_special(";");
    expect_special("}");
    expect_eof();
    return r;
  }

  TypeScheme single_scheme() {
    expect_special("{");
    VarScope scope;
    TypeScheme s = scheme(scope, {});
    expect_special("}");
    expect_eof();
    return s;
  }

 private:
  // LexToken access

  const LexToken& cur() const { return toks_[pos_]; }
  const LexToken& peek(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const LexToken& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  static bool is(const LexToken& t, TokenKind k, std::string_view text) {
    return t.kind == k && t.text == text;
  }
  bool at_special(std::string_view s) const { return is(cur(), TokenKind::special, s); }
  bool at_reserved(std::string_view s) const { return is(cur(), TokenKind::reserved, s); }
  bool at_keyword(std::string_view s) const { return is(cur(), TokenKind::keyword, s); }
  bool at_conid(std::string_view s) const { return is(cur(), TokenKind::conid, s); }
  bool at_varsym(std::string_view s) const { return is(cur(), TokenKind::varsym, s); }

  bool accept_special(std::string_view s) {
    if (!at_special(s)) return false;
    advance();
    return true;
  }
  bool accept_reserved(std::string_view s) {
    if (!at_reserved(s)) return false;
    advance();
    return true;
  }

  [[noreturn]] void error(const std::string& msg) const { throw ParseError(cur().loc, msg); }
  [[noreturn]] void unexpected(std::string_view wanted) const {
    const std::string got = cur().kind == TokenKind::eof ? "end of input"
                            : cur().virtual_layout   ? "end of block"
                                                     : "'" + cur().text + "'";
    error(fmt::format("expected {}, found {}", wanted, got));
  }

  void expect_special(std::string_view s) {
    if (!accept_special(s)) unexpected(fmt::format("'{}'", s));
  }
  void expect_reserved(std::string_view s) {
    if (!accept_reserved(s)) unexpected(fmt::format("'{}'", s));
  }
  void expect_keyword(std::string_view s) {
    if (!at_keyword(s)) unexpected(fmt::format("'{}'", s));
    advance();
  }
  void expect_eof() {
    if (cur().kind != TokenKind::eof) unexpected("end of input");
  }
  std::string expect_varid() {
    if (cur().kind != TokenKind::varid) unexpected("a variable name");
    return advance().text;
  }
  std::string expect_conid() {
    if (cur().kind != TokenKind::conid) unexpected("a constructor name");
    return advance().text;
  }

  // True when the token k positions ahead ends the current declaration.
  bool is_end(std::size_t k = 0) const {
    const LexToken& t = peek(k);
    return t.kind == TokenKind::eof || is(t, TokenKind::special, ";") ||
           is(t, TokenKind::special, "}");
  }

  // Scans the rest of the current declaration for a reserved operator at
  // brace depth zero.
  bool decl_contains(std::string_view op) const {
    int depth = 0;
    for (std::size_t k = pos_; k < toks_.size(); ++k) {
      const LexToken& t = toks_[k];
      if (t.kind == TokenKind::eof) return false;
      if (is(t, TokenKind::special, "{")) ++depth;
      if (is(t, TokenKind::special, "}")) {
        if (depth == 0) return false;
        --depth;
      }
      if (depth == 0 && is(t, TokenKind::special, ";")) return false;
      if (depth == 0 && is(t, TokenKind::reserved, op)) return true;
    }
    return false;
  }

  // Declarations

  // One source declaration; `f, g :: t` yields one signature per name.
  std::vector<Declaration> declarations() {
    if (at_keyword("class")) return {class_decl()};
    if (at_keyword("instance")) return {instance_decl()};
    if (at_keyword("data")) return {data_decl()};
    if (at_keyword("rule") || decl_contains("<=>") || decl_contains("==>")) return {raw_rule()};
    if (at_signature()) {
      std::vector<Declaration> out;
      for (auto& s : signatures({})) out.emplace_back(std::move(s));
      return out;
    }
    return {binding()};
  }

  bool at_signature() const {
    std::size_t k = 0;
    while (true) {
      if (peek(k).kind == TokenKind::varid) {
        k += 1;
      } else if (is(peek(k), TokenKind::special, "(") && peek(k + 1).kind == TokenKind::varsym &&
                 is(peek(k + 2), TokenKind::special, ")")) {
        k += 3;
      } else {
        return false;
      }
      if (is(peek(k), TokenKind::reserved, "::")) return true;
      if (!is(peek(k), TokenKind::special, ",")) return false;
      ++k;
    }
  }

  std::string binder_name() {
    if (accept_special("(")) {
      if (cur().kind != TokenKind::varsym) unexpected("an operator");
      std::string op = advance().text;
      expect_special(")");
      return op;
    }
    return expect_varid();
  }

  std::vector<Signature> signatures(const VarScope& fixed) {
    std::vector<std::pair<std::string, SourceLoc>> names;
    do {
      const SourceLoc loc = cur().loc;
      names.emplace_back(binder_name(), loc);
    } while (accept_special(","));
    expect_reserved("::");
    VarScope scope = fixed;
    TypeScheme s = scheme(scope, fixed);
    std::vector<Signature> out;
    for (auto& [n, loc] : names) out.push_back(Signature{n, s, loc});
    return out;
  }

  ClassDecl class_decl() {
    ClassDecl c;
    c.loc = cur().loc;
    expect_keyword("class");
    VarScope scope;
    scope_ = &scope;
    Term first = type();
    std::vector<ClassConstraint> context;
    Term head = first;
    if (accept_reserved("=>")) {
      head = type();
      c.context = to_constraints(first, c.loc);
    }
    const ClassConstraint h = to_constraint(head, c.loc);
    c.name = h.cls;
    std::set<Var> seen;
    for (const auto& a : h.args) {
      if (!a.is_var() || !seen.insert(a.var()).second) {
        throw ParseError(c.loc, "class parameters must be distinct type variables");
      }
      c.params.push_back(a.var());
    }
    for (const auto& d : c.context) {
      std::vector<Var> vs;
      collect_vars(d, vs);
      for (const auto& v : vs) {
        if (!seen.count(v)) {
          throw ParseError(c.loc, fmt::format("class context of {} mentions '{}', which is not a "
                                              "class parameter",
                                              c.name, v.hint));
        }
      }
    }
    if (accept_reserved("|")) {
      do {
        fundep(c);
      } while (accept_special(","));
    }
    if (at_keyword("where")) {
      advance();
      expect_special("{");
      VarScope fixed;
      for (const auto& p : c.params) fixed.emplace(p.hint, p);
      while (!at_special("}")) {
        if (accept_special(";")) continue;
        for (auto& s : signatures(fixed)) {
          if (!mentions_any(s.scheme, c.params)) {
            throw ParseError(s.loc, fmt::format("method '{}' does not mention a parameter of "
                                                "class {}; every use would be ambiguous",
                                                s.name, c.name));
          }
          c.methods.push_back(MethodSig{s.name, s.scheme, s.loc});
        }
        if (!at_special("}")) expect_special(";");
      }
      expect_special("}");
    }
    return c;
  }

  static bool mentions_any(const TypeScheme& s, const std::vector<Var>& params) {
    std::vector<Var> vs;
    collect_vars(s.type, vs);
    for (const auto& c : s.context) collect_vars(c, vs);
    return std::any_of(vs.begin(), vs.end(), [&](const Var& v) {
      return std::find(params.begin(), params.end(), v) != params.end();
    });
  }

  void fundep(ClassDecl& c) {
    const SourceLoc loc = cur().loc;
    auto index_of = [&](const std::string& name) {
      for (std::size_t i = 0; i < c.params.size(); ++i) {
        if (c.params[i].hint == name) return i;
      }
      throw ParseError(loc, fmt::format("functional dependency mentions '{}', which is not a "
                                        "parameter of class {}",
                                        name, c.name));
    };
    std::vector<std::size_t> from;
    while (cur().kind == TokenKind::varid) from.push_back(index_of(advance().text));
    if (!accept_reserved("~>") && !accept_reserved("->")) unexpected("'~>'");
    std::vector<std::size_t> to;
    while (cur().kind == TokenKind::varid) to.push_back(index_of(advance().text));
    if (to.empty()) unexpected("a determined parameter");
    for (auto t : to) c.fundeps.push_back(FunDep{from, t});
  }

  InstanceDecl instance_decl() {
    InstanceDecl inst;
    inst.loc = cur().loc;
    expect_keyword("instance");
    VarScope scope;
    scope_ = &scope;
    Term first = type();
    Term head = first;
    if (accept_reserved("=>")) {
      head = type();
      inst.context = to_constraints(first, inst.loc);
    }
    const ClassConstraint h = to_constraint(head, inst.loc);
    inst.cls = h.cls;
    inst.args = h.args;
    if (at_keyword("where")) {
      // Method bodies do not contribute constraints; skip the block.
      advance();
      skip_block();
    }
    return inst;
  }

  void skip_block() {
    expect_special("{");
    int depth = 1;
    while (depth > 0) {
      if (cur().kind == TokenKind::eof) unexpected("'}'");
      if (at_special("{")) ++depth;
      if (at_special("}")) --depth;
      advance();
    }
  }

  DataDecl data_decl() {
    DataDecl d;
    d.loc = cur().loc;
    expect_keyword("data");
    d.name = expect_conid();
    VarScope scope;
    scope_ = &scope;
    while (cur().kind == TokenKind::varid) {
      const std::string n = advance().text;
      if (scope.count(n)) throw ParseError(d.loc, "duplicate type parameter '" + n + "'");
      Var v = fresh_var(n);
      scope.emplace(n, v);
      d.params.push_back(v);
    }
    if (accept_reserved("=")) {
      allow_new_vars_ = false;
      do {
        DataCon con;
        con.name = expect_conid();
        while (starts_atype()) con.fields.push_back(atype());
        d.constructors.push_back(std::move(con));
      } while (accept_reserved("|"));
      allow_new_vars_ = true;
    }
    return d;
  }

  RawRule raw_rule() {
    RawRule out;
    out.loc = cur().loc;
    if (at_keyword("rule")) advance();
    ChrRule& r = out.rule;
    // Names may contain characters that lex as several tokens (class-defn).
    while (!at_reserved("@")) {
      if (is_end()) unexpected("'@' after the rule name");
      const LexToken& t = advance();
      if (t.kind == TokenKind::special) {
        throw ParseError(t.loc, "unexpected '" + t.text + "' in rule name");
      }
      r.name += t.text;
    }
    if (r.name.empty()) error("missing rule name");
    expect_reserved("@");
    VarScope scope;
    scope_ = &scope;
    do {
      r.head.push_back(to_constraint(btype(), out.loc));
    } while (accept_special(","));
    if (accept_reserved("==>")) {
      r.kind = RuleKind::propagation;
    } else {
      expect_reserved("<=>");
      r.kind = RuleKind::simplification;
    }
    if (decl_contains("|")) {
      do {
        Guard g;
        g.lhs = type();
        if (accept_reserved("=")) {
          g.kind = GuardKind::equal;
        } else if (at_varsym("/=")) {
          advance();
          g.kind = GuardKind::not_equal;
        } else {
          unexpected("'=' or '/=' in guard");
        }
        g.rhs = type();
        r.guard.push_back(std::move(g));
      } while (accept_special(","));
      expect_reserved("|");
    }
    if (at_conid("True") && is_end(1)) {
      advance();
    } else if (at_conid("False") && is_end(1)) {
      advance();
      r.body_false = true;
      // A propagation to False rejects its head just like a simplification.
      r.kind = RuleKind::simplification;
    } else {
      r.body = item_list();
    }
    if (!is_end()) unexpected("end of rule");
    return out;
  }

  std::vector<Item> item_list() {
    std::vector<Item> items;
    do {
      const SourceLoc loc = cur().loc;
      Term t = type();
      if (accept_reserved("=")) {
        items.emplace_back(Equation{t, type()});
      } else {
        items.emplace_back(to_constraint(t, loc));
      }
    } while (accept_special(","));
    return items;
  }

  Binding binding() {
    Binding b;
    b.loc = cur().loc;
    LocalBinding lb = local_binding();
    b.name = lb.name;
    b.expr = lb.expr;
    return b;
  }

  LocalBinding local_binding() {
    LocalBinding b;
    b.loc = cur().loc;
    b.name = binder_name();
    std::vector<std::string> params;
    while (cur().kind == TokenKind::varid) params.push_back(advance().text);
    expect_reserved("=");
    ExprPtr body = expr();
    if (at_keyword("where")) {
      const SourceLoc wloc = cur().loc;
      advance();
      auto locals = local_block();
      body = make_expr(ELet{std::move(locals), body}, wloc);
    }
    if (!params.empty()) body = make_expr(ELam{std::move(params), body}, b.loc);
    b.expr = body;
    return b;
  }

  std::vector<LocalBinding> local_block() {
    expect_special("{");
    std::vector<LocalBinding> binds;
    std::vector<Signature> sigs;
    while (!at_special("}")) {
      if (accept_special(";")) continue;
      if (at_signature()) {
        for (auto& s : signatures({})) sigs.push_back(std::move(s));
      } else {
        LocalBinding b = local_binding();
        for (const auto& other : binds) {
          if (other.name == b.name) {
            throw ParseError(b.loc, "duplicate definition of '" + b.name + "'");
          }
        }
        binds.push_back(std::move(b));
      }
      if (!at_special("}")) expect_special(";");
    }
    expect_special("}");
    for (auto& s : sigs) {
      auto it = std::find_if(binds.begin(), binds.end(),
                             [&](const LocalBinding& b) { return b.name == s.name; });
      if (it == binds.end()) {
        throw ParseError(s.loc, "signature for '" + s.name + "' lacks an accompanying binding");
      }
      it->signature = std::move(s.scheme);
    }
    return binds;
  }

  // Types

  TypeScheme scheme(VarScope& scope, const VarScope& fixed) {
    scope_ = &scope;
    const SourceLoc loc = cur().loc;
    Term t = type();
    TypeScheme s;
    if (accept_reserved("=>")) {
      s.context = to_constraints(t, loc);
      t = type();
    }
    s.type = t;
    std::vector<Var> vs;
    for (const auto& c : s.context) collect_vars(c, vs);
    collect_vars(s.type, vs);
    for (const auto& v : vs) {
      if (!fixed.count(v.hint) || !(fixed.at(v.hint) == v)) s.quantified.push_back(v);
    }
    return s;
  }

  Term type() {
    Term lhs = btype();
    if (accept_reserved("->")) return Term::arrow(lhs, type());
    return lhs;
  }

  bool starts_atype() const {
    return cur().kind == TokenKind::varid || cur().kind == TokenKind::conid || at_special("(") ||
           at_special("[");
  }

  Term btype() {
    if (!starts_atype()) unexpected("a type");
    const bool bare_con = cur().kind == TokenKind::conid;
    Term head = atype();
    std::vector<Term> args;
    while (starts_atype()) args.push_back(atype());
    if (args.empty()) return head;
    if (bare_con) return Term::app(head.ctor(), std::move(args));
    for (auto& a : args) head = Term::app(kTypeApp, {head, std::move(a)});
    return head;
  }

  Term atype() {
    const LexToken& t = cur();
    if (t.kind == TokenKind::varid) {
      advance();
      return Term::variable(lookup_var(t));
    }
    if (t.kind == TokenKind::conid) {
      advance();
      return Term::app(t.text);
    }
    if (accept_special("[")) {
      Term elem = type();
      expect_special("]");
      return Term::list(elem);
    }
    expect_special("(");
    if (accept_special(")")) return Term::app(kUnit);
    std::vector<Term> elems{type()};
    while (accept_special(",")) elems.push_back(type());
    expect_special(")");
    if (elems.size() == 1) return elems.front();
    const auto n = elems.size();
    return Term::app(tuple_ctor(n), std::move(elems));
  }

  Var lookup_var(const LexToken& t) {
    if (t.text == "_") throw ParseError(t.loc, "wildcards are not allowed in types");
    auto it = scope_->find(t.text);
    if (it != scope_->end()) return it->second;
    if (!allow_new_vars_) {
      throw ParseError(t.loc, "type variable '" + t.text + "' is not in scope");
    }
    return scope_->emplace(t.text, fresh_var(t.text)).first->second;
  }

  static ClassConstraint to_constraint(const Term& t, SourceLoc loc) {
    if (t.is_var() || !is_class_name(t.ctor()) || t.args().empty()) {
      throw ParseError(loc, "expected a class constraint, found '" + show(t) + "'");
    }
    return ClassConstraint{t.ctor(), t.args()};
  }

  static std::vector<ClassConstraint> to_constraints(const Term& t, SourceLoc loc) {
    if (!t.is_var() && t.ctor() == kUnit) return {};
    std::vector<ClassConstraint> out;
    if (!t.is_var() && is_tuple_ctor(t.ctor())) {
      for (const auto& a : t.args()) out.push_back(to_constraint(a, loc));
    } else {
      out.push_back(to_constraint(t, loc));
    }
    return out;
  }

  // Expressions

  ExprPtr expr() {
    const SourceLoc loc = cur().loc;
    if (accept_reserved("\\")) {
      std::vector<std::string> params;
      while (cur().kind == TokenKind::varid) params.push_back(advance().text);
      if (params.empty()) unexpected("a lambda parameter");
      expect_reserved("->");
      return make_expr(ELam{std::move(params), expr()}, loc);
    }
    if (at_keyword("let")) {
      advance();
      auto binds = local_block();
      expect_keyword("in");
      return make_expr(ELet{std::move(binds), expr()}, loc);
    }
    if (at_keyword("if")) {
      advance();
      ExprPtr c = expr();
      accept_special(";");
      expect_keyword("then");
      ExprPtr t = expr();
      accept_special(";");
      expect_keyword("else");
      return make_expr(EIf{c, t, expr()}, loc);
    }
    return infix(0);
  }

  // Operator at the cursor, if any, and the number of tokens it spans.
  std::optional<std::pair<std::string, std::size_t>> operator_here() const {
    if (cur().kind == TokenKind::varsym) return std::make_pair(cur().text, std::size_t{1});
    if (at_special("`") && peek(1).kind == TokenKind::varid &&
        is(peek(2), TokenKind::special, "`")) {
      return std::make_pair(peek(1).text, std::size_t{3});
    }
    return std::nullopt;
  }

  ExprPtr infix(int min_prec) {
    ExprPtr lhs = operand();
    while (auto op = operator_here()) {
      const Fixity fx = fixity_of(op->first);
      if (fx.precedence < min_prec) break;
      const SourceLoc loc = cur().loc;
      for (std::size_t i = 0; i < op->second; ++i) advance();
      const int next = fx.assoc == Fixity::Assoc::right ? fx.precedence : fx.precedence + 1;
      ExprPtr rhs = infix(next);
      ExprPtr fn = make_expr(EVar{op->first}, loc);
      lhs = make_expr(EApp{make_expr(EApp{fn, lhs}, loc), rhs}, loc);
    }
    return lhs;
  }

  ExprPtr operand() {
    if (at_reserved("\\") || at_keyword("let") || at_keyword("if")) return expr();
    ExprPtr fn = aexp();
    while (starts_aexp()) {
      const SourceLoc loc = cur().loc;
      fn = make_expr(EApp{fn, aexp()}, loc);
    }
    return fn;
  }

  bool starts_aexp() const {
    switch (cur().kind) {
      case TokenKind::varid:
      case TokenKind::conid:
      case TokenKind::integer:
      case TokenKind::character:
      case TokenKind::string: return true;
      default: return at_special("(") || at_special("[");
    }
  }

  ExprPtr aexp() {
    const LexToken& t = cur();
    const SourceLoc loc = t.loc;
    switch (t.kind) {
      case TokenKind::varid: advance(); return make_expr(EVar{t.text}, loc);
      case TokenKind::conid: advance(); return make_expr(ECon{t.text}, loc);
      case TokenKind::integer:
        advance();
        return make_expr(ELit{ELit::Kind::integer, t.text}, loc);
      case TokenKind::character:
        advance();
        return make_expr(ELit{ELit::Kind::character, t.text}, loc);
      case TokenKind::string:
        advance();
        return make_expr(ELit{ELit::Kind::string, t.text}, loc);
      default: break;
    }
    if (accept_special("[")) {
      std::vector<ExprPtr> elems;
      if (!at_special("]")) {
        do {
          elems.push_back(expr());
        } while (accept_special(","));
      }
      expect_special("]");
      return make_expr(EList{std::move(elems)}, loc);
    }
    if (!accept_special("(")) unexpected("an expression");
    if (accept_special(")")) return make_expr(ECon{kUnit}, loc);
    if (cur().kind == TokenKind::varsym && is(peek(1), TokenKind::special, ")")) {
      std::string op = advance().text;
      advance();
      return make_expr(EVar{std::move(op)}, loc);
    }
    std::vector<ExprPtr> elems{expr()};
    while (accept_special(",")) elems.push_back(expr());
    expect_special(")");
    if (elems.size() == 1) return elems.front();
    return make_expr(ETuple{std::move(elems)}, loc);
  }

  std::vector<LexToken> toks_;
  std::size_t pos_ = 0;
  VarScope* scope_ = nullptr;
  bool allow_new_vars_ = true;
};

// Arity checking over all type-level syntax of a program.
class ArityChecker {
 public:
  void check(const SurfaceProgram& p) {
    for (const auto* d : p.all<DataDecl>()) declare_type(d->name, d->params.size(), d->loc);
    for (const auto* c : p.all<ClassDecl>()) declare_class(c->name, c->params.size(), c->loc);
    for (const auto& decl : p.decls) std::visit([&](const auto& d) { visit(d); }, decl);
  }

 private:
  void declare_type(const std::string& name, std::size_t n, SourceLoc loc) {
    auto [it, fresh] = types_.emplace(name, n);
    if (!fresh) throw ParseError(loc, "type " + name + " is declared twice");
  }
  void declare_class(const std::string& name, std::size_t n, SourceLoc loc) {
    auto [it, fresh] = classes_.emplace(name, n);
    if (!fresh) throw ParseError(loc, "class " + name + " is declared twice");
  }

  void term(const Term& t, SourceLoc loc) {
    if (t.is_var()) return;
    const auto& c = t.ctor();
    const std::size_t n = t.args().size();
    std::optional<std::size_t> fixed;
    if (c == kArrow || c == kTypeApp) fixed = 2;
    if (c == kList) fixed = 1;
    if (c == kUnit) fixed = 0;
    if (is_tuple_ctor(c)) fixed = c.size() - 1;
    if (fixed) {
      if (*fixed != n) throw ParseError(loc, fmt::format("'{}' applied to {} arguments", c, n));
    } else {
      auto [it, fresh] = types_.emplace(c, n);
      if (!fresh && it->second != n) {
        throw ParseError(loc, fmt::format("type constructor {} used with {} arguments, but it "
                                          "takes {}",
                                          c, n, it->second));
      }
    }
    for (const auto& a : t.args()) term(a, loc);
  }

  void constraint(const ClassConstraint& c, SourceLoc loc) {
    auto [it, fresh] = classes_.emplace(c.cls, c.args.size());
    if (!fresh && it->second != c.args.size()) {
      throw ParseError(loc, fmt::format("class {} used with {} arguments, but it takes {}", c.cls,
                                        c.args.size(), it->second));
    }
    for (const auto& a : c.args) term(a, loc);
  }

  void scheme(const TypeScheme& s, SourceLoc loc) {
    for (const auto& c : s.context) constraint(c, loc);
    term(s.type, loc);
  }

  void visit(const ClassDecl& c) {
    for (const auto& d : c.context) constraint(d, c.loc);
    for (const auto& m : c.methods) scheme(m.scheme, m.loc);
  }
  void visit(const InstanceDecl& i) {
    constraint(ClassConstraint{i.cls, i.args}, i.loc);
    for (const auto& d : i.context) constraint(d, i.loc);
  }
  void visit(const RawRule& r) {
    for (const auto& h : r.rule.head) constraint(h, r.loc);
    for (const auto& g : r.rule.guard) {
      term(g.lhs, r.loc);
      term(g.rhs, r.loc);
    }
    for (const auto& b : r.rule.body) {
      if (const auto* c = std::get_if<ClassConstraint>(&b)) {
        constraint(*c, r.loc);
      } else {
        term(std::get<Equation>(b).lhs, r.loc);
        term(std::get<Equation>(b).rhs, r.loc);
      }
    }
  }
  void visit(const DataDecl& d) {
    for (const auto& con : d.constructors) {
      for (const auto& f : con.fields) term(f, d.loc);
    }
  }
  void visit(const Signature& s) { scheme(s.scheme, s.loc); }
  void visit(const Binding& b) { expr(*b.expr); }

  void expr(const Expr& e) {
    if (const auto* app = std::get_if<EApp>(&e.node)) {
      expr(*app->fn);
      expr(*app->arg);
    } else if (const auto* lam = std::get_if<ELam>(&e.node)) {
      expr(*lam->body);
    } else if (const auto* let = std::get_if<ELet>(&e.node)) {
      for (const auto& b : let->bindings) {
        if (b.signature) scheme(*b.signature, b.loc);
        expr(*b.expr);
      }
      expr(*let->body);
    } else if (const auto* i = std::get_if<EIf>(&e.node)) {
      expr(*i->cond);
      expr(*i->then_branch);
      expr(*i->else_branch);
    } else if (const auto* l = std::get_if<EList>(&e.node)) {
      for (const auto& x : l->elems) expr(*x);
    } else if (const auto* t = std::get_if<ETuple>(&e.node)) {
      for (const auto& x : t->elems) expr(*x);
    }
  }

  std::map<std::string, std::size_t> types_;
  std::map<std::string, std::size_t> classes_;
};

}  // namespace

SurfaceProgram parse_program(std::string_view source) {
  SurfaceProgram prog = Parser(source).program();
  ArityChecker{}.check(prog);
  return prog;
}

std::vector<Item> parse_goal(std::string_view text, VarScope& scope) {
  return Parser(text).goal(scope);
}

ChrRule parse_rule(std::string_view text) { return Parser(text).single_rule(); }

TypeScheme parse_scheme(std::string_view text) { return Parser(text).single_scheme(); }

}  // namespace chrtc
