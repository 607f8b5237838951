#include "chrtc/term.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <utility>

namespace chrtc {

namespace {

std::atomic<VarId> next_var_id{1};

}  // namespace

Var fresh_var(std::string hint) {
  return Var{next_var_id.fetch_add(1, std::memory_order_relaxed), std::move(hint)};
}

std::string tuple_ctor(std::size_t arity) {
  return "(" + std::string(arity > 0 ? arity - 1 : 0, ',') + ")";
}

bool is_tuple_ctor(const std::string& name) {
  return name.size() >= 3 && name.front() == '(' && name.back() == ')' &&
         std::all_of(name.begin() + 1, name.end() - 1, [](char c) { return c == ','; });
}

struct Term::Node {
  bool is_var = false;
  Var var;
  std::string ctor;
  std::vector<Term> args;
  bool ground = true;
};

Term::Term() : Term(Term::app(kUnit)) {}

Term::Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Term Term::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->is_var = true;
  n->var = std::move(v);
  n->ground = false;
  return Term(std::move(n));
}

Term Term::fresh(std::string hint) { return variable(fresh_var(std::move(hint))); }

Term Term::app(std::string ctor, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->ctor = std::move(ctor);
  n->ground = std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Term::arrow(Term from, Term to) { return app(kArrow, {std::move(from), std::move(to)}); }

Term Term::list(Term elem) { return app(kList, {std::move(elem)}); }

bool Term::is_var() const { return node_->is_var; }
const Var& Term::var() const { return node_->var; }
const std::string& Term::ctor() const { return node_->ctor; }
const std::vector<Term>& Term::args() const { return node_->args; }
bool Term::is_ground() const { return node_->ground; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.is_var() != b.is_var()) return false;
  if (a.is_var()) return a.var() == b.var();
  return a.ctor() == b.ctor() && a.args() == b.args();
}

int compare(const Term& a, const Term& b) {
  if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
  if (a.is_var()) {
    if (a.var().id == b.var().id) return 0;
    return a.var().id < b.var().id ? -1 : 1;
  }
  if (int c = a.ctor().compare(b.ctor()); c != 0) return c < 0 ? -1 : 1;
  if (a.args().size() != b.args().size()) return a.args().size() < b.args().size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (int c = compare(a.args()[i], b.args()[i]); c != 0) return c;
  }
  return 0;
}

std::size_t term_size(const Term& t) {
  if (t.is_var()) return 0;
  std::size_t n = 1;
  for (const auto& a : t.args()) n += term_size(a);
  return n;
}

std::size_t term_depth(const Term& t) {
  std::size_t d = 0;
  if (!t.is_var()) {
    for (const auto& a : t.args()) d = std::max(d, term_depth(a));
  }
  return d + 1;
}

bool occurs(const Var& v, const Term& t) {
  if (t.is_var()) return t.var() == v;
  if (t.is_ground()) return false;
  return std::any_of(t.args().begin(), t.args().end(),
                     [&](const Term& a) { return occurs(v, a); });
}

void collect_vars(const Term& t, std::vector<Var>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.var()) == out.end()) out.push_back(t.var());
    return;
  }
  if (t.is_ground()) return;
  for (const auto& a : t.args()) collect_vars(a, out);
}

std::vector<Var> vars_of(const Term& t) {
  std::vector<Var> out;
  collect_vars(t, out);
  return out;
}

Substitution::Substitution(std::map<Var, Term> bindings) : bindings_(std::move(bindings)) {
  for (const auto& [v, image] : bindings_) {
    for (const auto& w : vars_of(image)) {
      if (bindings_.count(w) != 0) {
        throw std::invalid_argument("substitution is not idempotent: variable '" + w.hint +
                                    "' is both bound and used in an image");
      }
    }
    if (image.is_var() && image.var() == v) {
      throw std::invalid_argument("substitution binds '" + v.hint + "' to itself");
    }
  }
}

const Term* Substitution::find(const Var& v) const {
  auto it = bindings_.find(v);
  return it == bindings_.end() ? nullptr : &it->second;
}

Substitution Substitution::restricted(const VarSet& keep) const {
  Substitution out;
  for (const auto& [v, t] : bindings_) {
    if (keep.count(v) != 0) out.bindings_.emplace(v, t);
  }
  return out;
}

void Substitution::bind(const Var& v, const Term& t) {
  Substitution single;
  single.bindings_.emplace(v, t);
  for (auto& [w, image] : bindings_) image = chrtc::apply(single, image);
  bindings_.emplace(v, t);
}

Term apply(const Substitution& s, const Term& t) {
  if (s.empty() || t.is_ground()) return t;
  if (t.is_var()) {
    const Term* image = s.find(t.var());
    return image ? *image : t;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply(s, a));
    changed = changed || !(args.back() == a);
  }
  return changed ? Term::app(t.ctor(), std::move(args)) : t;
}

Equation apply(const Substitution& s, const Equation& e) {
  return Equation{apply(s, e.lhs), apply(s, e.rhs)};
}

namespace {

bool is_rigid(const VarSet* rigid, const Var& v) { return rigid && rigid->count(v) != 0; }

// Solves a = b under s (both sides already normalized by s).
bool unify_into(const Term& a, const Term& b, Substitution& s, const VarSet* rigid) {
  if (a.is_var() && b.is_var() && a.var() == b.var()) return true;
  if (a.is_var() || b.is_var()) {
    const Term* var_side = &a;
    const Term* other = &b;
    if (!a.is_var()) {
      std::swap(var_side, other);
    } else if (b.is_var()) {
      // Two distinct variables: keep the rigid one, otherwise keep the older.
      const bool ra = is_rigid(rigid, a.var());
      const bool rb = is_rigid(rigid, b.var());
      if (ra && rb) return false;
      if (ra || (!rb && a.var().id < b.var().id)) std::swap(var_side, other);
    }
    const Var& v = var_side->var();
    if (is_rigid(rigid, v)) return false;
    if (occurs(v, *other)) return false;
    s.bind(v, *other);
    return true;
  }
  if (a.ctor() != b.ctor() || a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (!unify_into(apply(s, a.args()[i]), apply(s, b.args()[i]), s, rigid)) return false;
  }
  return true;
}

}  // namespace

std::optional<Substitution> unify(std::span<const Equation> eqs, const Substitution& base,
                                  const VarSet* rigid) {
  Substitution s = base;
  for (const auto& eq : eqs) {
    if (!unify_into(apply(s, eq.lhs), apply(s, eq.rhs), s, rigid)) return std::nullopt;
  }
  return s;
}

std::optional<Substitution> unify(const Term& a, const Term& b, const Substitution& base,
                                  const VarSet* rigid) {
  const Equation eq{a, b};
  return unify(std::span<const Equation>(&eq, 1), base, rigid);
}

Term instantiate(const Matcher& m, const Term& t) {
  if (m.empty() || t.is_ground()) return t;
  if (t.is_var()) {
    auto it = m.find(t.var());
    return it == m.end() ? t : it->second;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(instantiate(m, a));
  return Term::app(t.ctor(), std::move(args));
}

bool match_term(const Term& pattern, const Term& target, Matcher& m) {
  if (pattern.is_var()) {
    auto [it, inserted] = m.emplace(pattern.var(), target);
    return inserted || it->second == target;
  }
  if (target.is_var() || pattern.ctor() != target.ctor() ||
      pattern.args().size() != target.args().size()) {
    return false;
  }
  for (std::size_t i = 0; i < pattern.args().size(); ++i) {
    if (!match_term(pattern.args()[i], target.args()[i], m)) return false;
  }
  return true;
}

}  // namespace chrtc
