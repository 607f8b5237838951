#include "chrtc/inference.hpp"

#include <algorithm>
#include <functional>

#include <fmt/format.h>

#include "chrtc/canonical.hpp"
#include "chrtc/render.hpp"

namespace chrtc {

const TypeScheme* TypeEnv::find(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

void TypeEnv::bind(const std::string& name, TypeScheme scheme) {
  entries_.insert_or_assign(name, std::move(scheme));
}

VarSet TypeEnv::free_vars() const {
  VarSet out;
  for (const auto& [_, s] : entries_) {
    auto fv = chrtc::free_vars(s);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

namespace {

template <typename... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <typename... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::vector<Var> vars_in(const std::vector<ClassConstraint>& cs, const Term* t = nullptr) {
  std::vector<Var> out;
  for (const auto& c : cs) collect_vars(c, out);
  if (t) collect_vars(*t, out);
  return out;
}

VarSet image_vars(const Substitution& h, const VarSet& vs) {
  VarSet out;
  for (const auto& v : vs) {
    for (const auto& x : vars_of(apply(h, Term::variable(v)))) out.insert(x);
  }
  return out;
}

std::vector<ClassConstraint> dedupe(std::vector<ClassConstraint> cs) {
  std::vector<ClassConstraint> out;
  for (auto& c : cs) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

Term bool_type() { return Term::app("Bool"); }

std::pair<std::vector<ClassConstraint>, Term> instantiate_with(const TypeScheme& s,
                                                               const Matcher& m) {
  std::vector<ClassConstraint> ctx;
  for (const auto& c : s.context) ctx.push_back(instantiate(m, c));
  return {std::move(ctx), instantiate(m, s.type)};
}

std::pair<std::vector<ClassConstraint>, Term> kinded(
    std::pair<std::vector<ClassConstraint>, Term> in) {
  auto [type, kinds] = desugar_constructor_apps(in.second);
  for (const auto& c : in.first) {
    ClassConstraint d{c.cls, {}};
    for (const auto& a : c.args) {
      auto [t, more] = desugar_constructor_apps(a);
      d.args.push_back(t);
      kinds.insert(kinds.end(), more.begin(), more.end());
    }
    kinds.push_back(std::move(d));
  }
  return {std::move(kinds), std::move(type)};
}

std::string unsat_message(const Derivation& d, const RuleSet& rules, const std::string& name) {
  if (!d.failing_rule.empty()) {
    return fmt::format("type error in '{}': the constraints are rejected by rule {}", name,
                       rules.describe(d.failing_rule));
  }
  if (d.failed_equation) {
    NameSupply names(NameSupply::Style::letters);
    const auto lhs = render(d.failed_equation->lhs, names);
    const auto rhs = render(d.failed_equation->rhs, names);
    return fmt::format("type error in '{}': cannot match {} with {}", name, lhs, rhs);
  }
  return fmt::format("type error in '{}': the constraints are unsatisfiable", name);
}

}  // namespace

Derivation Inferencer::run(std::vector<Item> goal, const Program& program, VarSet v) const {
  DeriveOptions opts;
  opts.fuel = options_.fuel;
  return derive(std::move(goal), program, std::move(v), opts);
}

std::pair<std::vector<ClassConstraint>, Term> Inferencer::instantiate_scheme(
    const TypeScheme& s) const {
  auto inst = instantiate(s);
  return options_.kind_constraints ? kinded(std::move(inst)) : inst;
}

Generated Inferencer::literal(const ELit& lit) const {
  switch (lit.kind) {
    case ELit::Kind::integer:
      if (rules_.classes.count("Num")) {
        Term t = Term::fresh("n");
        return {t, {ClassConstraint{"Num", {t}}}};
      }
      return {Term::app("Int"), {}};
    case ELit::Kind::character: return {Term::app("Char"), {}};
    case ELit::Kind::string: return {Term::list(Term::app("Char")), {}};
  }
  return {};
}

Generated Inferencer::generate(const ExprPtr& root, const TypeEnv& root_env) const {
  std::vector<Item> cs;
  std::function<Term(const Expr&, const TypeEnv&)> gen = [&](const Expr& e,
                                                             const TypeEnv& env) -> Term {
    auto lookup = [&](const std::string& name) {
      const TypeScheme* s = env.find(name);
      if (!s) throw ScopeError(e.loc, fmt::format("'{}' is not in scope", name));
      auto [ctx, t] = instantiate_scheme(*s);
      for (auto& c : ctx) cs.emplace_back(std::move(c));
      return t;
    };
    return std::visit(
        Overloaded{
            [&](const EVar& v) { return lookup(v.name); },
            [&](const ECon& c) { return lookup(c.name); },
            [&](const ELit& l) {
              auto g = literal(l);
              cs.insert(cs.end(), g.constraints.begin(), g.constraints.end());
              return g.type;
            },
            [&](const EApp& a) {
              Term tf = gen(*a.fn, env);
              Term ta = gen(*a.arg, env);
              Term r = Term::fresh("r");
              cs.emplace_back(Equation{tf, Term::arrow(ta, r)});
              return r;
            },
            [&](const ELam& l) {
              TypeEnv inner = env;
              std::vector<Term> params;
              for (const auto& p : l.params) {
                Term t = Term::fresh(p == "_" ? "t" : p);
                if (p != "_") inner.bind(p, mono(t));
                params.push_back(t);
              }
              Term t = gen(*l.body, inner);
              for (auto it = params.rbegin(); it != params.rend(); ++it) t = Term::arrow(*it, t);
              return t;
            },
            [&](const ELet& l) {
              TypeEnv inner = env;
              auto deferred = infer_group(l.bindings, inner);
              cs.insert(cs.end(), deferred.begin(), deferred.end());
              return gen(*l.body, inner);
            },
            [&](const EIf& i) {
              Term c = gen(*i.cond, env);
              cs.emplace_back(Equation{c, bool_type()});
              Term t = gen(*i.then_branch, env);
              Term f = gen(*i.else_branch, env);
              cs.emplace_back(Equation{t, f});
              return t;
            },
            [&](const EList& l) {
              Term elem = Term::fresh("e");
              for (const auto& x : l.elems) cs.emplace_back(Equation{gen(*x, env), elem});
              return Term::list(elem);
            },
            [&](const ETuple& t) {
              std::vector<Term> elems;
              for (const auto& x : t.elems) elems.push_back(gen(*x, env));
              const auto n = elems.size();
              return Term::app(tuple_ctor(n), std::move(elems));
            },
        },
        e.node);
  };
  Term t = gen(*root, root_env);
  return {t, std::move(cs)};
}

namespace {

struct GroupSolution {
  std::vector<TypeScheme> schemes;
  std::vector<Item> deferred;
};

}  // namespace

// Solves the constraints of a binding group whose types are `types`, and
// generalizes each type over the variables not fixed by `env`. With
// `top_level`, nothing is deferred.
static GroupSolution solve_group(const Inferencer& inf, std::vector<Item> goal,
                                 const std::vector<Term>& types, const TypeEnv& env,
                                 SourceLoc loc, const std::string& name, bool top_level) {
  const VarSet env_vars = env.free_vars();
  VarSet v = env_vars;
  for (const auto& t : types) {
    for (const auto& x : vars_of(t)) v.insert(x);
  }
  DeriveOptions opts;
  opts.fuel = inf.options().fuel;
  Derivation d = derive(std::move(goal), inf.rules().solving, v, opts);
  if (d.status == DeriveStatus::unsatisfiable) {
    throw TypeError(loc, unsat_message(d, inf.rules(), name), TypeError::Kind::unsatisfiable, d);
  }
  if (d.status == DeriveStatus::fuel_exceeded) {
    throw TypeError(loc,
                    fmt::format("type inference for '{}' exceeded the fuel limit of {} steps",
                                name, inf.options().fuel),
                    TypeError::Kind::fuel, d);
  }
  const Substitution& h = d.state.h;
  const VarSet fixed = image_vars(h, env_vars);
  GroupSolution out;
  std::vector<ClassConstraint> retained;
  for (auto& c : dedupe(d.store())) {
    std::vector<Var> cv;
    collect_vars(c, cv);
    const bool only_fixed =
        std::all_of(cv.begin(), cv.end(), [&](const Var& x) { return fixed.count(x) != 0; });
    if (only_fixed && !top_level) {
      out.deferred.emplace_back(std::move(c));
    } else {
      retained.push_back(std::move(c));
    }
  }
  if (!top_level) {
    for (const auto& x : env_vars) {
      Term image = apply(h, Term::variable(x));
      if (!(image.is_var() && image.var() == x)) {
        out.deferred.emplace_back(Equation{Term::variable(x), image});
      }
    }
  }
  for (const auto& t : types) {
    TypeScheme s;
    s.type = apply(h, t);
    s.context = retained;
    std::set<Var> seen;
    for (const auto& x : vars_in(s.context, &s.type)) {
      if (!fixed.count(x) && seen.insert(x).second) s.quantified.push_back(x);
    }
    out.schemes.push_back(std::move(s));
  }
  return out;
}

TypeScheme Inferencer::solve_and_generalize(const Generated& g, const TypeEnv& env,
                                            SourceLoc loc, const std::string& name,
                                            std::vector<Item>* deferred) const {
  auto sol = solve_group(*this, g.constraints, {g.type}, env, loc, name, deferred == nullptr);
  if (deferred) deferred->insert(deferred->end(), sol.deferred.begin(), sol.deferred.end());
  return sol.schemes.front();
}

TypeScheme Inferencer::present(const TypeScheme& s) const {
  if (s.context.empty() || rules_.presentation.empty()) return s;
  std::vector<Item> goal;
  for (const auto& c : s.context) goal.emplace_back(c);
  VarSet v;
  for (const auto& x : vars_in(s.context, &s.type)) v.insert(x);
  Derivation d = run(std::move(goal), rules_.presentation, v);
  if (!d.ok()) return s;
  auto kept = dedupe(d.store());
  // Survivors keep their original relative order.
  auto rank = [&](const ClassConstraint& c) {
    auto it = std::find(s.context.begin(), s.context.end(), c);
    return static_cast<std::size_t>(it - s.context.begin());
  };
  std::stable_sort(kept.begin(), kept.end(),
                   [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
  TypeScheme out = s;
  out.context = std::move(kept);
  return out;
}

AmbiguityResult Inferencer::check_ambiguity(const TypeScheme& s) const {
  AmbiguityResult out;
  if (s.quantified.empty()) return out;
  Matcher rho;
  for (const auto& q : s.quantified) rho.emplace(q, Term::fresh(q.hint));
  std::vector<Item> goal{Equation{s.type, instantiate(rho, s.type)}};
  for (const auto& c : s.context) goal.emplace_back(c);
  for (const auto& c : s.context) goal.emplace_back(instantiate(rho, c));
  VarSet v = free_vars(s);
  for (const auto& [q, r] : rho) {
    v.insert(q);
    v.insert(r.var());
  }
  Derivation d = run(std::move(goal), rules_.solving, v);
  if (d.status == DeriveStatus::fuel_exceeded) {
    out.inconclusive = true;
    return out;
  }
  // An unsatisfiable conjunction implies every equation.
  if (d.status == DeriveStatus::unsatisfiable) return out;
  for (const auto& q : s.quantified) {
    if (!(apply(d.state.h, Term::variable(q)) == apply(d.state.h, rho.at(q)))) {
      out.ambiguous.push_back(q);
    }
  }
  return out;
}

SignatureResult Inferencer::check_signature(const TypeScheme& declared, const Generated& g,
                                            const TypeEnv& env) const {
  SignatureResult out;
  Matcher skolem;
  VarSet rigid;
  for (const auto& q : declared.quantified) {
    Var s = fresh_var(q.hint);
    skolem.emplace(q, Term::variable(s));
    rigid.insert(s);
  }
  auto decl = instantiate_with(declared, skolem);
  if (options_.kind_constraints) decl = kinded(std::move(decl));
  const auto& [decl_ctx, decl_type] = decl;

  // The declared context on its own: its consequences on the rigid
  // variables are allowed, anything beyond them is not.
  std::vector<Item> ctx_goal(decl_ctx.begin(), decl_ctx.end());
  Derivation closure = run(std::move(ctx_goal), rules_.solving, rigid);
  if (closure.status == DeriveStatus::unsatisfiable) return out;  // vacuous
  if (closure.status == DeriveStatus::fuel_exceeded) {
    throw TypeError({}, "signature check exceeded the fuel limit", TypeError::Kind::fuel,
                    closure);
  }
  const Substitution closure_h = orient_protected(closure.state.h, rigid);
  std::vector<ClassConstraint> closed;
  for (const auto& c : closure.store()) closed.push_back(apply(closure_h, c));

  const VarSet env_vars = env.free_vars();
  VarSet v = rigid;
  v.insert(env_vars.begin(), env_vars.end());
  for (const auto& x : vars_of(g.type)) v.insert(x);

  // Solving the generated constraints together with the declared context
  // lets improvement rules (functional dependencies) fix local variables.
  std::vector<Item> goal{Equation{g.type, decl_type}};
  goal.insert(goal.end(), decl_ctx.begin(), decl_ctx.end());
  goal.insert(goal.end(), g.constraints.begin(), g.constraints.end());
  Derivation d = run(std::move(goal), rules_.solving, v);
  if (d.status == DeriveStatus::fuel_exceeded) {
    throw TypeError({}, "signature check exceeded the fuel limit", TypeError::Kind::fuel, d);
  }
  if (d.status == DeriveStatus::unsatisfiable) {
    out.status = SignatureResult::Status::body_mismatch;
    out.message = d.failing_rule.empty()
                      ? "the inferred type does not match the declared type"
                      : "the declared type makes the constraints unsatisfiable (rule " +
                            rules_.describe(d.failing_rule) + ")";
    return out;
  }
  const Substitution h = orient_protected(d.state.h, rigid);
  NameSupply names(NameSupply::Style::hints);
  for (const auto& s : rigid) {
    const Term image = apply(h, Term::variable(s));
    const auto iv = vars_of(image);
    const bool allowed =
        std::all_of(iv.begin(), iv.end(), [&](const Var& x) { return rigid.count(x) != 0; }) &&
        apply(closure_h, Term::variable(s)) == apply(closure_h, image);
    if (!allowed) {
      out.status = SignatureResult::Status::body_mismatch;
      const std::string rigid_name = names.name(s);
      out.message = fmt::format("the declared type is too general: '{}' would have to be {}",
                                rigid_name, render(image, names));
      return out;
    }
  }
  const VarSet fixed = image_vars(h, env_vars);
  for (const auto& s : rigid) {
    if (fixed.count(s)) {
      out.status = SignatureResult::Status::body_mismatch;
      out.message =
          fmt::format("the declared type is too general: '{}' escapes into the environment",
                      names.name(s));
      return out;
    }
  }

  ChrState oriented = d.state;
  oriented.h = h;
  for (const auto& c : dedupe(normalized_store(oriented))) {
    std::vector<Var> cv;
    collect_vars(c, cv);
    const bool env_only = std::all_of(cv.begin(), cv.end(), [&](const Var& x) {
      return fixed.count(x) != 0 && rigid.count(x) == 0;
    });
    if (env_only && !cv.empty()) {
      out.deferred.emplace_back(c);
      continue;
    }
    const ClassConstraint in_closure = apply(closure_h, c);
    if (std::find(closed.begin(), closed.end(), in_closure) == closed.end()) {
      out.status = SignatureResult::Status::unentailed;
      out.constraint = c;
      out.message = fmt::format("constraint {} is not entailed by the declared context",
                                render(c, names));
      return out;
    }
  }
  for (const auto& x : env_vars) {
    Term image = apply(h, Term::variable(x));
    if (!(image.is_var() && image.var() == x)) {
      out.deferred.emplace_back(Equation{Term::variable(x), image});
    }
  }
  return out;
}

std::vector<Item> Inferencer::infer_group(const std::vector<LocalBinding>& bindings,
                                          TypeEnv& env) const {
  std::vector<std::pair<std::string, ExprPtr>> named;
  for (const auto& b : bindings) named.emplace_back(b.name, b.expr);
  std::vector<Item> deferred;
  for (const auto& group : binding_groups(named)) {
    for (auto i : group) {
      if (bindings[i].signature) env.bind(bindings[i].name, *bindings[i].signature);
    }
    // Bindings without signatures are solved together, monomorphic in the group.
    const TypeEnv outer = env;
    TypeEnv rec = env;
    std::vector<std::size_t> plain;
    std::vector<Term> types;
    for (auto i : group) {
      if (bindings[i].signature) continue;
      plain.push_back(i);
      types.push_back(Term::fresh(bindings[i].name));
      rec.bind(bindings[i].name, mono(types.back()));
    }
    if (!plain.empty()) {
      std::vector<Item> goal;
      for (std::size_t k = 0; k < plain.size(); ++k) {
        Generated g = generate(bindings[plain[k]].expr, rec);
        goal.insert(goal.end(), g.constraints.begin(), g.constraints.end());
        goal.emplace_back(Equation{types[k], g.type});
      }
      const auto& first = bindings[plain.front()];
      auto sol = solve_group(*this, std::move(goal), types, outer, first.loc, first.name, false);
      deferred.insert(deferred.end(), sol.deferred.begin(), sol.deferred.end());
      for (std::size_t k = 0; k < plain.size(); ++k) {
        env.bind(bindings[plain[k]].name, sol.schemes[k]);
      }
    }
    for (auto i : group) {
      const auto& b = bindings[i];
      if (!b.signature) continue;
      Generated g = generate(b.expr, env);
      auto res = check_signature(*b.signature, g, env);
      if (!res.ok()) {
        throw TypeError(b.loc, fmt::format("signature of '{}' rejected: {}", b.name, res.message),
                        TypeError::Kind::unsatisfiable, Derivation{});
      }
      deferred.insert(deferred.end(), res.deferred.begin(), res.deferred.end());
    }
  }
  return deferred;
}

std::set<std::string> free_names(const Expr& e) {
  std::set<std::string> out;
  std::function<void(const Expr&, const std::set<std::string>&)> walk =
      [&](const Expr& x, const std::set<std::string>& bound) {
        std::visit(Overloaded{
                       [&](const EVar& v) {
                         if (!bound.count(v.name)) out.insert(v.name);
                       },
                       [&](const ECon&) {},
                       [&](const ELit&) {},
                       [&](const EApp& a) {
                         walk(*a.fn, bound);
                         walk(*a.arg, bound);
                       },
                       [&](const ELam& l) {
                         auto inner = bound;
                         inner.insert(l.params.begin(), l.params.end());
                         walk(*l.body, inner);
                       },
                       [&](const ELet& l) {
                         auto inner = bound;
                         for (const auto& b : l.bindings) inner.insert(b.name);
                         for (const auto& b : l.bindings) walk(*b.expr, inner);
                         walk(*l.body, inner);
                       },
                       [&](const EIf& i) {
                         walk(*i.cond, bound);
                         walk(*i.then_branch, bound);
                         walk(*i.else_branch, bound);
                       },
                       [&](const EList& l) {
                         for (const auto& y : l.elems) walk(*y, bound);
                       },
                       [&](const ETuple& t) {
                         for (const auto& y : t.elems) walk(*y, bound);
                       },
                   },
                   x.node);
      };
  walk(e, {});
  return out;
}

std::vector<std::vector<std::size_t>> binding_groups(
    const std::vector<std::pair<std::string, ExprPtr>>& bindings) {
  const std::size_t n = bindings.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(bindings[i].first, i);
  std::vector<std::vector<std::size_t>> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& name : free_names(*bindings[i].second)) {
      if (auto it = index.find(name); it != index.end()) edges[i].push_back(it->second);
    }
    std::sort(edges[i].begin(), edges[i].end());
  }
  // Tarjan's algorithm emits components with their dependencies first.
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> order(n, 0);
  std::vector<std::size_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    order[v] = low[v] = ++counter;
    stack.push_back(v);
    on_stack[v] = true;
    for (auto w : edges[v]) {
      if (order[w] == 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], order[w]);
      }
    }
    if (low[v] == order[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] == 0) visit(i);
  }
  return out;
}

TypeEnv initial_env(const SurfaceProgram& program, const RuleSet& rules) {
  TypeEnv env;
  env.bind("True", mono(bool_type()));
  env.bind("False", mono(bool_type()));
  env.bind(kUnit, mono(Term::app(kUnit)));
  {
    Var a = fresh_var("a");
    env.bind(kList, TypeScheme{{a}, {}, Term::list(Term::variable(a))});
    Var b = fresh_var("a");
    const Term tb = Term::variable(b);
    env.bind(":", TypeScheme{{b}, {}, Term::arrow(tb, Term::arrow(Term::list(tb), Term::list(tb)))});
  }

  std::set<std::string> defined;
  auto define = [&](const std::string& name, SourceLoc loc, TypeScheme s) {
    if (!defined.insert(name).second) {
      throw DeclError(loc, fmt::format("'{}' is declared more than once", name));
    }
    env.bind(name, std::move(s));
  };

  for (const auto* d : program.all<DataDecl>()) {
    std::vector<Term> params;
    for (const auto& p : d->params) params.push_back(Term::variable(p));
    const Term result = Term::app(d->name, params);
    for (const auto& con : d->constructors) {
      Term t = result;
      for (auto it = con.fields.rbegin(); it != con.fields.rend(); ++it) t = Term::arrow(*it, t);
      define(con.name, d->loc, TypeScheme{d->params, {}, t});
    }
  }
  for (const auto& [name, cls] : rules.classes) {
    for (const auto& m : cls.methods) define(m.name, m.loc, method_scheme(cls, m));
  }
  std::set<std::string> bound;
  for (const auto* b : program.all<Binding>()) bound.insert(b->name);
  for (const auto* s : program.all<Signature>()) {
    if (!bound.count(s->name)) define(s->name, s->loc, s->scheme);
  }
  return env;
}

std::vector<BindingReport> infer_program(const SurfaceProgram& program, const RuleSet& rules,
                                         const InferOptions& options) {
  Inferencer inf(rules, options);
  TypeEnv env = initial_env(program, rules);

  const auto binds = program.all<Binding>();
  std::map<std::string, const Signature*> sigs;
  for (const auto* s : program.all<Signature>()) {
    if (sigs.count(s->name)) {
      throw DeclError(s->loc, fmt::format("duplicate signature for '{}'", s->name));
    }
    sigs.emplace(s->name, s);
  }
  std::vector<std::pair<std::string, ExprPtr>> named;
  std::vector<BindingReport> reports;
  std::set<std::string> seen;
  for (const auto* b : binds) {
    if (!seen.insert(b->name).second) {
      throw DeclError(b->loc, fmt::format("'{}' is defined more than once", b->name));
    }
    if (env.find(b->name) && !sigs.count(b->name)) {
      throw DeclError(b->loc, fmt::format("'{}' is already declared as a primitive or method",
                                          b->name));
    }
    named.emplace_back(b->name, b->expr);
    BindingReport r;
    r.name = b->name;
    r.loc = b->loc;
    if (auto it = sigs.find(b->name); it != sigs.end()) {
      r.declared = it->second->scheme;
      env.bind(b->name, it->second->scheme);
    }
    reports.push_back(std::move(r));
  }

  std::set<std::string> failed;
  for (const auto& group : binding_groups(named)) {
    std::string blocker;
    for (auto i : group) {
      for (const auto& n : free_names(*named[i].second)) {
        if (failed.count(n)) blocker = n;
      }
    }
    auto fail_group = [&](const std::string& msg, bool fuel) {
      for (auto i : group) {
        reports[i].error = msg;
        reports[i].fuel_exhausted = fuel;
        failed.insert(named[i].first);
      }
    };
    if (!blocker.empty()) {
      fail_group(fmt::format("{}: depends on '{}', which has a type error",
                             reports[group.front()].loc.str(), blocker),
                 false);
      continue;
    }
    try {
      const TypeEnv outer = env;
      TypeEnv rec = env;
      std::vector<Term> types;
      for (auto i : group) {
        if (reports[i].declared) continue;
        types.push_back(Term::fresh(named[i].first));
        rec.bind(named[i].first, mono(types.back()));
      }
      std::vector<Item> goal;
      std::vector<Generated> generated(group.size());
      std::size_t k = 0;
      for (std::size_t gi = 0; gi < group.size(); ++gi) {
        const auto i = group[gi];
        generated[gi] = inf.generate(named[i].second, rec);
        if (reports[i].declared) continue;
        goal.insert(goal.end(), generated[gi].constraints.begin(),
                    generated[gi].constraints.end());
        goal.emplace_back(Equation{types[k++], generated[gi].type});
      }
      std::vector<TypeScheme> schemes;
      if (!types.empty()) {
        const auto& first = reports[group.front()];
        schemes = solve_group(inf, std::move(goal), types, outer, first.loc, first.name, true)
                      .schemes;
      }
      k = 0;
      for (std::size_t gi = 0; gi < group.size(); ++gi) {
        const auto i = group[gi];
        auto& r = reports[i];
        if (r.declared) {
          r.solved = inf.solve_and_generalize(generated[gi], outer, r.loc, r.name, nullptr);
          r.signature = inf.check_signature(*r.declared, generated[gi], outer);
        } else {
          r.solved = schemes[k++];
          env.bind(r.name, *r.solved);
        }
        r.presented = inf.present(*r.solved);
        r.ambiguity = inf.check_ambiguity(*r.solved);
      }
    } catch (const TypeError& e) {
      fail_group(fmt::format("{}: {}", e.loc().str(), e.what()),
                 e.kind() == TypeError::Kind::fuel);
    } catch (const ScopeError& e) {
      fail_group(fmt::format("{}: {}", e.loc().str(), e.what()), false);
    }
  }
  return reports;
}

}  // namespace chrtc
