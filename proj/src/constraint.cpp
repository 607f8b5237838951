#include "chrtc/constraint.hpp"

#include <algorithm>

namespace chrtc {

ClassConstraint apply(const Substitution& s, const ClassConstraint& c) {
  ClassConstraint out{c.cls, {}};
  out.args.reserve(c.args.size());
  for (const auto& a : c.args) out.args.push_back(apply(s, a));
  return out;
}

ClassConstraint instantiate(const Matcher& m, const ClassConstraint& c) {
  ClassConstraint out{c.cls, {}};
  out.args.reserve(c.args.size());
  for (const auto& a : c.args) out.args.push_back(instantiate(m, a));
  return out;
}

void collect_vars(const ClassConstraint& c, std::vector<Var>& out) {
  for (const auto& a : c.args) collect_vars(a, out);
}

bool is_ground(const ClassConstraint& c) {
  return std::all_of(c.args.begin(), c.args.end(), [](const Term& t) { return t.is_ground(); });
}

int compare(const ClassConstraint& a, const ClassConstraint& b) {
  if (int c = a.cls.compare(b.cls); c != 0) return c < 0 ? -1 : 1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (int c = compare(a.args[i], b.args[i]); c != 0) return c;
  }
  return 0;
}

bool match_into(const ClassConstraint& pattern, const ClassConstraint& candidate, Matcher& m) {
  if (pattern.cls != candidate.cls || pattern.args.size() != candidate.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    if (!match_term(pattern.args[i], candidate.args[i], m)) return false;
  }
  return true;
}

std::optional<Matcher> match_head(const ClassConstraint& pattern,
                                  const ClassConstraint& candidate, const Substitution& h) {
  Matcher m;
  if (!match_into(pattern, apply(h, candidate), m)) return std::nullopt;
  return m;
}

namespace {

bool same_top(const Term& a, const Term& b) {
  return a.ctor() == b.ctor() && a.args().size() == b.args().size();
}

}  // namespace

GuardStatus evaluate_guard(const Guard& g, const Matcher& theta, const Substitution& h,
                           std::span<const Equation> known_disequalities) {
  const Term lhs = apply(h, instantiate(theta, g.lhs));
  const Term rhs = apply(h, instantiate(theta, g.rhs));

  if (g.kind == GuardKind::not_equal) {
    if (lhs == rhs) return GuardStatus::refuted;
    if (!lhs.is_var() && !rhs.is_var() && !same_top(lhs, rhs)) return GuardStatus::entailed;
    if (lhs.is_ground() && rhs.is_ground()) return GuardStatus::entailed;
    for (const auto& d : known_disequalities) {
      const Term l = apply(h, d.lhs);
      const Term r = apply(h, d.rhs);
      if ((l == lhs && r == rhs) || (l == rhs && r == lhs)) return GuardStatus::entailed;
    }
    return GuardStatus::undetermined;
  }

  // Variables of the guard not bound by the head match are local to the rule
  // and may be chosen freely; everything else must already be fixed by h.
  std::vector<Var> locals;
  collect_vars(g.lhs, locals);
  collect_vars(g.rhs, locals);
  std::erase_if(locals, [&](const Var& v) { return theta.count(v) != 0; });

  std::vector<Var> all;
  collect_vars(lhs, all);
  collect_vars(rhs, all);
  VarSet rigid;
  for (const auto& v : all) {
    if (std::find(locals.begin(), locals.end(), v) == locals.end()) rigid.insert(v);
  }
  if (unify(lhs, rhs, {}, &rigid)) return GuardStatus::entailed;
  if (!unify(lhs, rhs)) return GuardStatus::refuted;
  return GuardStatus::undetermined;
}

bool guard_entailed(std::span<const Guard> guard, const Matcher& theta, const Substitution& h,
                    std::span<const Equation> known_disequalities) {
  // Equality conjuncts share their local variables, so they are solved together.
  std::vector<Equation> eqs;
  std::vector<Var> locals;
  for (const auto& g : guard) {
    if (g.kind == GuardKind::not_equal) {
      if (evaluate_guard(g, theta, h, known_disequalities) != GuardStatus::entailed) return false;
      continue;
    }
    collect_vars(g.lhs, locals);
    collect_vars(g.rhs, locals);
    eqs.push_back({apply(h, instantiate(theta, g.lhs)), apply(h, instantiate(theta, g.rhs))});
  }
  if (eqs.empty()) return true;
  std::erase_if(locals, [&](const Var& v) { return theta.count(v) != 0; });
  VarSet rigid;
  std::vector<Var> all;
  for (const auto& e : eqs) {
    collect_vars(e.lhs, all);
    collect_vars(e.rhs, all);
  }
  for (const auto& v : all) {
    if (std::find(locals.begin(), locals.end(), v) == locals.end()) rigid.insert(v);
  }
  return unify(eqs, {}, &rigid).has_value();
}

}  // namespace chrtc
