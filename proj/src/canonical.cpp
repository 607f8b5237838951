#include "chrtc/canonical.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace chrtc {

Substitution orient_protected(const Substitution& h, const VarSet& protected_vars) {
  Substitution current = h;
  for (const auto& p : protected_vars) {
    const Term* image = current.find(p);
    if (!image || !image->is_var() || protected_vars.count(image->var()) != 0) continue;
    const Var local = image->var();
    const Matcher swap{{local, Term::variable(p)}};
    std::map<Var, Term> next;
    for (const auto& [v, t] : current.bindings()) {
      if (v == p) continue;
      next.emplace(v, instantiate(swap, t));
    }
    next.emplace(local, Term::variable(p));
    current = Substitution(std::move(next));
  }
  return current;
}

namespace {

constexpr std::size_t kPermutationLimit = 40320;

class Renamer {
 public:
  explicit Renamer(const VarSet& protected_vars) : protected_(protected_vars) {}

  Term rename(const Term& t) {
    if (t.is_var()) {
      if (protected_.count(t.var()) != 0) return t;
      auto it = names_.find(t.var());
      if (it == names_.end()) {
        const VarId id = kCanonicalBase + names_.size();
        it = names_.emplace(t.var(), Var{id, "_" + std::to_string(names_.size())}).first;
      }
      return Term::variable(it->second);
    }
    if (t.is_ground()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(rename(a));
    return Term::app(t.ctor(), std::move(args));
  }

  ClassConstraint rename(const ClassConstraint& c) {
    ClassConstraint out{c.cls, {}};
    for (const auto& a : c.args) out.args.push_back(rename(a));
    return out;
  }

  // Orders terms ignoring the identity of not-yet-named local variables.
  int shape_compare(const Term& a, const Term& b) const {
    if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
    if (a.is_var()) {
      const auto ka = key(a.var());
      const auto kb = key(b.var());
      return ka == kb ? 0 : (ka < kb ? -1 : 1);
    }
    if (int c = a.ctor().compare(b.ctor()); c != 0) return c < 0 ? -1 : 1;
    if (a.args().size() != b.args().size()) return a.args().size() < b.args().size() ? -1 : 1;
    for (std::size_t i = 0; i < a.args().size(); ++i) {
      if (int c = shape_compare(a.args()[i], b.args()[i]); c != 0) return c;
    }
    return 0;
  }

  int shape_compare(const ClassConstraint& a, const ClassConstraint& b) const {
    if (int c = a.cls.compare(b.cls); c != 0) return c < 0 ? -1 : 1;
    if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (int c = shape_compare(a.args[i], b.args[i]); c != 0) return c;
    }
    return 0;
  }

 private:
  // (0, stamp) protected; (1, index) already named; (2, 0) unnamed local.
  std::pair<int, VarId> key(const Var& v) const {
    if (protected_.count(v) != 0) return {0, v.id};
    auto it = names_.find(v);
    if (it != names_.end()) return {1, it->second.id};
    return {2, 0};
  }

  const VarSet& protected_;
  std::map<Var, Var> names_;
};

void sort_unique(std::vector<ClassConstraint>& cs) {
  std::sort(cs.begin(), cs.end(), ConstraintLess{});
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

bool lex_less(const std::vector<ClassConstraint>& a, const std::vector<ClassConstraint>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), ConstraintLess{});
}

}  // namespace

CanonicalForm canonicalize(const ChrState& state) {
  CanonicalForm form;
  const auto& v = state.protected_vars;
  const Substitution h = orient_protected(state.h, v);

  Renamer base(v);
  for (const auto& p : v) {
    const Term image = apply(h, Term::variable(p));
    if (image.is_var() && image.var() == p) continue;
    form.bindings.emplace_back(p, base.rename(image));
  }

  std::vector<ClassConstraint> store;
  for (const auto& e : state.store) store.push_back(apply(h, e.constraint));
  sort_unique(store);

  std::stable_sort(store.begin(), store.end(), [&](const auto& a, const auto& b) {
    return base.shape_compare(a, b) < 0;
  });

  // Constraints with equal shapes can be named in any relative order; try all
  // orders within each tie group (bounded) and keep the least result.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t combos = 1;
  for (std::size_t i = 0; i < store.size();) {
    std::size_t j = i + 1;
    while (j < store.size() && base.shape_compare(store[i], store[j]) == 0) ++j;
    if (j - i > 1) {
      groups.emplace_back(i, j);
      for (std::size_t k = 2; k <= j - i && combos <= kPermutationLimit; ++k) combos *= k;
    }
    i = j;
  }
  if (combos > kPermutationLimit) groups.clear();

  std::vector<ClassConstraint> best;
  bool have_best = false;
  std::vector<ClassConstraint> order = store;
  for (auto& [b, e] : groups) std::sort(order.begin() + b, order.begin() + e, ConstraintLess{});

  std::function<void(std::size_t)> visit = [&](std::size_t g) {
    if (g == groups.size()) {
      Renamer r = base;
      std::vector<ClassConstraint> renamed;
      for (const auto& c : order) renamed.push_back(r.rename(c));
      sort_unique(renamed);
      if (!have_best || lex_less(renamed, best)) {
        best = std::move(renamed);
        have_best = true;
      }
      return;
    }
    auto first = order.begin() + static_cast<std::ptrdiff_t>(groups[g].first);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(groups[g].second);
    do {
      visit(g + 1);
    } while (std::next_permutation(first, last, ConstraintLess{}));
  };
  visit(0);
  form.store = std::move(best);

  if (!state.goal.empty()) {
    Renamer r = base;
    for (const auto& c : order) r.rename(c);
    for (const auto& item : state.goal) {
      const Item normal = apply(h, item);
      if (const auto* c = std::get_if<ClassConstraint>(&normal)) {
        form.goal.emplace_back(r.rename(*c));
      } else {
        const auto& e = std::get<Equation>(normal);
        form.goal.emplace_back(Equation{r.rename(e.lhs), r.rename(e.rhs)});
      }
    }
  }
  return form;
}

CanonicalForm canonicalize(const Derivation& d) {
  if (d.status == DeriveStatus::unsatisfiable) {
    CanonicalForm f;
    f.unsatisfiable = true;
    return f;
  }
  return canonicalize(d.state);
}

bool variants(const ChrState& a, const ChrState& b) { return canonicalize(a) == canonicalize(b); }

}  // namespace chrtc
