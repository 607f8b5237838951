#include "chrtc/engine.hpp"

#include <algorithm>
#include <functional>
#include <utility>

namespace chrtc {

ChrState initial_state(std::vector<Item> goal, VarSet protected_vars) {
  ChrState s;
  s.goal.assign(std::make_move_iterator(goal.begin()), std::make_move_iterator(goal.end()));
  s.protected_vars = std::move(protected_vars);
  return s;
}

std::vector<ClassConstraint> normalized_store(const ChrState& s) {
  std::vector<ClassConstraint> out;
  out.reserve(s.store.size());
  for (const auto& e : s.store) out.push_back(apply(s.h, e.constraint));
  return out;
}

std::string_view to_string(Transition t) {
  switch (t) {
    case Transition::solve: return "solve";
    case Transition::introduce: return "introduce";
    case Transition::simplify: return "simplify";
    case Transition::propagate: return "propagate";
  }
  return "?";
}

std::string_view to_string(DeriveStatus s) {
  switch (s) {
    case DeriveStatus::final: return "final";
    case DeriveStatus::unsatisfiable: return "unsatisfiable";
    case DeriveStatus::fuel_exceeded: return "fuel-exceeded";
  }
  return "?";
}

SelectionPolicy SelectionPolicy::random(std::uint64_t seed) {
  SelectionPolicy p;
  p.rng_.emplace(seed);
  return p;
}

std::size_t SelectionPolicy::pick(std::size_t n) {
  if (!rng_ || n <= 1) return 0;
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(*rng_);
}

std::set<Token> tokens_for(const StoreEntry& entry, std::span<const StoreEntry> store,
                           const Program& program, const Substitution& h) {
  std::set<Token> out;
  std::vector<const StoreEntry*> pool;
  for (const auto& e : store) pool.push_back(&e);
  pool.push_back(&entry);
  std::vector<ClassConstraint> normal;
  for (const auto* e : pool) normal.push_back(apply(h, e->constraint));
  const std::size_t self = pool.size() - 1;

  for (const auto& rule : program.rules()) {
    if (!rule.is_propagation()) continue;
    const auto head = rename_apart(rule).head;
    const std::size_t k = head.size();
    if (k > pool.size()) continue;

    std::vector<std::size_t> chosen;
    std::function<void(std::size_t, bool)> extend = [&](std::size_t pos, bool has_self) {
      if (pos == k) {
        if (!has_self) return;
        std::vector<Equation> eqs;
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t a = 0; a < head[i].args.size(); ++a) {
            eqs.push_back({head[i].args[a], normal[chosen[i]].args[a]});
          }
        }
        if (!unify(eqs)) return;
        Token t{rule.name, {}};
        for (auto idx : chosen) t.ids.push_back(pool[idx]->id);
        out.insert(std::move(t));
        return;
      }
      // Positions left must still be able to include the new entry.
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
        if (normal[i].cls != head[pos].cls || normal[i].args.size() != head[pos].args.size()) {
          continue;
        }
        const bool now_self = has_self || i == self;
        if (!now_self && k - pos - 1 == 0) continue;
        chosen.push_back(i);
        extend(pos + 1, now_self);
        chosen.pop_back();
      }
    };
    extend(0, false);
  }
  return out;
}

namespace {

struct Firing {
  const ChrRule* rule = nullptr;
  std::vector<std::size_t> positions;  // indices into state.store, head order
  Matcher theta;
};

// Calls `visit` for each applicable (rule, entry tuple) in selection order:
// simplifications before propagations, then program order, then lowest store
// positions. Stops as soon as `visit` returns false.
void for_each_firing(const ChrState& state, const Program& program,
                     const std::function<bool(Firing&&)>& visit) {
  const auto normal = normalized_store(state);
  bool stop = false;
  std::vector<const ChrRule*> order;
  for (const auto& r : program.rules()) {
    if (!r.is_propagation()) order.push_back(&r);
  }
  for (const auto& r : program.rules()) {
    if (r.is_propagation()) order.push_back(&r);
  }
  for (const ChrRule* rp : order) {
    if (stop) return;
    const ChrRule& rule = *rp;
    const std::size_t k = rule.head.size();
    if (k > state.store.size()) continue;
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t, const Matcher&)> extend = [&](std::size_t pos,
                                                                  const Matcher& theta) {
      if (stop) return;
      if (pos == k) {
        if (rule.is_propagation()) {
          Token t{rule.name, {}};
          for (auto idx : chosen) t.ids.push_back(state.store[idx].id);
          if (state.tokens.count(t) == 0) return;
        }
        if (!guard_entailed(rule.guard, theta, state.h, state.disequalities)) return;
        if (!visit(Firing{&rule, chosen, theta})) stop = true;
        return;
      }
      for (std::size_t i = 0; i < state.store.size() && !stop; ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
        Matcher next = theta;
        if (!match_into(rule.head[pos], normal[i], next)) continue;
        chosen.push_back(i);
        extend(pos + 1, next);
        chosen.pop_back();
      }
    };
    extend(0, Matcher{});
  }
}

void push_front(std::deque<Item>& goal, std::vector<Item> items) {
  goal.insert(goal.begin(), std::make_move_iterator(items.begin()),
              std::make_move_iterator(items.end()));
}

StepResult solve_or_introduce(const ChrState& state, std::size_t goal_index,
                              const Program& program) {
  StepResult r;
  r.state = state;
  ChrState& s = r.state;
  Item item = std::move(s.goal[goal_index]);
  s.goal.erase(s.goal.begin() + static_cast<std::ptrdiff_t>(goal_index));

  if (const auto* eq = std::get_if<Equation>(&item)) {
    r.transition = Transition::solve;
    auto h = unify(eq->lhs, eq->rhs, s.h);
    if (!h) {
      r.status = StepStatus::unsatisfiable;
      r.failed_equation = Equation{apply(s.h, eq->lhs), apply(s.h, eq->rhs)};
      return r;
    }
    s.h = std::move(*h);
    for (const auto& d : s.disequalities) {
      if (apply(s.h, d.lhs) == apply(s.h, d.rhs)) {
        r.status = StepStatus::unsatisfiable;
        r.failed_equation = *eq;
        return r;
      }
    }
    r.status = StepStatus::progressed;
    return r;
  }

  r.transition = Transition::introduce;
  StoreEntry entry{s.next_id++, std::get<ClassConstraint>(std::move(item))};
  auto fresh = tokens_for(entry, s.store, program, s.h);
  s.tokens.insert(fresh.begin(), fresh.end());
  s.store.push_back(std::move(entry));
  r.status = StepStatus::progressed;
  return r;
}

StepResult fire(const ChrState& state, const Firing& f) {
  StepResult r;
  r.state = state;
  ChrState& s = r.state;
  const ChrRule& rule = *f.rule;
  r.rule = rule.name;
  r.transition = rule.is_propagation() ? Transition::propagate : Transition::simplify;

  if (rule.body_false) {
    r.status = StepStatus::unsatisfiable;
    return r;
  }

  Matcher theta = f.theta;
  std::vector<Var> body_vars;
  for (const auto& b : rule.body) collect_vars(b, body_vars);
  for (const auto& v : body_vars) {
    if (theta.count(v) == 0) theta.emplace(v, Term::variable(fresh_var(v.hint)));
  }
  std::vector<Item> body;
  body.reserve(rule.body.size());
  for (const auto& b : rule.body) body.push_back(instantiate(theta, b));

  std::vector<EntryId> ids;
  for (auto idx : f.positions) ids.push_back(state.store[idx].id);

  if (rule.is_propagation()) {
    s.tokens.erase(Token{rule.name, ids});
  } else {
    std::erase_if(s.store, [&](const StoreEntry& e) {
      return std::find(ids.begin(), ids.end(), e.id) != ids.end();
    });
    std::erase_if(s.tokens, [&](const Token& t) {
      return std::any_of(t.ids.begin(), t.ids.end(), [&](EntryId id) {
        return std::find(ids.begin(), ids.end(), id) != ids.end();
      });
    });
  }
  push_front(s.goal, std::move(body));
  r.status = StepStatus::progressed;
  return r;
}

}  // namespace

StepResult step(const ChrState& state, const Program& program) {
  auto policy = SelectionPolicy::leftmost();
  return step(state, program, policy);
}

StepResult step(const ChrState& state, const Program& program, SelectionPolicy& policy) {
  if (!policy.is_random()) {
    if (!state.goal.empty()) return solve_or_introduce(state, 0, program);
    std::optional<Firing> first;
    for_each_firing(state, program, [&](Firing&& f) {
      first = std::move(f);
      return false;
    });
    if (first) return fire(state, *first);
    StepResult r;
    r.status = StepStatus::final;
    r.state = state;
    return r;
  }

  std::vector<Firing> firings;
  for_each_firing(state, program, [&](Firing&& f) {
    firings.push_back(std::move(f));
    return true;
  });
  const std::size_t n = state.goal.size() + firings.size();
  if (n == 0) {
    StepResult r;
    r.status = StepStatus::final;
    r.state = state;
    return r;
  }
  const std::size_t choice = policy.pick(n);
  if (choice < state.goal.size()) return solve_or_introduce(state, choice, program);
  return fire(state, firings[choice - state.goal.size()]);
}

Derivation derive(ChrState initial, const Program& program, const DeriveOptions& options) {
  Derivation d;
  d.initial = initial;
  d.state = std::move(initial);
  auto policy = options.random_seed ? SelectionPolicy::random(*options.random_seed)
                                     : SelectionPolicy::leftmost();
  while (true) {
    StepResult r = step(d.state, program, policy);
    if (r.status == StepStatus::final) {
      d.status = DeriveStatus::final;
      return d;
    }
    if (d.steps >= options.fuel) {
      d.status = DeriveStatus::fuel_exceeded;
      return d;
    }
    ++d.steps;
    ++d.counts[static_cast<std::size_t>(r.transition)];
    if (r.transition == Transition::introduce) ++d.introduced;
    if (options.record_trace) d.trace.push_back({d.steps, r.transition, r.rule, r.state});
    d.state = std::move(r.state);
    if (r.status == StepStatus::unsatisfiable) {
      d.status = DeriveStatus::unsatisfiable;
      d.failing_rule = r.rule;
      d.failed_equation = std::move(r.failed_equation);
      return d;
    }
  }
}

Derivation derive(std::vector<Item> goal, const Program& program, VarSet protected_vars,
                  const DeriveOptions& options) {
  return derive(initial_state(std::move(goal), std::move(protected_vars)), program, options);
}

}  // namespace chrtc
