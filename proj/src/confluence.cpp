#include "chrtc/confluence.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>

#include "chrtc/render.hpp"

namespace chrtc {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::confluent: return "confluent";
    case Verdict::non_confluent: return "non-confluent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

void push_vars(const ChrRule& r, VarSet& out) {
  std::vector<Var> vs;
  for (const auto& c : r.head) collect_vars(c, vs);
  out.insert(vs.begin(), vs.end());
}

// State where `fired` has been applied to the overlapped constraints; `other`
// contributes the part of its head outside the overlap.
ChrState successor(const ChrRule& fired, const ChrRule& other,
                   const std::vector<bool>& other_in_overlap,
                   const Substitution& h, const VarSet& v,
                   const std::vector<Equation>& disequalities) {
  std::vector<Item> goal;
  // A simplification consumes its whole head; a propagation keeps it.
  if (fired.is_propagation()) {
    for (const auto& c : fired.head) goal.emplace_back(c);
  }
  for (std::size_t i = 0; i < other.head.size(); ++i) {
    if (!other_in_overlap[i]) goal.emplace_back(other.head[i]);
  }
  for (const auto& b : fired.body) goal.push_back(b);
  ChrState s = initial_state(std::move(goal), v);
  s.h = h;
  s.disequalities = disequalities;
  return s;
}

}  // namespace

std::vector<CriticalPair> critical_pairs(const Program& program) {
  std::vector<CriticalPair> out;
  const auto& rules = program.rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i; j < rules.size(); ++j) {
      const ChrRule r1 = rename_apart(rules[i]);
      const ChrRule r2 = rename_apart(rules[j]);
      const std::size_t n1 = r1.head.size();
      const std::size_t n2 = r2.head.size();

      std::vector<Equation> guard_eqs;
      std::vector<Equation> diseqs;
      for (const auto* r : {&r1, &r2}) {
        for (const auto& g : r->guard) {
          (g.kind == GuardKind::equal ? guard_eqs : diseqs).push_back({g.lhs, g.rhs});
        }
      }
      VarSet v;
      push_vars(r1, v);
      push_vars(r2, v);

      // mapping[a] = head position of r2 paired with position a of r1, or n2.
      std::vector<std::size_t> mapping(n1, n2);
      std::vector<bool> used2(n2, false);
      std::function<void(std::size_t, std::size_t)> extend = [&](std::size_t a,
                                                                 std::size_t paired) {
        if (a == n1) {
          if (paired == 0) return;
          // A rule overlapping its copy position for position gives two
          // identical successors; such pairs are joinable by construction.
          if (i == j && paired == n1) {
            bool identity = true;
            for (std::size_t x = 0; x < n1; ++x) identity = identity && mapping[x] == x;
            if (identity) return;
          }
          std::vector<Equation> eqs = guard_eqs;
          for (std::size_t x = 0; x < n1; ++x) {
            if (mapping[x] == n2) continue;
            const auto& c1 = r1.head[x];
            const auto& c2 = r2.head[mapping[x]];
            for (std::size_t k = 0; k < c1.args.size(); ++k) eqs.push_back({c1.args[k], c2.args[k]});
          }
          auto mgu = unify(eqs);
          if (!mgu) return;
          for (const auto& d : diseqs) {
            if (apply(*mgu, d.lhs) == apply(*mgu, d.rhs)) return;
          }
          std::vector<bool> in1(n1, false);
          std::vector<bool> in2(n2, false);
          CriticalPair p;
          p.rule1 = rules[i].name;
          p.rule2 = rules[j].name;
          for (std::size_t x = 0; x < n1; ++x) {
            if (mapping[x] == n2) continue;
            in1[x] = true;
            in2[mapping[x]] = true;
            p.overlap.push_back(apply(*mgu, r1.head[x]));
          }
          p.unifier = *mgu;
          p.left = successor(r1, r2, in2, *mgu, v, diseqs);
          p.right = successor(r2, r1, in1, *mgu, v, diseqs);
          p.left_fails = r1.body_false;
          p.right_fails = r2.body_false;
          out.push_back(std::move(p));
          return;
        }
        extend(a + 1, paired);
        for (std::size_t b = 0; b < n2; ++b) {
          if (used2[b]) continue;
          const auto& c1 = r1.head[a];
          const auto& c2 = r2.head[b];
          if (c1.cls != c2.cls || c1.args.size() != c2.args.size()) continue;
          used2[b] = true;
          mapping[a] = b;
          extend(a + 1, paired + 1);
          mapping[a] = n2;
          used2[b] = false;
        }
      };
      extend(0, 0);
    }
  }
  return out;
}

JoinResult joinable(const CriticalPair& pair, const Program& program, std::size_t fuel) {
  JoinResult r;
  DeriveOptions opts;
  opts.fuel = fuel;
  opts.record_trace = true;
  // A False body ends its side at once; the state is kept for the witness.
  auto side = [&](const ChrState& s, bool fails, const std::string& rule) {
    if (!fails) return derive(s, program, opts);
    Derivation d;
    d.initial = d.state = s;
    d.status = DeriveStatus::unsatisfiable;
    d.failing_rule = rule;
    return d;
  };
  r.left = side(pair.left, pair.left_fails, pair.rule1);
  r.right = side(pair.right, pair.right_fails, pair.rule2);
  if (r.left.status == DeriveStatus::fuel_exceeded ||
      r.right.status == DeriveStatus::fuel_exceeded) {
    r.status = JoinStatus::inconclusive;
    return r;
  }
  r.left_form = canonicalize(r.left);
  r.right_form = canonicalize(r.right);
  r.status = r.left_form == r.right_form ? JoinStatus::joinable : JoinStatus::not_joinable;
  return r;
}

ConfluenceVerdict check_confluence(const Program& program, const ConfluenceOptions& options) {
  ConfluenceVerdict v;
  if (options.termination_failure && !options.fuel_guarded) {
    v.verdict = Verdict::inconclusive;
    v.reason = "termination precheck failed: " + *options.termination_failure;
    return v;
  }
  for (auto& pair : critical_pairs(program)) {
    ++v.pairs_checked;
    JoinResult r = joinable(pair, program, options.fuel);
    if (r.status == JoinStatus::joinable) continue;
    if (r.status == JoinStatus::inconclusive) {
      v.verdict = Verdict::inconclusive;
      v.reason = fmt::format("fuel exhausted on critical pair {}/{}", pair.rule1, pair.rule2);
    } else {
      v.verdict = Verdict::non_confluent;
    }
    v.witness = std::move(pair);
    v.witness_result = std::move(r);
    return v;
  }
  return v;
}

namespace {

std::size_t constraint_size(const ClassConstraint& c) {
  std::size_t n = 0;
  for (const auto& a : c.args) n += term_size(a);
  return n;
}

}  // namespace

TerminationCheck check_termination_syntactic(const SurfaceProgram& program) {
  TerminationCheck out;
  auto fail = [&](std::string reason) {
    if (out.passed) {
      out.passed = false;
      out.reason = std::move(reason);
    }
  };

  std::map<std::string, std::set<std::string>> supers;
  for (const auto* c : program.all<ClassDecl>()) {
    auto& s = supers[c->name];
    for (const auto& d : c->context) s.insert(d.cls);
  }
  // 0 unvisited, 1 on the DFS stack, 2 done.
  std::map<std::string, int> mark;
  std::function<bool(const std::string&, std::vector<std::string>&)> cyclic =
      [&](const std::string& cls, std::vector<std::string>& path) {
        int& m = mark[cls];
        if (m == 2) return false;
        path.push_back(cls);
        if (m == 1) return true;
        m = 1;
        if (auto it = supers.find(cls); it != supers.end()) {
          for (const auto& s : it->second) {
            if (cyclic(s, path)) return true;
          }
        }
        mark[cls] = 2;
        path.pop_back();
        return false;
      };
  for (const auto& [cls, _] : supers) {
    std::vector<std::string> path;
    if (cyclic(cls, path)) {
      std::string shown;
      for (const auto& p : path) shown += (shown.empty() ? "" : " -> ") + p;
      fail("cyclic superclass hierarchy: " + shown);
      break;
    }
  }

  for (const auto* inst : program.all<InstanceDecl>()) {
    std::vector<Var> head_vars;
    std::size_t head_size = 0;
    for (const auto& a : inst->args) {
      collect_vars(a, head_vars);
      head_size += term_size(a);
    }
    const VarSet hv(head_vars.begin(), head_vars.end());
    NameSupply names;
    const std::string head = render(ClassConstraint{inst->cls, inst->args}, names);
    for (const auto& d : inst->context) {
      std::vector<Var> dv;
      collect_vars(d, dv);
      const bool vars_ok = std::all_of(dv.begin(), dv.end(), [&](const Var& x) {
        return hv.count(x) != 0;
      });
      if (!vars_ok) {
        fail(fmt::format("instance {} at {}: context constraint {} mentions variables not in "
                         "the head",
                         head, inst->loc.str(), render(d, names)));
      } else if (constraint_size(d) >= head_size) {
        fail(fmt::format("instance {} at {}: context constraint {} is not smaller than the "
                         "head ({} >= {} constructors)",
                         head, inst->loc.str(), render(d, names), constraint_size(d), head_size));
      }
    }
  }

  for (const auto* r : program.all<RawRule>()) out.raw_rules.push_back(r->rule.name);
  return out;
}

}  // namespace chrtc
