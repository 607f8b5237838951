#include "chrtc/render.hpp"

#include <cctype>

#include <fmt/format.h>

namespace chrtc {

const std::string& NameSupply::name(const Var& v) {
  auto it = names_.find(v);
  if (it != names_.end()) return it->second;
  std::string candidate = next_candidate(v);
  used_.insert(candidate);
  return names_.emplace(v, std::move(candidate)).first->second;
}

std::string NameSupply::next_candidate(const Var& v) {
  if (style_ == Style::letters) {
    while (true) {
      const std::size_t n = letters_++;
      std::string s(1, static_cast<char>('a' + n % 26));
      if (n >= 26) s += std::to_string(n / 26);
      if (used_.count(s) == 0) return s;
    }
  }
  std::string base = v.hint;
  if (base.empty() || !std::islower(static_cast<unsigned char>(base.front()))) base = "t";
  if (used_.count(base) == 0) return base;
  for (std::size_t k = 1;; ++k) {
    std::string s = fmt::format("{}_{}", base, k);
    if (used_.count(s) == 0) return s;
  }
}

namespace {

bool is_atomic(const Term& t) {
  if (t.is_var() || t.args().empty()) return true;
  return t.ctor() == kList || is_tuple_ctor(t.ctor());
}

std::string atom(const Term& t, NameSupply& names) {
  std::string s = render(t, names);
  return is_atomic(t) ? s : "(" + s + ")";
}

template <typename T, typename F>
std::string join(std::span<const T> xs, F&& f, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += f(xs[i]);
  }
  return out;
}

}  // namespace

std::string render(const Term& t, NameSupply& names) {
  if (t.is_var()) return names.name(t.var());
  const auto& args = t.args();
  const auto& c = t.ctor();
  if (c == kArrow && args.size() == 2) {
    std::string lhs = render(args[0], names);
    const bool paren = !args[0].is_var() && args[0].ctor() == kArrow;
    return (paren ? "(" + lhs + ")" : lhs) + " -> " + render(args[1], names);
  }
  if (c == kList && args.size() == 1) return "[" + render(args[0], names) + "]";
  if (is_tuple_ctor(c)) {
    return "(" + join(std::span<const Term>(args), [&](const Term& a) { return render(a, names); }) +
           ")";
  }
  if (c == kTypeApp && args.size() == 2) {
    // Left-nested applications print without parentheses: f a b.
    const bool head_app = !args[0].is_var() && args[0].ctor() == kTypeApp;
    std::string head = head_app ? render(args[0], names) : atom(args[0], names);
    return head + " " + atom(args[1], names);
  }
  std::string out = c;
  for (const auto& a : args) out += " " + atom(a, names);
  return out;
}

std::string render(const ClassConstraint& c, NameSupply& names) {
  std::string out = c.cls;
  for (const auto& a : c.args) out += " " + atom(a, names);
  return out;
}

std::string render(const Item& item, NameSupply& names) {
  if (const auto* c = std::get_if<ClassConstraint>(&item)) return render(*c, names);
  const auto& e = std::get<Equation>(item);
  return render(e.lhs, names) + " = " + render(e.rhs, names);
}

std::string render(const Guard& g, NameSupply& names) {
  const char* op = g.kind == GuardKind::equal ? " = " : " /= ";
  return render(g.lhs, names) + op + render(g.rhs, names);
}

std::string render_items(std::span<const Item> items, NameSupply& names) {
  if (items.empty()) return "True";
  return join(items, [&](const Item& i) { return render(i, names); });
}

std::string render_constraints(std::span<const ClassConstraint> cs, NameSupply& names) {
  if (cs.empty()) return "True";
  return join(cs, [&](const ClassConstraint& c) { return render(c, names); });
}

std::string render_substitution(const Substitution& h, NameSupply& names) {
  if (h.empty()) return "True";
  std::string out;
  for (const auto& [v, t] : h.bindings()) {
    if (!out.empty()) out += ", ";
    out += names.name(v) + " = " + render(t, names);
  }
  return out;
}

std::string render(const ChrRule& r) {
  NameSupply names;
  std::string out = r.name + " @ " + render_constraints(r.head, names);
  out += r.is_propagation() ? " ==> " : " <=> ";
  if (!r.guard.empty()) {
    out += join(std::span<const Guard>(r.guard), [&](const Guard& g) { return render(g, names); });
    out += " | ";
  }
  out += r.body_false ? std::string("False") : render_items(r.body, names);
  return out;
}

std::string render_state(const ChrState& s, NameSupply& names) {
  std::vector<Item> goal;
  for (const auto& g : s.goal) goal.push_back(apply(s.h, g));
  const auto store = normalized_store(s);
  return fmt::format("goal={}\tstore={}\th={}", render_items(goal, names),
                     render_constraints(store, names), render_substitution(s.h, names));
}

std::string render_trace(const Derivation& d, NameSupply& names) {
  std::string out = fmt::format("0\tinitial\t-\t{}\n", render_state(d.initial, names));
  for (const auto& t : d.trace) {
    out += fmt::format("{}\t{}\t{}\t{}\n", t.index, to_string(t.transition),
                       t.rule.empty() ? "-" : t.rule, render_state(t.state, names));
  }
  return out;
}

std::string render(const TypeScheme& s) {
  NameSupply names(NameSupply::Style::letters);
  std::string ctx;
  if (s.context.size() == 1) {
    ctx = render(s.context.front(), names) + " => ";
  } else if (s.context.size() > 1) {
    ctx = "(" + render_constraints(s.context, names) + ") => ";
  }
  return ctx + render(s.type, names);
}

std::string render_signature(const std::string& name, const TypeScheme& s) {
  return name + " :: " + render(s);
}

std::string show(const Term& t) {
  NameSupply names;
  return render(t, names);
}

std::string show(const ClassConstraint& c) {
  NameSupply names;
  return render(c, names);
}

}  // namespace chrtc
