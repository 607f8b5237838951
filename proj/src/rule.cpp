#include "chrtc/rule.hpp"

#include <algorithm>
#include <stdexcept>

namespace chrtc {

Item apply(const Substitution& s, const Item& item) {
  if (const auto* c = std::get_if<ClassConstraint>(&item)) return apply(s, *c);
  return apply(s, std::get<Equation>(item));
}

Item instantiate(const Matcher& m, const Item& item) {
  if (const auto* c = std::get_if<ClassConstraint>(&item)) return instantiate(m, *c);
  const auto& e = std::get<Equation>(item);
  return Equation{instantiate(m, e.lhs), instantiate(m, e.rhs)};
}

void collect_vars(const Item& item, std::vector<Var>& out) {
  if (const auto* c = std::get_if<ClassConstraint>(&item)) {
    collect_vars(*c, out);
    return;
  }
  const auto& e = std::get<Equation>(item);
  collect_vars(e.lhs, out);
  collect_vars(e.rhs, out);
}

std::vector<Var> rule_vars(const ChrRule& r) {
  std::vector<Var> out;
  for (const auto& c : r.head) collect_vars(c, out);
  for (const auto& g : r.guard) {
    collect_vars(g.lhs, out);
    collect_vars(g.rhs, out);
  }
  for (const auto& b : r.body) collect_vars(b, out);
  return out;
}

ChrRule rename_apart(const ChrRule& r) {
  Matcher m;
  for (const auto& v : rule_vars(r)) m.emplace(v, Term::variable(fresh_var(v.hint)));
  ChrRule out = r;
  for (auto& c : out.head) c = instantiate(m, c);
  for (auto& g : out.guard) {
    g.lhs = instantiate(m, g.lhs);
    g.rhs = instantiate(m, g.rhs);
  }
  for (auto& b : out.body) b = instantiate(m, b);
  return out;
}

Program::Program(std::vector<ChrRule> rules) : rules_(std::move(rules)) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    if (r.head.empty()) throw std::invalid_argument("rule '" + r.name + "' has an empty head");
    if (r.is_propagation() && r.body_false) {
      throw std::invalid_argument("propagation rule '" + r.name + "' has body False");
    }
    if (!index_.emplace(r.name, i).second) {
      throw std::invalid_argument("duplicate rule name '" + r.name + "'");
    }
  }
}

const ChrRule* Program::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &rules_[it->second];
}

Program Program::with(std::vector<ChrRule> more) const {
  std::vector<ChrRule> all = rules_;
  all.insert(all.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  return Program(std::move(all));
}

Program Program::subset(const std::vector<std::string>& names) const {
  std::vector<ChrRule> out;
  for (const auto& r : rules_) {
    if (std::find(names.begin(), names.end(), r.name) != names.end()) out.push_back(r);
  }
  return Program(std::move(out));
}

}  // namespace chrtc
