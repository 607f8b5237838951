#include "chrtc/scheme.hpp"

namespace chrtc {

VarSet free_vars(const TypeScheme& s) {
  std::vector<Var> all;
  for (const auto& c : s.context) collect_vars(c, all);
  collect_vars(s.type, all);
  VarSet out(all.begin(), all.end());
  for (const auto& q : s.quantified) out.erase(q);
  return out;
}

std::pair<std::vector<ClassConstraint>, Term> instantiate(const TypeScheme& s) {
  Matcher m;
  for (const auto& q : s.quantified) m.emplace(q, Term::variable(fresh_var(q.hint)));
  std::vector<ClassConstraint> ctx;
  for (const auto& c : s.context) ctx.push_back(instantiate(m, c));
  return {std::move(ctx), instantiate(m, s.type)};
}

}  // namespace chrtc
