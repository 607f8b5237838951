#include "chrtc/desugar.hpp"

#include <set>

#include <fmt/format.h>

#include "chrtc/parser.hpp"
#include "chrtc/render.hpp"

namespace chrtc {

namespace {

ClassConstraint class_head(const ClassDecl& decl) {
  ClassConstraint h{decl.name, {}};
  for (const auto& p : decl.params) h.args.push_back(Term::variable(p));
  return h;
}

}  // namespace

ClassRules translate_class(const ClassDecl& decl, RuleNamer& names) {
  ClassRules out;
  const ClassConstraint head = class_head(decl);
  if (!decl.context.empty()) {
    ChrRule r;
    r.name = names.solving();
    r.kind = RuleKind::propagation;
    r.head = {head};
    for (const auto& d : decl.context) r.body.emplace_back(d);
    out.superclass = std::move(r);
  }
  for (const auto& d : decl.context) {
    ChrRule r;
    r.name = names.presentation();
    r.kind = RuleKind::simplification;
    r.head = {head, d};
    r.body = {head};
    out.presentation.push_back(std::move(r));
  }
  out.fundeps = translate_fundep(decl, names);
  return out;
}

ChrRule translate_instance(const InstanceDecl& decl, RuleNamer& names) {
  ChrRule r;
  r.name = names.solving();
  r.kind = RuleKind::simplification;
  r.head = {ClassConstraint{decl.cls, decl.args}};
  for (const auto& d : decl.context) r.body.emplace_back(d);
  return r;
}

std::vector<ChrRule> translate_fundep(const ClassDecl& decl, RuleNamer& names) {
  std::vector<ChrRule> out;
  const ClassConstraint x = class_head(decl);
  for (const auto& fd : decl.fundeps) {
    ClassConstraint y{decl.name, {}};
    for (std::size_t i = 0; i < decl.params.size(); ++i) {
      const bool determinant = std::find(fd.from.begin(), fd.from.end(), i) != fd.from.end();
      y.args.push_back(determinant ? x.args[i] : Term::fresh(decl.params[i].hint + "'"));
    }
    ChrRule r;
    r.name = names.fundep();
    r.kind = RuleKind::propagation;
    r.head = {x, y};
    r.body = {Equation{y.args[fd.to], x.args[fd.to]}};
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ChrRule> builtin_kind_ruleset() {
  return {
      parse_rule("functional @ Kind1 f e fe, Kind1 f e fe' ==> fe = fe'"),
      parse_rule("surjective @ Kind1 f e fe, Kind1 f' e' fe ==> f = f', e = e'"),
      parse_rule("kinding @ Kind1 f e fe, Kind0 f <=> False"),
  };
}

namespace {

Term desugar_apps(const Term& t, std::vector<ClassConstraint>& out) {
  if (t.is_var() || t.is_ground()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(desugar_apps(a, out));
  if (t.ctor() != kTypeApp) return Term::app(t.ctor(), std::move(args));
  Term fe = Term::fresh("fe");
  out.push_back(ClassConstraint{"Kind1", {args[0], args[1], fe}});
  return fe;
}

}  // namespace

std::pair<Term, std::vector<ClassConstraint>> desugar_constructor_apps(const Term& t) {
  std::vector<ClassConstraint> cs;
  Term out = desugar_apps(t, cs);
  return {out, cs};
}

TypeScheme method_scheme(const ClassDecl& cls, const MethodSig& m) {
  TypeScheme s;
  s.quantified = cls.params;
  s.quantified.insert(s.quantified.end(), m.scheme.quantified.begin(), m.scheme.quantified.end());
  s.context.push_back(class_head(cls));
  s.context.insert(s.context.end(), m.scheme.context.begin(), m.scheme.context.end());
  s.type = m.scheme.type;
  return s;
}

std::string RuleSet::describe(const std::string& rule) const {
  auto it = origins.find(rule);
  if (it == origins.end()) return rule;
  return fmt::format("{} ({} at {})", rule, it->second.description, it->second.loc.str());
}

namespace {

std::string describe_instance(const InstanceDecl& d) {
  return "instance " + show(ClassConstraint{d.cls, d.args});
}

class Builder {
 public:
  Builder(const SurfaceProgram& program, const BuildOptions& options)
      : program_(program), options_(options) {}

  RuleSet run() {
    for (const auto* c : program_.all<ClassDecl>()) out_.classes.emplace(c->name, *c);
    for (const auto& decl : program_.decls) {
      if (const auto* c = std::get_if<ClassDecl>(&decl)) add_class(*c);
      if (const auto* i = std::get_if<InstanceDecl>(&decl)) add_instance(*i);
    }
    for (const auto* r : program_.all<RawRule>()) {
      add(solving_, r->rule, {"rule " + r->rule.name, r->loc});
    }
    if (options_.kind_constraints) {
      for (auto& r : builtin_kind_ruleset()) add(solving_, r, {"builtin kind rule", {}});
    }
    out_.solving = Program(solving_);
    out_.presentation = Program(presentation_);

    out_.termination = check_termination_syntactic(program_);
    ConfluenceOptions copts;
    copts.fuel = options_.fuel;
    if (!out_.termination.passed) {
      out_.warnings.push_back("termination precheck failed (" + out_.termination.reason +
                              "); confluence is checked with fuel " +
                              std::to_string(options_.fuel) + " as the safety net");
      copts.termination_failure = out_.termination.reason;
      copts.fuel_guarded = true;
    } else if (!out_.termination.raw_rules.empty()) {
      copts.fuel_guarded = true;
    }
    if (options_.check_confluence) {
      out_.confluence = check_confluence(out_.solving, copts);
      if (out_.confluence.verdict == Verdict::non_confluent) reject();
      if (out_.confluence.verdict == Verdict::inconclusive) {
        out_.warnings.push_back("confluence inconclusive: " + out_.confluence.reason);
      }
    }
    return std::move(out_);
  }

 private:
  void add(std::vector<ChrRule>& into, ChrRule rule, RuleOrigin origin) {
    if (out_.origins.count(rule.name)) {
      throw DeclError(origin.loc, fmt::format("rule name {} is already used by {}", rule.name,
                                              out_.describe(rule.name)));
    }
    out_.origins.emplace(rule.name, std::move(origin));
    into.push_back(std::move(rule));
  }

  void require_class(const std::string& cls, SourceLoc loc, std::string_view where) {
    if (!out_.classes.count(cls)) {
      throw DeclError(loc, fmt::format("{} refers to undeclared class {}", where, cls));
    }
  }

  void add_class(const ClassDecl& c) {
    for (const auto& d : c.context) require_class(d.cls, c.loc, "context of class " + c.name);
    ClassRules rules = translate_class(c, names_);
    const RuleOrigin origin{"class " + c.name, c.loc};
    if (rules.superclass) add(solving_, *rules.superclass, origin);
    for (auto& r : rules.fundeps) add(solving_, r, origin);
    for (auto& r : rules.presentation) add(presentation_, r, origin);
  }

  void add_instance(const InstanceDecl& i) {
    const std::string what = describe_instance(i);
    require_class(i.cls, i.loc, what);
    for (const auto& d : i.context) require_class(d.cls, i.loc, "context of " + what);
    add(solving_, translate_instance(i, names_), {what, i.loc});
  }

  [[noreturn]] void reject() {
    const auto& w = *out_.confluence.witness;
    const auto& r1 = out_.origins.at(w.rule1);
    std::string msg = fmt::format(
        "the CHR program is not confluent: critical pair of {} and {} is not joinable; "
        "there is an error in the instance declarations",
        out_.describe(w.rule1), out_.describe(w.rule2));
    // Prefer pointing at the later declaration, which usually introduced the clash.
    const auto& r2 = out_.origins.at(w.rule2);
    const SourceLoc loc = r2.loc.line >= r1.loc.line ? r2.loc : r1.loc;
    throw DeclError(loc, msg, out_.confluence);
  }

  const SurfaceProgram& program_;
  const BuildOptions& options_;
  RuleSet out_;
  RuleNamer names_;
  std::vector<ChrRule> solving_;
  std::vector<ChrRule> presentation_;
};

}  // namespace

RuleSet build_ruleset(const SurfaceProgram& program, const BuildOptions& options) {
  return Builder(program, options).run();
}

}  // namespace chrtc
