// One PASS/FAIL line per acceptance criterion; the exit status is nonzero if
// any criterion fails.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "chrtc/canonical.hpp"
#include "chrtc/cli.hpp"
#include "chrtc/inference.hpp"
#include "chrtc/render.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace chrtc;
using namespace chrtc::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus(const std::string& name) {
  return slurp(fs::path(CHRTC_CORPUS_DIR) / name);
}

// Collects the reasons a criterion fails; empty means it passed.
struct Outcome {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

Program raw(std::initializer_list<const char*> texts) {
  std::vector<ChrRule> out;
  for (const char* t : texts) out.push_back(parse_rule(t));
  return Program(std::move(out));
}

// Schemes are equal up to renaming when their types match with a bijective
// renaming that also maps one context onto the other as a set.
bool same_scheme(const TypeScheme& a, const TypeScheme& b) {
  Matcher ab;
  Matcher ba;
  if (!match_term(a.type, b.type, ab) || !match_term(b.type, a.type, ba)) return false;
  if (a.context.size() != b.context.size()) return false;
  // Context-only variables are not fixed by the type: try every assignment.
  std::vector<bool> used(b.context.size(), false);
  std::function<bool(std::size_t, Matcher)> place = [&](std::size_t i, Matcher m) {
    if (i == a.context.size()) {
      std::set<Term, TermLess> images;
      for (const auto& [v, t] : m) {
        if (!t.is_var()) return false;
        images.insert(t);
      }
      return images.size() == m.size();
    }
    for (std::size_t j = 0; j < b.context.size(); ++j) {
      if (used[j]) continue;
      Matcher next = m;
      if (!match_into(a.context[i], b.context[j], next)) continue;
      used[j] = true;
      const bool ok = place(i + 1, next);
      used[j] = false;
      if (ok) return true;
    }
    return false;
  };
  return place(0, ab);
}

struct Checked {
  SurfaceProgram program;
  RuleSet rules;
  std::map<std::string, BindingReport> by_name;

  std::optional<TypeScheme> scheme(const std::string& n) const {
    const auto it = by_name.find(n);
    if (it == by_name.end() || it->second.error) return std::nullopt;
    if (it->second.signature && !it->second.signature->ok()) return std::nullopt;
    return it->second.declared ? it->second.declared : it->second.presented;
  }
  std::string shown(const std::string& n) const {
    const auto it = by_name.find(n);
    if (it == by_name.end()) return "<missing>";
    if (it->second.error) return "error: " + *it->second.error;
    const auto s = scheme(n);
    return s ? render(*s) : "signature rejected";
  }
};

Checked check(const std::string& source) {
  Checked c;
  c.program = parse_program(source);
  c.rules = build_ruleset(c.program);
  for (auto& r : infer_program(c.program, c.rules)) c.by_name.emplace(r.name, std::move(r));
  return c;
}

void expect_scheme(Outcome& o, const Checked& c, const std::string& name, const char* expected) {
  const auto s = c.scheme(name);
  const bool ok = s && same_scheme(*s, parse_scheme(expected));
  o.expect(ok, fmt::format("{}: expected {}, got {}", name, expected, c.shown(name)));
}

Outcome derivation_reproduction() {
  Outcome o;
  const auto source = corpus("prelude_ord.hs");
  const auto r = cli::cmd_derive(source, "Ord [t1]");
  o.expect(r.exit_code == cli::exit_code::ok, "cmd_derive failed");
  o.expect(r.out.find("store: Ord t1, Eq t1\n") != std::string::npos,
           "final store is not Ord t1, Eq t1");

  const auto rules = rules_of(source);
  VarScope s;
  const auto g = goal("Ord [t1]", s);
  const auto v = vars_of_scope(s);
  const auto reference = canonicalize(derive(g, rules.solving, v));
  bool found = false;
  for (std::uint64_t seed = 0; seed < 1000 && !found; ++seed) {
    DeriveOptions opts;
    opts.random_seed = seed;
    opts.record_trace = true;
    const auto d = derive(g, rules.solving, v, opts);
    const auto first = std::find_if(d.trace.begin(), d.trace.end(),
                                     [](const TraceStep& t) { return !t.rule.empty(); });
    if (first == d.trace.end() || first->rule != "S1") continue;
    found = true;
    o.expect(canonicalize(d) == reference, "S1-first derivation is not a variant");
    o.detail = fmt::format("S1-first seed {}", seed);
  }
  o.expect(found, "no seed fires S1 first");
  return o;
}

Outcome confluence_verdicts() {
  Outcome o;
  const char* S1 = "S1 @ Ord t ==> Eq t";
  const char* S2 = "S2 @ Eq [t] <=> Eq t";
  const char* S3 = "S3 @ Ord [t] <=> Ord t";
  const char* S4 = "S4 @ Ord [t] <=> True";
  const char* IF = "IF @ Integral t, Fractional t <=> False";

  o.expect(check_confluence(raw({S1, S2, S3})).confluent(), "{S1,S2,S3} not confluent");

  const auto p = raw({S1, S2, S4});
  const auto v = check_confluence(p);
  o.expect(v.verdict == Verdict::non_confluent, "{S1,S2,S4} not non-confluent");
  if (v.witness) {
    // Replay the witness from scratch rather than trusting the stored result.
    const auto j = joinable(*v.witness, p);
    auto residue = [](const Derivation& d) {
      std::vector<std::string> out;
      for (const auto& c : d.store()) out.push_back(c.cls);
      std::sort(out.begin(), out.end());
      return out;
    };
    auto l = residue(j.left);
    auto r = residue(j.right);
    if (l > r) std::swap(l, r);
    o.expect(j.status == JoinStatus::not_joinable, "witness replay is joinable");
    o.expect(l.empty() && r == std::vector<std::string>{"Eq"}, "witness residues are not {} vs {Eq t}");
  } else {
    o.failures.push_back("{S1,S2,S4} has no witness");
  }

  o.expect(check_confluence(raw({IF, "DI1 @ Dividable t <=> Integral t",
                                 "DF1 @ Dividable t <=> Fractional t"}))
                   .verdict == Verdict::non_confluent,
           "{IF,DI1,DF1} not non-confluent");
  o.expect(check_confluence(raw({IF, "DI2 @ Dividable t, Integral t <=> Integral t",
                                 "DF2 @ Dividable t, Fractional t <=> Fractional t"}))
               .confluent(),
           "{IF,DI2,DF2} not confluent");
  const auto num = rules_of("class Num a\nrule N1 @ Num (s -> t) <=> False\ninstance Num (a -> b)\n",
                            false);
  o.expect(check_confluence(num.solving).verdict == Verdict::non_confluent,
           "N1 + instance Num (a -> b) not non-confluent");
  return o;
}

Outcome inferred_schemes() {
  Outcome o;
  const auto ord = check(corpus("prelude_ord.hs"));
  // The worked example's lists make this [a] -> [a] -> Bool; the target is
  // checked as stated.
  expect_scheme(o, ord, "f", "Ord a => a -> a -> Bool");
  expect_scheme(o, check(corpus("collects_fundep.hs")), "f", "Collects e ce => e -> e -> ce -> ce");
  const auto rec = check(corpus("records.hs"));
  expect_scheme(o, rec, "f", "(Rec tx A tf1, Rec tx B tf2) => tx -> (tf1, tf2)");
  expect_scheme(o, rec, "g", "(Rec tx tl ts, Ext ty tl ts te) => tx -> ty -> tl -> te");
  expect_scheme(o, rec, "h", "(Rec tx A te, Rec tx B te) => tx -> tx -> [te]");
  const auto div = check(corpus("dividable.hs"));
  expect_scheme(o, div, "halfish", "Dividable a => a -> a");
  // Without the signature the same scheme must be inferred.
  std::string unsigned_source = corpus("dividable.hs");
  const auto at = unsigned_source.find("halfish ::");
  unsigned_source.erase(at, unsigned_source.find('\n', at) + 1 - at);
  expect_scheme(o, check(unsigned_source), "halfish", "Dividable a => a -> a");
  return o;
}

Outcome ambiguity_verdicts() {
  Outcome o;
  auto verdict = [](const std::string& source, const std::string& method) {
    const auto rules = build_ruleset(parse_program(source));
    const Inferencer inf(rules);
    const auto& cls = rules.classes.at("Collects");
    for (const auto& m : cls.methods) {
      if (m.name == method) return inf.check_ambiguity(method_scheme(cls, m)).unambiguous();
    }
    throw std::logic_error("no method " + method);
  };
  const auto plain = corpus("collects.hs");
  const auto fd = corpus("collects_fundep.hs");
  o.expect(!verdict(plain, "empty"), "empty is unambiguous without T1");
  o.expect(verdict(fd, "empty"), "empty is ambiguous with T1");
  o.expect(verdict(plain, "insert"), "insert is ambiguous without T1");
  o.expect(verdict(fd, "insert"), "insert is ambiguous with T1");
  return o;
}

Outcome inherited_fundep() {
  Outcome o;
  const auto rules = rules_of(corpus("inherited_fundep.hs"));
  VarScope s;
  const auto d = derive_goal("U a b, V a c", rules.solving, s);
  o.expect(d.ok(), "derivation did not finish");
  const Term b = apply(d.state.h, Term::variable(s.at("b")));
  const Term c = apply(d.state.h, Term::variable(s.at("c")));
  o.expect(b == c, "final h does not entail b = c");
  return o;
}

Outcome disjointness() {
  Outcome o;
  const auto closed = check(corpus("disjoint.hs"));
  const auto& f = closed.by_name.at("f");
  o.expect(f.error.has_value(), "f is accepted under IF");
  o.expect(f.error && f.error->find("rule IF") != std::string::npos, "the rejection is not by IF");
  expect_scheme(o, check(corpus("disjoint_open.hs")), "f",
                "(Integral a, Fractional a) => a -> a -> a");
  return o;
}

Outcome order_independence() {
  Outcome o;
  std::vector<fs::path> sources;
  for (const auto& e : fs::directory_iterator(CHRTC_CORPUS_DIR)) {
    if (e.path().extension() == ".hs") sources.push_back(e.path());
  }
  std::sort(sources.begin(), sources.end());
  std::size_t programs = 0;
  std::size_t runs = 0;
  for (const auto& src : sources) {
    RuleSet rules;
    try {
      rules = build_ruleset(parse_program(slurp(src)));
    } catch (const DeclError&) {
      continue;  // not confluent
    }
    if (!rules.confluence.confluent() || rules.solving.rules().empty()) continue;
    ++programs;
    const auto r = oracle::check_order_independence(rules.solving, 7, 1000, 10);
    runs += r.runs;
    o.expect(r.ok(), fmt::format("{}: {} disagreements{}", src.filename().string(),
                                 r.disagreements,
                                 r.examples.empty() ? "" : " e.g. " + r.examples.front()));
  }
  o.detail = fmt::format("{} programs, {} runs", programs, runs);
  return o;
}

Outcome unification_oracle() {
  Outcome o;
  const auto r = oracle::check_unification();
  o.expect(r.ok(), fmt::format("{} satisfiability, {} generality, {} idempotence failures{}",
                               r.satisfiability_mismatches, r.generality_failures,
                               r.idempotence_failures,
                               r.examples.empty() ? "" : " e.g. " + r.examples.front()));
  o.detail = fmt::format("{} pairs, {} unifiable, {} solutions checked", r.pairs, r.unifiable,
                         r.solutions_checked);
  return o;
}

Outcome token_discipline() {
  Outcome o;
  const auto r = oracle::check_token_discipline(11, 200, 10);
  o.expect(r.ok(), fmt::format("{} fuel, {} bound, {} repeated token failures{}",
                               r.fuel_exhausted, r.bound_violations, r.repeated_tokens,
                               r.examples.empty() ? "" : " e.g. " + r.examples.front()));
  o.detail = fmt::format("{} derivations, max {} propagations", r.derivations, r.max_propagations);
  return o;
}

Outcome logical_reading() {
  Outcome o;
  const auto r = oracle::check_logical_reading(13, 500);
  o.expect(r.ok(), fmt::format("{} violations{}", r.violations,
                               r.examples.empty() ? "" : " e.g. " + r.examples.front()));
  o.detail = fmt::format("{} instances, {} steps", r.instances, r.steps_checked);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"derivation reproduction", derivation_reproduction},
      {"confluence verdicts", confluence_verdicts},
      {"inferred schemes", inferred_schemes},
      {"ambiguity verdicts", ambiguity_verdicts},
      {"inherited functional dependency", inherited_fundep},
      {"disjointness rejection", disjointness},
      {"order independence", order_independence},
      {"unification oracle", unification_oracle},
      {"token discipline", token_discipline},
      {"logical reading", logical_reading},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = o.failures.empty();
    failed += ok ? 0 : 1;
    std::string line = fmt::format("{} {:>2} {}", ok ? "PASS" : "FAIL", i + 1, criteria[i].first);
    if (!o.detail.empty()) line += " (" + o.detail + ")";
    for (const auto& f : o.failures) line += "; " + f;
    std::cout << line << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
