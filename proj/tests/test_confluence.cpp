#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chrtc/confluence.hpp"
#include "chrtc/render.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace chrtc;
using namespace chrtc::testing;

namespace {

Program rules(std::initializer_list<const char*> texts) {
  std::vector<ChrRule> out;
  for (const char* t : texts) out.push_back(parse_rule(t));
  return Program(std::move(out));
}

const char* const S1 = "S1 @ Ord t ==> Eq t";
const char* const S2 = "S2 @ Eq [t] <=> Eq t";
const char* const S3 = "S3 @ Ord [t] <=> Ord t";
const char* const S4 = "S4 @ Ord [t] <=> True";

}  // namespace

TEST_CASE("S4 and S1 overlap on Ord [t] with residues Eq t versus nothing") {
  const auto p = rules({S1, S2, S4});
  const auto pairs = critical_pairs(p);
  const auto it = std::find_if(pairs.begin(), pairs.end(), [](const CriticalPair& c) {
    return c.rule1 == "S1" && c.rule2 == "S4";
  });
  REQUIRE(it != pairs.end());
  REQUIRE(it->overlap.size() == 1);
  CHECK(show(it->overlap.front()).rfind("Ord [", 0) == 0);
  const auto j = joinable(*it, p);
  CHECK(j.status == JoinStatus::not_joinable);
  CHECK(j.left_form.store.size() == 1);
  CHECK(j.left_form.store.front().cls == "Eq");
  CHECK(j.right_form.store.empty());
}

TEST_CASE("disjoint class names give no critical pairs") {
  CHECK(critical_pairs(rules({"a @ P x <=> True", "b @ Q x <=> True"})).empty());
}

TEST_CASE("IF has no overlap with DI1; DI1 and DF1 overlap each other") {
  const auto p = rules({"IF @ Integral t, Fractional t <=> False", "DI1 @ Dividable t <=> Integral t",
                        "DF1 @ Dividable t <=> Fractional t"});
  for (const auto& c : critical_pairs(p)) {
    const bool if_di1 = (c.rule1 == "IF" && c.rule2 == "DI1") || (c.rule1 == "DI1" && c.rule2 == "IF");
    CHECK_FALSE(if_di1);
  }
  const auto v = check_confluence(p);
  CHECK(v.verdict == Verdict::non_confluent);
  REQUIRE(v.witness);
  CHECK(v.witness->rule1 == "DI1");
  CHECK(v.witness->rule2 == "DF1");
}

TEST_CASE("self overlaps: identical ones are skipped, others are checked") {
  CHECK(critical_pairs(rules({S2})).empty());
  // Head positions swapped against the renamed copy.
  const auto p = rules({"T1 @ Collects e ce, Collects e' ce ==> e' = e"});
  const auto pairs = critical_pairs(p);
  REQUIRE_FALSE(pairs.empty());
  for (const auto& c : pairs) {
    CHECK(c.rule1 == "T1");
    CHECK(c.rule2 == "T1");
    CHECK(joinable(c, p).status == JoinStatus::joinable);
  }
}

TEST_CASE("DI2/DF2 overlap is joinable through IF") {
  const auto p = rules({"IF @ Integral t, Fractional t <=> False",
                        "DI2 @ Dividable t, Integral t <=> Integral t",
                        "DF2 @ Dividable t, Fractional t <=> Fractional t"});
  bool saw = false;
  for (const auto& c : critical_pairs(p)) {
    if (c.rule1 == "DI2" && c.rule2 == "DF2") {
      saw = true;
      const auto j = joinable(c, p);
      CHECK(j.status == JoinStatus::joinable);
      CHECK(j.left.status == DeriveStatus::unsatisfiable);
      CHECK(j.right.status == DeriveStatus::unsatisfiable);
    }
  }
  CHECK(saw);
  CHECK(check_confluence(p).confluent());
}

TEST_CASE("confluence verdicts") {
  CHECK(check_confluence(rules({S1, S2, S3})).confluent());
  const auto bad = check_confluence(rules({S1, S2, S4}));
  CHECK(bad.verdict == Verdict::non_confluent);
  REQUIRE(bad.witness);
  CHECK(show(bad.witness->overlap.front()).rfind("Ord [", 0) == 0);

  const auto num = rules_of("class Num a\nrule N1 @ Num (s -> t) <=> False\n", false);
  CHECK(check_confluence(num.solving).confluent());
  const auto with_instance =
      rules_of("class Num a\nrule N1 @ Num (s -> t) <=> False\ninstance Num (a -> b)\n", false);
  CHECK(check_confluence(with_instance.solving).verdict == Verdict::non_confluent);
}

TEST_CASE("adding S4 flips a confluent program") {
  CHECK(check_confluence(rules({S1, S2, S3})).confluent());
  CHECK_FALSE(check_confluence(rules({S1, S2, S3, S4})).confluent());
}

TEST_CASE("witness replay reproduces non-variant normal forms") {
  for (const auto& p : {rules({S1, S2, S4}), rules({"DI1 @ Dividable t <=> Integral t",
                                                    "DF1 @ Dividable t <=> Fractional t"})}) {
    const auto v = check_confluence(p);
    REQUIRE(v.witness);
    const auto again = joinable(*v.witness, p);
    CHECK(again.status == JoinStatus::not_joinable);
    CHECK_FALSE(again.left_form == again.right_form);
  }
}

TEST_CASE("fuel exhaustion makes the verdict inconclusive") {
  const auto p = rules({"up @ P x <=> P [x]", "down @ P x ==> Q x"});
  ConfluenceOptions o;
  o.fuel = 30;
  CHECK(check_confluence(p, o).verdict == Verdict::inconclusive);
}

TEST_CASE("termination precheck") {
  CHECK(check_termination_syntactic(parse_program(kPrelude)).passed);

  const auto cyclic = check_termination_syntactic(parse_program("class A t => A t\n"));
  CHECK_FALSE(cyclic.passed);
  CHECK(cyclic.reason.find("cyclic") != std::string::npos);

  const auto grows = check_termination_syntactic(parse_program("class C t\ninstance C [t] => C t\n"));
  CHECK_FALSE(grows.passed);

  const auto raw = check_termination_syntactic(
      parse_program("class C t\nrule R @ C t ==> C t\n"));
  CHECK(raw.passed);
  CHECK(raw.raw_rules == std::vector<std::string>{"R"});
}

TEST_CASE("propagation-propagation overlaps are generated") {
  const auto p = rules({"a @ P x ==> Q x", "b @ P x ==> R x"});
  const auto pairs = critical_pairs(p);
  CHECK(std::any_of(pairs.begin(), pairs.end(),
                    [](const CriticalPair& c) { return c.rule1 == "a" && c.rule2 == "b"; }));
  CHECK(check_confluence(p).confluent());
}

TEST_CASE("disequality guards prune impossible overlaps") {
  const auto p = rules({"a @ P x y ==> x /= y | Q x", "b @ P z z <=> True"});
  for (const auto& c : critical_pairs(p)) {
    CHECK_FALSE((c.rule1 == "a" && c.rule2 == "b"));
  }
}

TEST_CASE("property: confluent corpus programs are order independent") {
  for (const char* src :
       {kPrelude, "class Collects e ce | ce ~> e\n", "class U a b | a ~> b\nclass U a b => V a b\n"}) {
    const auto r = rules_of(src);
    const auto rep = oracle::check_order_independence(r.solving, 5, 100, 10);
    INFO((rep.examples.empty() ? std::string("-") : rep.examples.front()));
    CHECK(rep.disagreements == 0);
  }
}
