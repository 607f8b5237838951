#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "chrtc/canonical.hpp"
#include "chrtc/inference.hpp"
#include "chrtc/render.hpp"
#include "support/helpers.hpp"

using namespace chrtc;
using namespace chrtc::testing;

namespace {

struct Checked {
  SurfaceProgram program;
  RuleSet rules;
  std::map<std::string, BindingReport> by_name;

  const BindingReport& operator[](const std::string& n) const { return by_name.at(n); }
  std::string type(const std::string& n) const {
    const auto& r = by_name.at(n);
    if (r.error) return "error: " + *r.error;
    return render(r.declared ? *r.declared : *r.presented);
  }
};

Checked check(const std::string& source) {
  Checked c;
  c.program = parse_program(source);
  c.rules = build_ruleset(c.program);
  for (auto& r : infer_program(c.program, c.rules)) c.by_name.emplace(r.name, std::move(r));
  return c;
}

std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(CHRTC_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kPreludeF = std::string(kPrelude) +
                              "tail :: [a] -> [a]\ninit :: [a] -> [a]\n"
                              "f g h = c where a = tail g; b = init h; c = a < b\n";

const std::string kNum = R"(class Num a where
  (+) :: a -> a -> a
class Num a => Fractional a where
  (/) :: a -> a -> a
class Num a => Integral a where
  div :: a -> a -> a
)";

const std::string kCollects = R"(class Collects e ce where
  empty :: ce
  insert :: e -> ce -> ce
  member :: e -> ce -> Bool
)";

const std::string kCollectsFd = R"(class Collects e ce | ce ~> e where
  empty :: ce
  insert :: e -> ce -> ce
  member :: e -> ce -> Bool
)";

TypeScheme method(const Checked& c, const std::string& name) {
  return *initial_env(c.program, c.rules).find(name);
}

}  // namespace

TEST_CASE("generation for a lone lambda") {
  const auto rules = rules_of("");
  Inferencer inf(rules);
  const auto p = parse_program("i = \\x -> x\n");
  const auto g = inf.generate(p.all<Binding>().front()->expr, TypeEnv{});
  CHECK(g.constraints.size() == 0);
  REQUIRE(g.type.ctor() == kArrow);
  CHECK(g.type.args()[0] == g.type.args()[1]);
}

TEST_CASE("integer literals are overloaded when Num is declared") {
  const auto rules = rules_of(kNum);
  Inferencer inf(rules);
  const auto p = parse_program("two = 2\n");
  const auto g = inf.generate(p.all<Binding>().front()->expr, TypeEnv{});
  REQUIRE(g.constraints.size() == 1);
  const auto& c = std::get<ClassConstraint>(g.constraints.front());
  CHECK(c.cls == "Num");
  CHECK(c.args.front() == g.type);
  CHECK(check("two = 2\n").type("two") == "Int");
}

TEST_CASE("the list comparison example") {
  const auto c = check(kPreludeF);
  CHECK(render(*c["f"].solved) == "(Ord a, Eq a) => [a] -> [a] -> Bool");
  CHECK(c.type("f") == "Ord a => [a] -> [a] -> Bool");
  CHECK(c["f"].ambiguity.unambiguous());
}

TEST_CASE("functional dependency example") {
  const auto c = check(kCollectsFd + "f x y c = insert x z where z = insert y c\n");
  CHECK(c.type("f") == "Collects a b => a -> a -> b -> b");
  const auto open = check(kCollects + "f x y c = insert x z where z = insert y c\n");
  // The inner insert's constraint is generated first, so y's class is named first.
  CHECK(open.type("f") == "(Collects a b, Collects c b) => c -> a -> b -> b");
}

TEST_CASE("record programs") {
  const auto c = check(read_corpus("records.hs"));
  CHECK(c.type("f") == "(Rec a A b, Rec a B c) => a -> (b, c)");
  CHECK(c.type("g") == "(Ext a b c d, Rec e b c) => e -> a -> b -> d");
  CHECK(c.type("h") == "(Rec a A b, Rec a B b) => a -> a -> [b]");
}

TEST_CASE("halfish and disjointness") {
  CHECK(check(read_corpus("dividable.hs")).type("halfish") == "Dividable a => a -> a");
  const auto open = check(kNum + "f x y = x / y + x `div` y\n");
  CHECK(open.type("f") == "(Fractional a, Integral a) => a -> a -> a");
  const auto closed =
      check(kNum + "rule IF @ Integral t, Fractional t <=> False\nf x y = x / y + x `div` y\n");
  REQUIRE(closed["f"].error);
  CHECK(closed["f"].error->find("IF") != std::string::npos);
}

TEST_CASE("presentation") {
  const auto rules = rules_of(kPrelude);
  Inferencer inf(rules);
  auto present = [&](const std::string& ctx) {
    auto s = parse_scheme(ctx + " => t1");
    return render(inf.present(s));
  };
  CHECK(present("(Ord t1, Eq t1)") == "Ord a => a");
  CHECK(present("Eq t") == "Eq a => b");
  CHECK(present("(Ord t, Eq t, Eq s)") == "(Ord a, Eq b) => c");
}

TEST_CASE("ambiguity") {
  const auto open = check(kCollects);
  Inferencer a(open.rules);
  const auto empty_open = a.check_ambiguity(method(open, "empty"));
  REQUIRE(empty_open.ambiguous.size() == 1);
  CHECK(empty_open.ambiguous.front().hint == "e");
  CHECK(a.check_ambiguity(method(open, "insert")).unambiguous());

  const auto fd = check(kCollectsFd);
  Inferencer b(fd.rules);
  CHECK(b.check_ambiguity(method(fd, "empty")).unambiguous());
  SUBCASE("adding the dependency never makes a method ambiguous") {
    for (const char* m : {"empty", "insert", "member"}) {
      if (a.check_ambiguity(method(open, m)).unambiguous()) {
        CHECK(b.check_ambiguity(method(fd, m)).unambiguous());
      }
    }
  }
}

TEST_CASE("signatures") {
  SUBCASE("the principal type is accepted") {
    const auto c = check(kPreludeF + "k :: Ord t => [t] -> [t] -> Bool\nk = f\n");
    REQUIRE(c["k"].signature);
    CHECK(c["k"].signature->ok());
  }
  SUBCASE("a more general body type is rejected") {
    const auto c = check(kPreludeF + "k :: Ord t => t -> t -> Bool\nk = f\n");
    REQUIRE(c["k"].signature);
    CHECK(c["k"].signature->status == SignatureResult::Status::body_mismatch);
  }
  SUBCASE("an insufficient context is rejected naming the constraint") {
    const auto c = check(kPreludeF + "k :: Eq t => [t] -> [t] -> Bool\nk = f\n");
    REQUIRE(c["k"].signature);
    CHECK(c["k"].signature->status == SignatureResult::Status::unentailed);
    REQUIRE(c["k"].signature->constraint);
    CHECK(c["k"].signature->constraint->cls == "Ord");
  }
  SUBCASE("superclasses of the declared context are available") {
    const auto c = check(std::string(kPrelude) + "k :: Ord t => t -> Bool\nk x = x == x\n");
    CHECK(c["k"].signature->ok());
  }
  SUBCASE("polymorphic recursion with a signature") {
    const auto c = check("data Nest a = Nil | Cons a (Nest [a])\n"
                         "len :: Nest a -> Int\nlen n = len (Cons [] Nil)\n");
    CHECK(c["len"].signature->ok());
  }
}

TEST_CASE("scheme stability: printed schemes are accepted as signatures") {
  for (const char* file : {"prelude_ord.hs", "collects_fundep.hs", "records.hs", "dividable.hs",
                           "disjoint_open.hs"}) {
    const auto c = check(read_corpus(file));
    Inferencer inf(c.rules);
    const auto env = initial_env(c.program, c.rules);
    for (const auto* b : c.program.all<Binding>()) {
      const auto& r = c[b->name];
      REQUIRE_FALSE(r.error);
      const auto printed = parse_scheme(render(*r.presented));
      // Generate against an environment holding the earlier bindings.
      TypeEnv scope = env;
      for (const auto& [n, rep] : c.by_name) {
        if (n != b->name && rep.solved) scope.bind(n, rep.declared ? *rep.declared : *rep.solved);
      }
      const auto g = inf.generate(b->expr, scope);
      CHECK_MESSAGE(inf.check_signature(printed, g, scope).ok(), file, ": ", b->name);
    }
  }
}

TEST_CASE("presentation is display-only") {
  for (const char* file : {"prelude_ord.hs", "records.hs", "dividable.hs", "disjoint_open.hs"}) {
    const auto c = check(read_corpus(file));
    for (const auto& [name, r] : c.by_name) {
      if (!r.solved) continue;
      VarSet v(r.solved->quantified.begin(), r.solved->quantified.end());
      auto expand = [&](const TypeScheme& s) {
        std::vector<Item> g(s.context.begin(), s.context.end());
        return canonicalize(derive(g, c.rules.solving, v));
      };
      CHECK_MESSAGE(expand(*r.presented) == expand(*r.solved), file, ": ", name);
      CHECK(r.presented->context.size() <= r.solved->context.size());
    }
  }
}

TEST_CASE("let polymorphism and monomorphic lambda bindings") {
  const auto c = check("pair = let i x = x in (i 1, i True)\nbad f = (f 1, f True)\n");
  CHECK(c.type("pair") == "(Int, Bool)");
  REQUIRE(c["bad"].error);
  CHECK(c["bad"].error->find("cannot match") != std::string::npos);
}

TEST_CASE("constraints on enclosing variables are deferred to the enclosing binding") {
  const auto c = check(std::string(kPrelude) + "g x = let h y = x == y in h\n");
  CHECK(c.type("g") == "Eq a => a -> a -> Bool");
}

TEST_CASE("errors") {
  SUBCASE("unbound names") {
    const auto c = check("f = y\n");
    REQUIRE(c["f"].error);
    CHECK(c["f"].error->find("'y' is not in scope") != std::string::npos);
    CHECK(c["f"].error->rfind("1:5", 0) == 0);
  }
  SUBCASE("dependents of a failed binding") {
    const auto c = check("bad = True 1\nuse = bad\n");
    REQUIRE(c["use"].error);
    CHECK(c["use"].error->find("depends on 'bad'") != std::string::npos);
  }
  SUBCASE("fuel") {
    const auto src = "class P a\nrule up @ P x <=> P [x]\nm :: P a => a\nf = m\n";
    const auto p = parse_program(src);
    BuildOptions bo;
    bo.check_confluence = false;
    const auto rules = build_ruleset(p, bo);
    InferOptions io;
    io.fuel = 100;
    const auto reports = infer_program(p, rules, io);
    REQUIRE(reports.front().error);
    CHECK(reports.front().fuel_exhausted);
  }
  SUBCASE("duplicate definitions") {
    CHECK_THROWS_AS(check("f = 1\nf = 2\n"), DeclError);
  }
}

TEST_CASE("binding groups") {
  const auto p = parse_program("a = b\nb = a\nc = d\nd = 1\ne = c\n");
  std::vector<std::pair<std::string, ExprPtr>> named;
  for (const auto* b : p.all<Binding>()) named.emplace_back(b->name, b->expr);
  const auto groups = binding_groups(named);
  REQUIRE(groups.size() == 4);
  CHECK(groups[0] == std::vector<std::size_t>{0, 1});
  CHECK(groups[1] == std::vector<std::size_t>{3});
  CHECK(groups[2] == std::vector<std::size_t>{2});
  CHECK(groups[3] == std::vector<std::size_t>{4});
}

TEST_CASE("kind constraints") {
  const auto src = "class Functor f where\n  fmap :: (a -> b) -> f a -> f b\n"
                   "inc :: Int -> Int\nbump xs = fmap inc xs\n";
  const auto p = parse_program(src);
  BuildOptions bo;
  bo.kind_constraints = true;
  const auto rules = build_ruleset(p, bo);
  InferOptions io;
  io.kind_constraints = true;
  const auto reports = infer_program(p, rules, io);
  REQUIRE_FALSE(reports.front().error);
  CHECK(render(*reports.front().presented) ==
        "(Kind1 a Int b, Functor a) => b -> b");
}
