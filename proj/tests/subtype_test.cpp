// Structural subtype engine: rule coverage, frozen one-sentence explanations,
// failure paths, derivation-tree invariants, and randomized order-theoretic
// properties (reflexivity, transitivity along guaranteed chains, antisymmetry
// up to equivalence, reference invariance).

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "subwit/norm.hpp"
#include "subwit/parser.hpp"
#include "subwit/pretty.hpp"
#include "subwit/subtype.hpp"
#include "subwit/typecheck.hpp"

#include "testutil.hpp"

using namespace subwit;

namespace {

struct Fixture {
  TypingContext tc = testutil::prelude_context();
  KindingContext& ctx = tc.kinds();

  TypePtr ty(const std::string& s) {
    Prog p = parse_program("type probe = " + s + " ;", "<sub>");
    return normalize_type(ctx, std::get_if<AliasDecl>(&p.decls.at(0).node)->body);
  }
  SubtypeResult sub(const std::string& s, const std::string& t) {
    return check_subtype(ctx, ty(s), ty(t));
  }
  bool holds(const std::string& s, const std::string& t) { return sub(s, t).ok; }
};

// Every node of a successful derivation is itself successful.
bool all_ok(const SubtypeNode& n) {
  if (!n.ok) return false;
  for (const SubtypeNode& c : n.children)
    if (!all_ok(c)) return false;
  return true;
}

// Some node of a failed derivation carries the originating failure code.
bool has_fail_origin(const SubtypeNode& n) {
  if (!n.fail_code.empty()) return true;
  for (const SubtypeNode& c : n.children)
    if (has_fail_origin(c)) return true;
  return false;
}

} // namespace

TEST_CASE("structural rules: records, arrows, quantifiers, data types") {
  Fixture f;
  // Width and depth on records.
  CHECK(f.holds("{x: int; y: bool}", "{x: int}"));
  CHECK(f.holds("{x: {a: int; b: int}}", "{x: {a: int}}"));
  CHECK(f.holds("{b: int; a: int}", "{a: int; b: int}")); // order is irrelevant
  CHECK_FALSE(f.holds("{x: int}", "{x: int; y: bool}"));
  // Arrows: contravariant domains, covariant codomains.
  CHECK(f.holds("{m: int} -> {a: int; b: int}", "{m: int; n: int} -> {a: int}"));
  CHECK_FALSE(f.holds("{m: int; n: int} -> unit", "{m: int} -> unit"));
  // Quantifiers relate bodies under a common binder, up to alpha.
  CHECK(f.holds("all 'a::*. {v: 'a; tag: int}", "all 'b::*. {v: 'b}"));
  CHECK(f.holds("exists 'a::*. {v: 'a; tag: int}", "exists 'b::*. {v: 'b}"));
  CHECK_FALSE(f.holds("all 'a::*. {v: 'a}", "all 'b::*. {v: 'b; tag: int}"));
  // Declared-variance propagation through data types.
  CHECK(f.holds("list {x: int; y: int}", "list {x: int}"));
  CHECK_FALSE(f.holds("list {x: int}", "list {x: int; y: int}"));
  // Contravariant and covariant parameters of the witness alias.
  CHECK(f.holds("sub {m: int} {q: int}", "sub {m: int; n: int} {q: int}"));
  CHECK(f.holds("sub {m: int} {q: int; r: int}", "sub {m: int} {q: int}"));
  CHECK_FALSE(f.holds("sub {m: int; n: int} {q: int}", "sub {m: int} {q: int}"));
}

TEST_CASE("references are invariant in both directions") {
  Fixture f;
  CHECK(f.holds("ref {a: int}", "ref {a: int}"));
  CHECK_FALSE(f.holds("ref {a: int; b: int}", "ref {a: int}"));
  CHECK_FALSE(f.holds("ref {a: int}", "ref {a: int; b: int}"));
  // ... but equivalent (not identical) cells are accepted.
  CHECK(f.holds("ref {a: int; b: bool}", "ref {b: bool; a: int}"));
}

TEST_CASE("frozen explanations: record width") {
  Fixture f;
  SubtypeResult r = f.sub("{x: int}", "{m: int}");
  REQUIRE_FALSE(r.ok);
  CHECK(r.failure.reason == SubtypeReason::MissingField);
  CHECK(r.failure.explanation == "The first record type has no field m");
  CHECK(r.failure.path.empty());

  // In contravariant position the blame flips to the other side.
  SubtypeResult d = f.sub("{m: int} -> unit", "{} -> unit");
  REQUIRE_FALSE(d.ok);
  CHECK(d.failure.explanation == "The second record type has no field m");
  CHECK(d.failure.path == std::vector<std::string>{"arrow-domain"});

  // Two flips restore the original orientation.
  SubtypeResult dd = f.sub("({} -> unit) -> unit", "({m: int} -> unit) -> unit");
  REQUIRE_FALSE(dd.ok);
  CHECK(dd.failure.explanation == "The first record type has no field m");
  CHECK(dd.failure.path == (std::vector<std::string>{"arrow-domain", "arrow-domain"}));
}

TEST_CASE("frozen explanations: base types, constructors, variables") {
  Fixture f;
  CHECK(f.sub("int", "bool").failure.explanation == "The base type int does not match bool");
  CHECK(f.sub("list int", "lazy_cell int").failure.explanation ==
        "The type constructor list does not match lazy_cell");
  SubtypeResult v = f.sub("all 'n::(+ * -> *). all 'm::(+ * -> *). 'n int",
                          "all 'n::(+ * -> *). all 'm::(+ * -> *). 'm int");
  CHECK(v.failure.explanation == "The type variable 'n does not match 'm");
  CHECK(f.sub("{a: int}", "int -> int").failure.explanation ==
        "A record type cannot match an arrow type");
  CHECK(f.sub("int", "ref int").failure.explanation == "A base type cannot match a reference type");
}

TEST_CASE("frozen explanations: reference cells and invariant arguments") {
  Fixture f;
  SubtypeResult r = f.sub("ref {a: int}", "ref {}");
  REQUIRE_FALSE(r.ok);
  CHECK(r.failure.reason == SubtypeReason::InvariantMismatch);
  CHECK(r.failure.explanation == "The reference cell types {a: int} and {} are not equivalent");
  CHECK(r.failure.path == std::vector<std::string>{"ref"});

  // An invariantly declared data-type parameter produces the argument wording.
  TypeChecker checker(f.tc);
  checker.check_program(parse_program("type ('a!) ibox = | IBox of ref 'a ;", "<sub>"));
  SubtypeResult a = f.sub("ibox {a: int}", "ibox {}");
  REQUIRE_FALSE(a.ok);
  CHECK(a.failure.reason == SubtypeReason::InvariantMismatch);
  CHECK(a.failure.explanation ==
        "Argument 1 of ibox is invariant, but {a: int} and {} are not equivalent");
  CHECK(a.failure.path == std::vector<std::string>{"argument 1 of ibox"});
}

TEST_CASE("frozen explanations: quantifier kinds and bodies") {
  Fixture f;
  SubtypeResult k = f.sub("all 'a::*. int", "all 'n::(- * -> *). int");
  REQUIRE_FALSE(k.ok);
  CHECK(k.failure.reason == SubtypeReason::KindMismatch);
  CHECK(k.failure.explanation == "The quantifier kinds * and (- * -> *) are not identical");

  SubtypeResult b = f.sub("all 'a::*. {m: int}", "all 'b::*. {m: bool}");
  REQUIRE_FALSE(b.ok);
  CHECK(b.failure.explanation == "The base type int does not match bool");
  CHECK(b.failure.path == (std::vector<std::string>{"body of all 'a", "field m"}));
}

TEST_CASE("failure paths name the position, outermost first") {
  Fixture f;
  SubtypeResult r = f.sub("{a: {x: int}}", "{a: {x: int; y: int}}");
  CHECK(r.failure.path == std::vector<std::string>{"field a"});
  CHECK(r.failure.explanation == "The first record type has no field y");

  SubtypeResult g = f.sub("list (list {p: int})", "list (list {p: int; q: int})");
  CHECK(g.failure.path ==
        (std::vector<std::string>{"argument 1 of list", "argument 1 of list"}));
}

TEST_CASE("variable-headed applications relate arguments by the head's kind") {
  Fixture f;
  TyVarScope neg_head(f.ctx, "n", karrow(Variance::Contra, kstar(), kstar()));
  TyVarScope pos_head(f.ctx, "p", karrow(Variance::Cov, kstar(), kstar()));
  auto holds = [&](const std::string& s, const std::string& t) {
    return check_subtype(f.ctx, f.ty(s), f.ty(t)).ok;
  };
  CHECK(holds("'p {a: int; b: int}", "'p {a: int}"));
  CHECK_FALSE(holds("'p {a: int}", "'p {a: int; b: int}"));
  CHECK(holds("'n {a: int}", "'n {a: int; b: int}"));
  CHECK_FALSE(holds("'n {a: int; b: int}", "'n {a: int}"));

  SubtypeResult r = check_subtype(f.ctx, f.ty("'p {a: int}"), f.ty("'p {a: int; b: int}"));
  CHECK(r.failure.path == std::vector<std::string>{"argument 1 of 'p"});
  CHECK(r.failure.explanation == "The first record type has no field b");
  SubtypeResult rn = check_subtype(f.ctx, f.ty("'n {a: int; b: int}"), f.ty("'n {a: int}"));
  CHECK(rn.failure.explanation == "The second record type has no field b");
}

TEST_CASE("higher-kinded arguments must be identical") {
  Fixture f;
  TyVarScope head(f.ctx, "m",
                  karrow(Variance::Cov, karrow(Variance::Cov, kstar(), kstar()), kstar()));
  SubtypeResult ok = check_subtype(f.ctx, f.ty("'m list"), f.ty("'m list"));
  CHECK(ok.ok);
  SubtypeResult bad = check_subtype(f.ctx, f.ty("'m list"), f.ty("'m arr"));
  REQUIRE_FALSE(bad.ok);
  CHECK(bad.failure.reason == SubtypeReason::InvariantMismatch);
  CHECK(bad.failure.path == std::vector<std::string>{"argument 1 of 'm"});
}

TEST_CASE("aliases normalize away before comparison") {
  Fixture f;
  CHECK(f.holds("sub int int", "sub_neg int int"));
  CHECK(f.holds("sub_neg int int", "sub int int"));
  CHECK(type_equiv(f.ctx, f.ty("lzy int"), f.ty("ref (lazy_cell int)")));
}

TEST_CASE("derivation trees: success is all-ok, failure has an origin code") {
  Fixture f;
  SubtypeResult ok = f.sub("{x: int; y: {a: int; b: bool}} -> list {p: int; q: int}",
                           "{x: int; y: {a: int; b: bool}; z: int} -> list {p: int}");
  REQUIRE(ok.ok);
  CHECK(all_ok(ok.derivation));

  for (auto [s, t] : std::vector<std::pair<const char*, const char*>>{
           {"{x: int}", "{m: int}"},
           {"ref {a: int}", "ref {}"},
           {"int", "bool"},
           {"all 'a::*. {m: int}", "all 'b::*. {m: bool}"},
           {"list {x: int}", "list {x: bool}"}}) {
    SubtypeResult r = f.sub(s, t);
    REQUIRE_FALSE(r.ok);
    CHECK_FALSE(r.derivation.ok);
    CHECK(has_fail_origin(r.derivation));
    CHECK_FALSE(r.failure.explanation.empty());
  }
}

TEST_CASE("randomized order properties over structural types") {
  Fixture f;
  std::mt19937 rng(424242u);
  SubtypeChecker engine(f.ctx);
  int strict_pairs = 0;
  int checked = 0;
  for (int i = 0; i < 1200; ++i) {
    TypePtr t = testutil::random_type(rng, 5);
    ++checked;

    // Reflexivity.
    CHECK(engine.holds(t, t));

    // Guaranteed chains: narrow(t) <= t <= widen(t) <= widen(widen(t)).
    TypePtr lo = testutil::narrow_type(rng, t, 5);
    TypePtr hi = testutil::widen_type(rng, t, 5);
    TypePtr hi2 = testutil::widen_type(rng, hi, 5);
    CHECK(engine.holds(lo, t));
    CHECK(engine.holds(t, hi));
    CHECK(engine.holds(hi, hi2));
    // Transitivity along the chain endpoints.
    CHECK(engine.holds(lo, hi));
    CHECK(engine.holds(lo, hi2));
    CHECK(engine.holds(t, hi2));

    // Antisymmetry up to equivalence: if the widened type also flows back,
    // the two are equivalent; otherwise the pair is strictly ordered.
    if (engine.holds(hi, t)) {
      CHECK(engine.equiv(t, hi));
    } else {
      ++strict_pairs;
    }

    // Reference cells accept only equivalent contents, in both directions.
    TypePtr rt = t_ref(t);
    TypePtr rhi = t_ref(hi);
    CHECK(engine.holds(rt, rt));
    bool cells_equiv = engine.equiv(t, hi);
    CHECK(engine.holds(rt, rhi) == cells_equiv);
    CHECK(engine.holds(rhi, rt) == cells_equiv);
  }
  CHECK(checked == 1200);
  // The mutators must have produced a healthy share of strict inclusions.
  CHECK(strict_pairs >= 100);
}

TEST_CASE("random failing pairs still produce an origin and explanation") {
  Fixture f;
  std::mt19937 rng(99u);
  SubtypeChecker engine(f.ctx);
  int failures = 0;
  for (int i = 0; i < 400 && failures < 120; ++i) {
    TypePtr a = testutil::random_type(rng, 4);
    TypePtr b = testutil::random_type(rng, 4);
    SubtypeResult r = engine.check(a, b);
    if (r.ok) continue;
    ++failures;
    CHECK(has_fail_origin(r.derivation));
    CHECK_FALSE(r.failure.explanation.empty());
  }
  CHECK(failures >= 120);
}
