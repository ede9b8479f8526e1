// Kind checking and variance analysis: kinds of every type form, curried
// constructor kinds with declared variances, occurrence-variance paths,
// declaration marker enforcement with frozen diagnostics, and randomized
// monotonicity of the occurrence analysis.

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "subwit/kinds.hpp"
#include "subwit/parser.hpp"
#include "subwit/pretty.hpp"
#include "subwit/typecheck.hpp"

#include "testutil.hpp"

using namespace subwit;

namespace {

TypePtr pt(const std::string& s) {
  Prog p = parse_program("type probe = " + s + " ;", "<kinds>");
  return std::get_if<AliasDecl>(&p.decls.at(0).node)->body;
}

struct Fixture {
  TypingContext tc = testutil::prelude_context();
  KindingContext& ctx = tc.kinds();

  std::string kind_str(const std::string& ty) { return kind_to_string(kind_of(ctx, pt(ty))); }
};

} // namespace

TEST_CASE("kinds of the ground forms are *") {
  Fixture f;
  for (const char* t : {"int", "bool", "string", "unit", "exn", "int -> bool", "{x: int; y: bool}",
                        "ref int", "int ref", "all 'a::*. 'a -> 'a", "exists 'a::*. {v: 'a}"})
    CHECK(f.kind_str(t) == "*");
}

TEST_CASE("named constructors have curried kinds with the declared variances") {
  Fixture f;
  // Aliases may be mentioned bare or partially applied.
  CHECK(f.kind_str("sub") == "(- * -> (+ * -> *))");
  CHECK(f.kind_str("sub int") == "(+ * -> *)");
  CHECK(f.kind_str("sub int bool") == "*");
  CHECK(f.kind_str("lzy") == "(! * -> *)");
  // Data types must be fully applied.
  CHECK(f.kind_str("list int") == "*");
  CHECK_THROWS_AS(f.kind_str("list"), KindError);
  CHECK_THROWS_AS(f.kind_str("list int int"), KindError);
}

TEST_CASE("type lambdas: inferred vs marked binder variance") {
  Fixture f;
  CHECK(f.kind_str("\\'a+::*. {v: 'a}") == "(+ * -> *)");
  CHECK(f.kind_str("\\'a-::*. 'a -> int") == "(- * -> *)");
  CHECK(f.kind_str("\\'a!::*. ref 'a") == "(! * -> *)");
  // A binder that never occurs may carry any marker.
  CHECK(f.kind_str("\\'a-::*. int") == "(- * -> *)");
  // Marker must dominate the occurrence variance.
  CHECK_THROWS_AS(f.kind_str("\\'a+::*. 'a -> int"), VarianceError);
  CHECK_THROWS_AS(f.kind_str("\\'a+::*. ref 'a"), VarianceError);
  CHECK_THROWS_AS(f.kind_str("\\'a-::*. {v: 'a}"), VarianceError);
}

TEST_CASE("kind errors: unbound variables, argument kinds, over-application") {
  Fixture f;
  CHECK_THROWS_AS(f.kind_str("'nowhere"), KindError);
  CHECK_THROWS_AS(f.kind_str("sub list int"), KindError);     // arg not of kind *
  CHECK_THROWS_AS(f.kind_str("sub int bool int"), KindError); // too many args
  CHECK_THROWS_AS(f.kind_str("(\\'a+::*. 'a) int int"), KindError);
  CHECK_THROWS_AS(f.kind_str("ref list"), KindError);
  CHECK_THROWS_AS(f.kind_str("{bad: sub}"), KindError);
  CHECK_THROWS_AS(f.kind_str("sub -> int"), KindError);
  CHECK_THROWS_AS(f.kind_str("all 'n::(- * -> *). 'n"), KindError); // body not *
}

TEST_CASE("occurrence variance follows position paths") {
  Fixture f;
  auto v = [&](const std::string& ty) {
    TyVarScope scope(f.ctx, "a", kstar());
    return variance_of(f.ctx, pt(ty), "a");
  };
  CHECK(v("'a") == Variance::Cov);
  CHECK(v("int") == Variance::Unused);
  CHECK(v("'a -> int") == Variance::Contra);
  CHECK(v("int -> 'a") == Variance::Cov);
  CHECK(v("('a -> int) -> int") == Variance::Cov);
  CHECK(v("{x: 'a; y: int}") == Variance::Cov);
  CHECK(v("ref 'a") == Variance::Inv);
  CHECK(v("ref int") == Variance::Unused);
  CHECK(v("('a -> int) -> 'a") == Variance::Cov);
  CHECK(v("'a -> 'a") == Variance::Inv);
  CHECK(v("all 'b::*. 'a") == Variance::Cov);
  CHECK(v("all 'a::*. 'a") == Variance::Unused); // shadowed
  CHECK(v("exists 'b::*. 'b -> 'a") == Variance::Cov);
}

TEST_CASE("occurrence variance composes with declared parameter variances") {
  Fixture f;
  auto v = [&](const std::string& ty) {
    TyVarScope scope(f.ctx, "a", kstar());
    return variance_of(f.ctx, pt(ty), "a");
  };
  CHECK(v("list 'a") == Variance::Cov);
  CHECK(v("list 'a -> int") == Variance::Contra);
  CHECK(v("sub 'a int") == Variance::Contra);
  CHECK(v("sub int 'a") == Variance::Cov);
  CHECK(v("sub 'a 'a") == Variance::Inv);
  CHECK(v("lzy 'a") == Variance::Inv);
  CHECK(v("sub (sub 'a int) int") == Variance::Cov); // two flips
}

TEST_CASE("a variable in constructor position is invariant") {
  Fixture f;
  TyVarScope n(f.ctx, "n", karrow(Variance::Contra, kstar(), kstar()));
  TyVarScope a(f.ctx, "a", kstar());
  CHECK(variance_of(f.ctx, pt("'n int"), "n") == Variance::Inv);
  // ... while an argument under it composes with the parameter's variance.
  CHECK(variance_of(f.ctx, pt("'n 'a"), "a") == Variance::Contra);
  CHECK(variance_of(f.ctx, pt("'n ('n 'a)"), "a") == Variance::Cov);
}

TEST_CASE("declaration markers are enforced, with the frozen wording") {
  auto message_of = [](const std::string& src) -> std::pair<DiagCode, std::string> {
    try {
      testutil::check_with_prelude(src);
      return {DiagCode::ParseError, "<no error>"};
    } catch (const CompileError& e) {
      return {e.diag().code, e.diag().message};
    }
  };

  auto [c1, m1] = message_of("type ('a+) bad_ref = ref 'a ;");
  CHECK(c1 == DiagCode::VarianceError);
  CHECK(m1 ==
        "type parameter 'a of bad_ref is declared covariant but occurs invariantly in its definition");

  auto [c2, m2] = message_of("type ('a+) sink = | Mk of 'a -> unit ;");
  CHECK(c2 == DiagCode::VarianceError);
  CHECK(m2 ==
        "type parameter 'a of sink is declared covariant but occurs contravariantly in its definition");

  auto [c3, m3] = message_of("type ('a-) src = | Mk of {v: 'a} ;");
  CHECK(c3 == DiagCode::VarianceError);
  CHECK(m3 ==
        "type parameter 'a of src is declared contravariant but occurs covariantly in its definition");

  // Correct markers (and stronger-than-needed markers) pass.
  CHECK_NOTHROW(testutil::check_with_prelude("type ('a!) cell = ref 'a ;"));
  CHECK_NOTHROW(testutil::check_with_prelude("type ('a!) loose = {v: 'a} ;"));
  CHECK_NOTHROW(testutil::check_with_prelude("type ('a+) unused_ok = int ;"));
}

TEST_CASE("recursive data types assume the declared variance for self-references") {
  CHECK_NOTHROW(testutil::check_with_prelude(
      "type ('a+) tree = | Leaf | Node of {v: 'a; l: tree 'a; r: tree 'a} ;"));
  CHECK_THROWS_AS(
      testutil::check_with_prelude("type ('a+) odd = | Wrap of odd 'a -> unit ;"),
      CompileError);
}

TEST_CASE("wrapping a type moves occurrence variance as the lattice predicts") {
  Fixture f;
  std::mt19937 rng(20260819u);
  TyVarScope scope(f.ctx, "p", kstar());
  for (int i = 0; i < 500; ++i) {
    TypePtr t = testutil::random_type(rng, 4, {"p"});
    Variance v = variance_of(f.ctx, t, "p");

    // Adding a covariant occurrence joins the old answer with covariance,
    // so the result can only move up the lattice.
    TypePtr ext = t_record({{"orig", t}, {"extra", t_var("p")}});
    Variance v_ext = variance_of(f.ctx, ext, "p");
    CHECK(v_ext == join(v, Variance::Cov));
    CHECK(variance_leq(v, v_ext));

    // Position wrappers compose exactly.
    CHECK(variance_of(f.ctx, t_arrow(t, t_int()), "p") == neg(v));
    CHECK(variance_of(f.ctx, t_ref(t), "p") ==
          (v == Variance::Unused ? Variance::Unused : Variance::Inv));
    CHECK(variance_of(f.ctx, t_record({{"only", t}}), "p") == v);
  }
}
