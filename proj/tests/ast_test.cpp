// Core representation tests: the variance lattice and its composition
// algebra, capture-avoiding substitution (single and simultaneous), and
// normalization of alias applications.

#include <catch2/catch_amalgamated.hpp>

#include "subwit/ast.hpp"
#include "subwit/norm.hpp"
#include "subwit/kinds.hpp"
#include "subwit/pretty.hpp"

#include "testutil.hpp"

using namespace subwit;

namespace {

const Variance kAll[] = {Variance::Unused, Variance::Cov, Variance::Contra, Variance::Inv};

std::string show(const TypePtr& t) { return type_to_string(t); }

} // namespace

TEST_CASE("variance composition matches the full 16-entry table") {
  const Variance U = Variance::Unused, C = Variance::Cov, N = Variance::Contra, I = Variance::Inv;
  // compose(position, occurrence); rows are positions U, C, N, I.
  const Variance want[4][4] = {
      /* U */ {U, U, U, U},
      /* C */ {U, C, N, I},
      /* N */ {U, N, C, I},
      /* I */ {U, I, I, I},
  };
  for (int p = 0; p < 4; ++p)
    for (int o = 0; o < 4; ++o) {
      INFO("compose(" << variance_name(kAll[p]) << ", " << variance_name(kAll[o]) << ")");
      CHECK(compose(kAll[p], kAll[o]) == want[p][o]);
    }
}

TEST_CASE("variance negation is an involution fixing unused and invariant") {
  for (Variance v : kAll) CHECK(neg(neg(v)) == v);
  CHECK(neg(Variance::Cov) == Variance::Contra);
  CHECK(neg(Variance::Contra) == Variance::Cov);
  CHECK(neg(Variance::Unused) == Variance::Unused);
  CHECK(neg(Variance::Inv) == Variance::Inv);
}

TEST_CASE("variance join is a lattice with bottom unused and top invariant") {
  for (Variance a : kAll) {
    CHECK(join(a, a) == a);                      // idempotent
    CHECK(join(Variance::Unused, a) == a);       // bottom
    CHECK(join(Variance::Inv, a) == Variance::Inv); // top
    for (Variance b : kAll) {
      CHECK(join(a, b) == join(b, a)); // commutative
      for (Variance c : kAll) CHECK(join(join(a, b), c) == join(a, join(b, c))); // associative
      CHECK(variance_leq(a, join(a, b)));
    }
  }
  CHECK(join(Variance::Cov, Variance::Contra) == Variance::Inv);
}

TEST_CASE("composition distributes negation and respects the lattice order") {
  for (Variance p : kAll)
    for (Variance o : kAll) {
      CHECK(compose(neg(p), o) == neg(compose(p, o)));
      // Monotone in the occurrence argument.
      for (Variance o2 : kAll)
        if (variance_leq(o, o2)) CHECK(variance_leq(compose(p, o), compose(p, o2)));
    }
}

TEST_CASE("substitution replaces free occurrences and respects binders") {
  TypePtr body = t_arrow(t_var("a"), t_forall("a", kstar(), t_var("a")));
  TypePtr out = subst_type(body, "a", t_int());
  CHECK(show(out) == "int -> all 'a::*. 'a");
}

TEST_CASE("substitution avoids capturing the replacement's free variables") {
  // (all 'b::*. 'a -> 'b)['a := 'b]  must rename the binder, not capture.
  TypePtr body = t_forall("b", kstar(), t_arrow(t_var("a"), t_var("b")));
  TypePtr out = subst_type(body, "a", t_var("b"));
  std::set<std::string> fv = free_type_vars(out);
  CHECK(fv.count("b") == 1);
  const TForall* f = std::get_if<TForall>(&out->node);
  REQUIRE(f != nullptr);
  CHECK(f->var != "b"); // binder renamed away from the replacement
  const TArrow* arr = std::get_if<TArrow>(&f->body->node);
  REQUIRE(arr != nullptr);
  CHECK(show(arr->dom) == "'b");
  CHECK(show(arr->cod) == "'" + f->var);
}

TEST_CASE("simultaneous substitution is parallel, not sequential") {
  // {fst: 'a; snd: 'b} ['a := 'b, 'b := 'c]  must give {fst: 'b; snd: 'c};
  // a sequential left-to-right pass would produce {fst: 'c; snd: 'c}.
  TypePtr body = t_record({{"fst", t_var("a")}, {"snd", t_var("b")}});
  TypePtr out = subst_type_many(body, {{"a", t_var("b")}, {"b", t_var("c")}});
  CHECK(show(out) == "{fst: 'b; snd: 'c}");

  // Swap: ['a := 'b, 'b := 'a].
  TypePtr swapped = subst_type_many(body, {{"a", t_var("b")}, {"b", t_var("a")}});
  CHECK(show(swapped) == "{fst: 'b; snd: 'a}");
}

TEST_CASE("alias normalization instantiates all parameters at once") {
  // type ('a-,'b+) w = {from: 'a; to: 'b}   then   w 'b 'c
  // (the regression that made transitivity untypable when substituted
  // one parameter at a time).
  KindingContext ctx;
  ctx.add_alias(AliasInfo{"w",
                          {{"a", Variance::Contra}, {"b", Variance::Cov}},
                          t_record({{"from", t_var("a")}, {"to", t_var("b")}})});
  ctx.push_tyvar("b", kstar());
  ctx.push_tyvar("c", kstar());
  TypePtr use = t_named("w", {t_var("b"), t_var("c")});
  CHECK(show(normalize_type(ctx, use)) == "{from: 'b; to: 'c}");
}

TEST_CASE("partially applied aliases normalize to type-level functions") {
  KindingContext ctx;
  ctx.add_alias(AliasInfo{"pairof",
                          {{"a", Variance::Cov}, {"b", Variance::Cov}},
                          t_record({{"fst", t_var("a")}, {"snd", t_var("b")}})});
  TypePtr partial = t_named("pairof", {t_int()});
  TypePtr norm = normalize_type(ctx, partial);
  const TLam* lam = std::get_if<TLam>(&norm->node);
  REQUIRE(lam != nullptr);
  // Applying the residual function completes the instantiation.
  TypePtr done = normalize_type(ctx, t_app(norm, t_bool()));
  CHECK(show(done) == "{fst: int; snd: bool}");
}

TEST_CASE("zero-parameter aliases normalize to their bodies") {
  KindingContext ctx;
  ctx.add_alias(AliasInfo{"t0", {}, t_arrow(t_int(), t_int())});
  CHECK(show(normalize_type(ctx, t_named("t0"))) == "int -> int");
}

TEST_CASE("over-applied alias heads beta-reduce") {
  // type idc = \'x+::*. 'x   then   idc int
  KindingContext ctx;
  ctx.add_alias(AliasInfo{"idc", {}, t_lam("x", Variance::Cov, kstar(), t_var("x"))});
  CHECK(show(normalize_type(ctx, t_named("idc", {t_int()}))) == "int");
}

TEST_CASE("free variable collection sees through binders") {
  TypePtr t = t_forall("a", kstar(), t_arrow(t_var("a"), t_var("b")));
  std::set<std::string> fv = free_type_vars(t);
  CHECK(fv == std::set<std::string>{"b"});
}

TEST_CASE("fresh names avoid every requested name") {
  std::set<std::string> avoid = {"x", "x1", "x2"};
  std::string f = fresh_type_var("x", avoid);
  CHECK(avoid.count(f) == 0);
}

TEST_CASE("normalization is idempotent on random structural types") {
  std::mt19937 rng(20260819u);
  KindingContext ctx;
  for (int i = 0; i < 200; ++i) {
    TypePtr t = testutil::random_type(rng, 4);
    TypePtr n1 = normalize_type(ctx, t);
    TypePtr n2 = normalize_type(ctx, n1);
    CHECK(show(n1) == show(n2));
  }
}
