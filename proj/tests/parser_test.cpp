// Surface syntax tests: construct coverage, span reporting, comment
// nesting, the statement/sequence ambiguity, and print/reparse round trips
// over both hand-written programs and the entire shipped corpus.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "subwit/parser.hpp"
#include "subwit/pretty.hpp"

#include "testutil.hpp"

using namespace subwit;

namespace {

std::string reprint(const std::string& src) {
  return program_to_string(parse_program(src, "<test>"));
}

// A program's printed form must parse back to the same printed form.
void check_round_trip(const std::string& src, const std::string& label) {
  INFO(label);
  std::string once = reprint(src);
  std::string twice = reprint(once);
  CHECK(once == twice);
}

} // namespace

TEST_CASE("declarations parse: aliases, data types, bindings") {
  Prog p = parse_program(
      "type ('a-,'b+) w = 'a -> 'b ;\n"
      "type color = | Red | Green | Blue ;\n"
      "type ('a+) box = | Box of 'a ;\n"
      "let f : int -> int = fun (x: int) -> x ;\n"
      "let rec g : int -> int = fun (x: int) -> g x ;\n",
      "<test>");
  REQUIRE(p.decls.size() == 5);
  const AliasDecl* al = std::get_if<AliasDecl>(&p.decls[0].node);
  REQUIRE(al != nullptr);
  REQUIRE(al->params.size() == 2);
  CHECK(al->params[0].variance == Variance::Contra);
  CHECK(al->params[1].variance == Variance::Cov);
  const AdtDecl* color = std::get_if<AdtDecl>(&p.decls[1].node);
  REQUIRE(color != nullptr);
  CHECK(color->ctors.size() == 3);
  CHECK(color->ctors[0].arg == nullptr);
  const AdtDecl* box = std::get_if<AdtDecl>(&p.decls[2].node);
  REQUIRE(box != nullptr);
  REQUIRE(box->ctors.size() == 1);
  CHECK(box->ctors[0].arg != nullptr);
  const TermDecl* f = std::get_if<TermDecl>(&p.decls[3].node);
  REQUIRE(f != nullptr);
  CHECK_FALSE(f->is_rec);
  const TermDecl* g = std::get_if<TermDecl>(&p.decls[4].node);
  REQUIRE(g != nullptr);
  CHECK(g->is_rec);
}

TEST_CASE("type syntax: quantifiers, type functions, applications, refs") {
  Prog p = parse_program(
      "type t1 = all 'a::*. 'a -> 'a ;\n"
      "type t2 = exists 'x::*. {v: 'x} ;\n"
      "type t3 = \\'n-::(- * -> *). 'n int ;\n"
      "type t4 = ref int ;\n"
      "type t5 = int ref ;\n"
      "type t6 = all 'n::(- * -> (+ * -> *)). int ;\n",
      "<test>");
  REQUIRE(p.decls.size() == 6);
  auto body = [&](int i) { return std::get_if<AliasDecl>(&p.decls[(size_t)i].node)->body; };
  CHECK(std::holds_alternative<TForall>(body(0)->node));
  CHECK(std::holds_alternative<TExists>(body(1)->node));
  const TLam* lam = std::get_if<TLam>(&body(2)->node);
  REQUIRE(lam != nullptr);
  CHECK(lam->v == Variance::Contra);
  // Prefix and postfix reference syntax agree.
  CHECK(type_to_string(body(3)) == type_to_string(body(4)));
  const TForall* hk = std::get_if<TForall>(&body(5)->node);
  REQUIRE(hk != nullptr);
  CHECK(kind_to_string(hk->kind) == "(- * -> (+ * -> *))");
}

TEST_CASE("arrows are right-associative and application binds tighter") {
  Prog p = parse_program("type t = int -> int -> int ;", "<test>");
  const TArrow* a = std::get_if<TArrow>(&std::get_if<AliasDecl>(&p.decls[0].node)->body->node);
  REQUIRE(a != nullptr);
  CHECK(std::holds_alternative<TBase>(a->dom->node));
  CHECK(std::holds_alternative<TArrow>(a->cod->node));
}

TEST_CASE("term syntax: the full construct inventory parses") {
  const char* src =
      "type opt = | None | Some of int ;\n"
      "let demo : unit =\n"
      "  let r : ref int = ref 1 in\n"
      "  let f : int -> int = fun (x: int) -> x in\n"
      "  let p : all 'a::*. 'a -> 'a = Fun 'a::* -> fun (x: 'a) -> x in\n"
      "  let i : int = p [int] 2 in\n"
      "  let rec loop : opt -> int = fun (o: opt) ->\n"
      "    match o with | None -> 0 | Some n -> n in\n"
      "  let rec2 : {m: int} = {m = 3} in\n"
      "  let proj : int = rec2.m in\n"
      "  let e : exn = exn_of_string \"x\" in\n"
      "  let t : int = try raise [int] e with ex -> 9 in\n"
      "  let c : {m: int} = ({m = 4; n = 5} :> {m: int}) in\n"
      "  (r := add !r 1; ()) ;\n";
  check_round_trip(src, "construct inventory");
}

TEST_CASE("pack and unpack round-trip") {
  check_round_trip(
      "type pkg = exists 't::*. {v: 't; s: 't -> int} ;\n"
      "let p : pkg = pack [int, {v = 1; s = fun (x: int) -> x}] as pkg ;\n"
      "let u : int = unpack p as ('t, r) in r.s r.v ;\n",
      "pack/unpack");
}

TEST_CASE("comments nest and stray terminators are errors") {
  Prog p = parse_program("(* a (* nested *) b *) type t = int ;", "<test>");
  CHECK(p.decls.size() == 1);
  CHECK_THROWS_AS(parse_program("(* never closed", "<t>"), ParseError);
}

TEST_CASE("sequences inside parentheses vs declaration separators") {
  // The ';' inside the parens builds a sequence; the final ';' ends the decl.
  Prog p = parse_program("let m : unit = (print \"a\"; print \"b\") ;", "<test>");
  const TermDecl* m = std::get_if<TermDecl>(&p.decls[0].node);
  REQUIRE(m != nullptr);
  CHECK(std::holds_alternative<ESeq>(m->body->node));
}

TEST_CASE("a lambda in a non-final record field must be parenthesized") {
  // Unparenthesized, the lambda body swallows the rest of the record as a
  // sequence, so the record ends up with a single field.
  Prog p = parse_program(
      "let r : {f: int -> unit; g: int} = {f = (fun (x: int) -> ()); g = 1} ;", "<test>");
  const ERecord* rec =
      std::get_if<ERecord>(&std::get_if<TermDecl>(&p.decls[0].node)->body->node);
  REQUIRE(rec != nullptr);
  CHECK(rec->fields.size() == 2);
}

TEST_CASE("parse errors carry the failing position") {
  try {
    parse_program("type t =\n  | Bad of ;\n", "probe.swl");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.diag().code == DiagCode::ParseError);
    CHECK(e.diag().span.file == "probe.swl");
    CHECK(e.diag().span.begin.line == 2);
  }
}

TEST_CASE("variance markers are required on declaration parameters") {
  CHECK_THROWS_AS(parse_program("type ('a) bad = 'a ;", "<t>"), ParseError);
}

TEST_CASE("every shipped corpus file print/reparses to a fixed point") {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const char* sub : {"prelude", "examples", "neg_tests"}) {
    for (const auto& ent : fs::directory_iterator(testutil::corpus_dir() + "/" + sub)) {
      if (ent.path().extension() != ".swl") continue;
      ++seen;
      std::string src = read_file(ent.path().string());
      check_round_trip(src, ent.path().filename().string());
    }
  }
  CHECK(seen >= 50);
}

TEST_CASE("random closed types print/reparse to a fixed point") {
  std::mt19937 rng(7u);
  for (int i = 0; i < 300; ++i) {
    TypePtr t = testutil::random_type(rng, 4);
    std::string printed = "type probe = " + type_to_string(t) + " ;";
    INFO(printed);
    Prog p = parse_program(printed, "<rt>");
    const AliasDecl* al = std::get_if<AliasDecl>(&p.decls.at(0).node);
    REQUIRE(al != nullptr);
    CHECK(type_to_string(al->body) == type_to_string(t));
  }
}
