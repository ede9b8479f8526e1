#pragma once

// Shared helpers for the test suites: corpus location, pipeline shortcuts,
// and seeded random generation of types and of subtype-related pairs.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "subwit/corpus.hpp"
#include "subwit/eval.hpp"
#include "subwit/parser.hpp"
#include "subwit/prelude.hpp"
#include "subwit/subtype.hpp"
#include "subwit/typecheck.hpp"

namespace testutil {

using namespace subwit;

inline std::string corpus_dir() { return SUBWIT_DEFAULT_CORPUS_DIR; }

// Parses source text as a program (file name only labels spans).
inline Prog parse(const std::string& src, const std::string& file = "<test>") {
  return parse_program(src, file);
}

// A typing context already holding the builtins and the checked prelude.
inline TypingContext prelude_context() {
  TypingContext ctx = make_typing_context();
  std::vector<PreludeFile> files = load_prelude(corpus_dir());
  check_prelude_into(ctx, files);
  return ctx;
}

// Typechecks source against the full prelude; throws CompileError on failure.
inline void check_with_prelude(const std::string& src, const std::string& file = "<test>") {
  TypingContext ctx = prelude_context();
  Prog prog = parse(src, file);
  TypeChecker tc(ctx);
  tc.check_program(prog);
}

struct RunResult {
  std::string transcript;
  ProgramOutcome outcome;
};

// Typechecks and evaluates prelude + source, returning the transcript and
// outcome.  The evaluator must outlive value inspection, so it is passed in.
inline RunResult run_with_prelude(Evaluator& ev, const std::string& src,
                                  const std::string& file = "<test>") {
  std::vector<PreludeFile> files = load_prelude(corpus_dir());
  TypingContext ctx = make_typing_context();
  check_prelude_into(ctx, files);
  Prog prog = parse(src, file);
  TypeChecker tc(ctx);
  tc.check_program(prog);
  Prog whole = prelude_decls(files);
  for (const Decl& d : prog.decls) whole.decls.push_back(d);
  RunResult r;
  run_with_big_stack([&] { r.outcome = ev.eval_program(whole); });
  r.transcript = ev.transcript();
  return r;
}

// Looks a name up in a final top-level environment.
inline const Value* env_lookup(const EnvNode* env, const std::string& name) {
  for (const EnvNode* e = env; e != nullptr; e = e->next)
    if (e->name == name) return e->value;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Random structural types (depth-bounded; well formed in an empty context
// except for the quantified variables they bind themselves).

inline TypePtr random_type(std::mt19937& rng, int depth, std::vector<std::string> vars = {}) {
  auto pick = [&](int n) { return (int)(rng() % (unsigned)n); };
  if (depth <= 0) {
    if (!vars.empty() && pick(3) == 0) return t_var(vars[(size_t)pick((int)vars.size())]);
    switch (pick(4)) {
      case 0: return t_int();
      case 1: return t_bool();
      case 2: return t_string();
      default: return t_unit();
    }
  }
  switch (pick(7)) {
    case 0:
      if (!vars.empty()) return t_var(vars[(size_t)pick((int)vars.size())]);
      return t_int();
    case 1: {
      static const char* labels[] = {"a", "b", "c"};
      std::vector<TField> fs;
      int n = pick(4);
      for (int i = 0; i < n; ++i) fs.push_back({labels[i], random_type(rng, depth - 1, vars)});
      return t_record(std::move(fs));
    }
    case 2:
      return t_arrow(random_type(rng, depth - 1, vars), random_type(rng, depth - 1, vars));
    case 3:
      return t_ref(random_type(rng, depth - 1, vars));
    case 4: {
      std::string v = "q" + std::to_string(vars.size());
      vars.push_back(v);
      return t_forall(v, kstar(), random_type(rng, depth - 1, vars));
    }
    case 5:
      return t_bool();
    default:
      return t_int();
  }
}

// ---------------------------------------------------------------------------
// Guaranteed-related mutation: widen(t) yields a supertype of t, narrow(t) a
// subtype, by construction of the structural rules (records forget fields and
// widen fieldwise; arrows narrow domains and widen codomains; refs, bases and
// variables stay fixed; quantifiers act on their bodies).

inline TypePtr widen_type(std::mt19937& rng, const TypePtr& t, int fuel);
inline TypePtr narrow_type(std::mt19937& rng, const TypePtr& t, int fuel);

inline TypePtr widen_type(std::mt19937& rng, const TypePtr& t, int fuel) {
  if (fuel <= 0) return t;
  auto pick = [&](int n) { return (int)(rng() % (unsigned)n); };
  return std::visit(
      [&](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TRecord>) {
          std::vector<TField> fs;
          for (const TField& f : n.fields) {
            if (!n.fields.empty() && pick(3) == 0) continue; // forget a field
            fs.push_back({f.label, widen_type(rng, f.type, fuel - 1)});
          }
          return t_record(std::move(fs));
        } else if constexpr (std::is_same_v<T, TArrow>) {
          return t_arrow(narrow_type(rng, n.dom, fuel - 1), widen_type(rng, n.cod, fuel - 1));
        } else if constexpr (std::is_same_v<T, TForall>) {
          return t_forall(n.var, n.kind, widen_type(rng, n.body, fuel - 1));
        } else if constexpr (std::is_same_v<T, TExists>) {
          return t_exists(n.var, n.kind, widen_type(rng, n.body, fuel - 1));
        } else {
          return t; // bases, vars, refs (invariant), applications
        }
      },
      t->node);
}

inline TypePtr narrow_type(std::mt19937& rng, const TypePtr& t, int fuel) {
  if (fuel <= 0) return t;
  auto pick = [&](int n) { return (int)(rng() % (unsigned)n); };
  return std::visit(
      [&](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TRecord>) {
          std::vector<TField> fs;
          for (const TField& f : n.fields) fs.push_back({f.label, narrow_type(rng, f.type, fuel - 1)});
          if (pick(3) == 0) fs.push_back({"z" + std::to_string(pick(5)), t_int()});
          // Duplicate labels would be ill-formed; keep only first occurrences.
          std::vector<TField> dedup;
          for (const TField& f : fs) {
            bool seen = false;
            for (const TField& g : dedup)
              if (g.label == f.label) seen = true;
            if (!seen) dedup.push_back(f);
          }
          return t_record(std::move(dedup));
        } else if constexpr (std::is_same_v<T, TArrow>) {
          return t_arrow(widen_type(rng, n.dom, fuel - 1), narrow_type(rng, n.cod, fuel - 1));
        } else if constexpr (std::is_same_v<T, TForall>) {
          return t_forall(n.var, n.kind, narrow_type(rng, n.body, fuel - 1));
        } else if constexpr (std::is_same_v<T, TExists>) {
          return t_exists(n.var, n.kind, narrow_type(rng, n.body, fuel - 1));
        } else {
          return t;
        }
      },
      t->node);
}

} // namespace testutil
