#pragma once

// Structural subtype engine.
//
// Assumes inputs are normalized (aliases expanded, redexes reduced) and
// well-kinded at kind * under the given context.  Rules:
//   - reflexivity up to alpha-equivalence;
//   - arrows: contravariant domain, covariant codomain;
//   - records: width (extra fields on the left) and depth (per-field, covariant);
//   - data types: heads must match; arguments relate per declared parameter variance;
//   - variable-headed applications: same head; arguments relate per the head's kind;
//   - ref: cell types must be equivalent (mutual subtypes);
//   - all/exists: identical binder kinds, bodies covariant under an extended scope.
//
// Every query builds a derivation tree (printable as an indented trace).  A
// failing query also produces a SubtypeFailure carrying a position path, a
// reason category, and a one-sentence explanation suitable for diagnostics.

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "subwit/ast.hpp"
#include "subwit/context.hpp"
#include "subwit/kinds.hpp"
#include "subwit/norm.hpp"
#include "subwit/pretty.hpp"

namespace subwit {

enum class SubtypeReason : uint8_t {
  MissingField,
  ArrowDomain,
  InvariantMismatch,
  HeadMismatch,
  KindMismatch,
};

inline const char* subtype_reason_name(SubtypeReason r) {
  switch (r) {
    case SubtypeReason::MissingField: return "missing-field";
    case SubtypeReason::ArrowDomain: return "arrow-domain";
    case SubtypeReason::InvariantMismatch: return "invariant-mismatch";
    case SubtypeReason::HeadMismatch: return "head-mismatch";
    case SubtypeReason::KindMismatch: return "kind-mismatch";
  }
  return "?";
}

struct SubtypeFailure {
  std::vector<std::string> path; // outermost position first
  SubtypeReason reason = SubtypeReason::HeadMismatch;
  std::string explanation; // one sentence; second line of the rendered error
};

struct SubtypeNode {
  bool ok = false;
  std::string rule;
  TypePtr s, t;
  std::string fail_code; // set on the node where a failure originates
  std::vector<SubtypeNode> children;
};

struct SubtypeResult {
  bool ok = false;
  SubtypeFailure failure;  // meaningful only when !ok
  SubtypeNode derivation;  // always present; failing branches included
};

namespace detail {

inline std::string shape_word(const TypePtr& t) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TVar>) return "a type variable";
        else if constexpr (std::is_same_v<T, TBase>) return "a base type";
        else if constexpr (std::is_same_v<T, TArrow>) return "an arrow type";
        else if constexpr (std::is_same_v<T, TRecord>) return "a record type";
        else if constexpr (std::is_same_v<T, TNamed>) return "a data type";
        else if constexpr (std::is_same_v<T, TRef>) return "a reference type";
        else if constexpr (std::is_same_v<T, TForall>) return "a universal type";
        else if constexpr (std::is_same_v<T, TExists>) return "an existential type";
        else if constexpr (std::is_same_v<T, TLam>) return "a type-level function";
        else return "a type application";
      },
      t->node);
}

inline std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = (char)std::toupper((unsigned char)s[0]);
  return s;
}

// Unfold an application spine: `(('h a) b) c` -> head 'h, args [a, b, c].
inline void app_spine(const TypePtr& t, TypePtr& head, std::vector<TypePtr>& args) {
  if (const TApp* a = std::get_if<TApp>(&t->node)) {
    app_spine(a->fn, head, args);
    args.push_back(a->arg);
  } else {
    head = t;
  }
}

} // namespace detail

class SubtypeChecker {
 public:
  explicit SubtypeChecker(KindingContext& ctx) : ctx_(ctx) {}

  // Both types must be normalized and well-kinded at * under the context.
  SubtypeResult check(const TypePtr& s, const TypePtr& t) {
    SubtypeResult r;
    std::optional<SubtypeFailure> fail;
    r.derivation = go(s, t, false, fail);
    r.ok = r.derivation.ok;
    if (!r.ok) r.failure = std::move(*fail);
    return r;
  }

  bool holds(const TypePtr& s, const TypePtr& t) { return check(s, t).ok; }

  bool equiv(const TypePtr& s, const TypePtr& t) { return holds(s, t) && holds(t, s); }

 private:
  using Fail = std::optional<SubtypeFailure>;

  static SubtypeNode leaf_ok(std::string rule, const TypePtr& s, const TypePtr& t) {
    return SubtypeNode{true, std::move(rule), s, t, "", {}};
  }

  SubtypeNode fail_here(std::string rule, const TypePtr& s, const TypePtr& t, SubtypeReason reason,
                        std::string explanation, Fail& fail, std::vector<SubtypeNode> children = {}) {
    SubtypeNode n{false, std::move(rule), s, t, subtype_reason_name(reason), std::move(children)};
    fail = SubtypeFailure{{}, reason, std::move(explanation)};
    return n;
  }

  static void push_path(Fail& fail, std::string segment) {
    if (fail) fail->path.insert(fail->path.begin(), std::move(segment));
  }

  SubtypeNode shape_mismatch(const TypePtr& s, const TypePtr& t, Fail& fail) {
    // Same-shape pairs with distinct heads get a sharper sentence.
    if (const TNamed* a = std::get_if<TNamed>(&s->node)) {
      if (const TNamed* b = std::get_if<TNamed>(&t->node)) {
        return fail_here("mismatch", s, t, SubtypeReason::HeadMismatch,
                         "The type constructor " + a->name + " does not match " + b->name, fail);
      }
    }
    if (const TBase* a = std::get_if<TBase>(&s->node)) {
      if (const TBase* b = std::get_if<TBase>(&t->node)) {
        return fail_here("mismatch", s, t, SubtypeReason::HeadMismatch,
                         std::string("The base type ") + base_type_name(a->base) + " does not match " +
                             base_type_name(b->base),
                         fail);
      }
    }
    if (const TVar* a = std::get_if<TVar>(&s->node)) {
      if (const TVar* b = std::get_if<TVar>(&t->node)) {
        return fail_here("mismatch", s, t, SubtypeReason::HeadMismatch,
                         "The type variable '" + a->name + " does not match '" + b->name, fail);
      }
    }
    return fail_here("mismatch", s, t, SubtypeReason::HeadMismatch,
                     detail::capitalized(detail::shape_word(s)) + " cannot match " + detail::shape_word(t),
                     fail);
  }

  // Relates one argument pair under a declared variance; used by both the
  // data-type rule and the variable-headed application rule.  `head` names
  // the constructor or variable for messages; `index` is 1-based.  On failure
  // `fail` is always set; `origin_code` is non-empty when the failure is
  // attributed to this argument position itself (invariance / higher kinds)
  // rather than to a deeper position inside a recursive check.
  bool relate_argument(const std::string& head, size_t index, Variance v, const KindPtr& param_kind,
                       const TypePtr& sa, const TypePtr& ta, bool flipped, Fail& fail,
                       std::vector<SubtypeNode>& children, std::string& origin_code) {
    std::string seg = "argument " + std::to_string(index) + " of " + head;
    if (!param_kind->is_star()) {
      // Subtyping is defined at kind * only: higher-kinded arguments must agree exactly.
      if (alpha_equal(sa, ta)) {
        children.push_back(leaf_ok("identical-argument", sa, ta));
        return true;
      }
      origin_code = subtype_reason_name(SubtypeReason::InvariantMismatch);
      fail = SubtypeFailure{{seg},
                            SubtypeReason::InvariantMismatch,
                            "The higher-kinded arguments " + type_to_string(sa) + " and " +
                                type_to_string(ta) + " are not identical"};
      children.push_back(SubtypeNode{false, "identical-argument", sa, ta, origin_code, {}});
      return false;
    }
    switch (v) {
      case Variance::Unused: {
        children.push_back(leaf_ok("unused-argument", sa, ta));
        return true;
      }
      case Variance::Cov:
      case Variance::Contra: {
        bool flip = v == Variance::Contra;
        Fail sub;
        SubtypeNode n = flip ? go(ta, sa, !flipped, sub) : go(sa, ta, flipped, sub);
        bool ok = n.ok;
        children.push_back(std::move(n));
        if (!ok) {
          push_path(sub, seg);
          fail = std::move(sub);
        }
        return ok;
      }
      case Variance::Inv: {
        Fail ignored;
        SubtypeNode fwd = go(sa, ta, flipped, ignored);
        bool ok = fwd.ok;
        children.push_back(std::move(fwd));
        if (ok) {
          ignored.reset();
          SubtypeNode bwd = go(ta, sa, !flipped, ignored);
          ok = bwd.ok;
          children.push_back(std::move(bwd));
        }
        if (!ok) {
          origin_code = subtype_reason_name(SubtypeReason::InvariantMismatch);
          fail = SubtypeFailure{{seg},
                                SubtypeReason::InvariantMismatch,
                                "Argument " + std::to_string(index) + " of " + head +
                                    " is invariant, but " + type_to_string(sa) + " and " +
                                    type_to_string(ta) + " are not equivalent"};
        }
        return ok;
      }
    }
    return false;
  }

  SubtypeNode go(const TypePtr& s, const TypePtr& t, bool flipped, Fail& fail) {
    if (alpha_equal(s, t)) return leaf_ok("refl", s, t);

    // Arrows: domain contravariant, codomain covariant.
    if (const TArrow* a = std::get_if<TArrow>(&s->node)) {
      if (const TArrow* b = std::get_if<TArrow>(&t->node)) {
        SubtypeNode n{false, "arrow", s, t, "", {}};
        Fail sub;
        SubtypeNode dom = go(b->dom, a->dom, !flipped, sub);
        bool ok = dom.ok;
        n.children.push_back(std::move(dom));
        if (!ok) {
          push_path(sub, "arrow-domain");
          fail = std::move(sub);
          return n;
        }
        SubtypeNode cod = go(a->cod, b->cod, flipped, sub);
        ok = cod.ok;
        n.children.push_back(std::move(cod));
        if (!ok) {
          push_path(sub, "arrow-codomain");
          fail = std::move(sub);
          return n;
        }
        n.ok = true;
        return n;
      }
      return shape_mismatch(s, t, fail);
    }

    // Records: width and depth.
    if (const TRecord* a = std::get_if<TRecord>(&s->node)) {
      if (const TRecord* b = std::get_if<TRecord>(&t->node)) {
        SubtypeNode n{false, "record", s, t, "", {}};
        for (const TField& want : b->fields) {
          const TField* have = nullptr;
          for (const TField& f : a->fields)
            if (f.label == want.label) {
              have = &f;
              break;
            }
          if (!have) {
            const char* side = flipped ? "second" : "first";
            n.fail_code = subtype_reason_name(SubtypeReason::MissingField);
            fail = SubtypeFailure{{},
                                  SubtypeReason::MissingField,
                                  std::string("The ") + side + " record type has no field " + want.label};
            return n;
          }
          Fail sub;
          SubtypeNode fieldn = go(have->type, want.type, flipped, sub);
          bool ok = fieldn.ok;
          n.children.push_back(std::move(fieldn));
          if (!ok) {
            push_path(sub, "field " + want.label);
            fail = std::move(sub);
            return n;
          }
        }
        n.ok = true;
        return n;
      }
      return shape_mismatch(s, t, fail);
    }

    // Data types: nominal heads, arguments per declared variance.
    if (const TNamed* a = std::get_if<TNamed>(&s->node)) {
      if (const TNamed* b = std::get_if<TNamed>(&t->node)) {
        if (a->name != b->name || a->args.size() != b->args.size()) return shape_mismatch(s, t, fail);
        const AdtInfo* info = ctx_.find_adt(a->name);
        if (!info) throw KindError(s->span, "unknown data type " + a->name);
        SubtypeNode n{false, "named " + a->name, s, t, "", {}};
        for (size_t i = 0; i < a->args.size(); ++i) {
          std::string origin;
          if (!relate_argument(a->name, i + 1, info->params[i].variance, kstar(), a->args[i],
                               b->args[i], flipped, fail, n.children, origin)) {
            n.fail_code = origin;
            return n;
          }
        }
        n.ok = true;
        return n;
      }
      return shape_mismatch(s, t, fail);
    }

    // Variable-headed applications: same head variable, arguments per its kind.
    if (std::holds_alternative<TApp>(s->node) || std::holds_alternative<TApp>(t->node)) {
      if (!std::holds_alternative<TApp>(s->node) || !std::holds_alternative<TApp>(t->node))
        return shape_mismatch(s, t, fail);
      TypePtr sh, th;
      std::vector<TypePtr> sargs, targs;
      detail::app_spine(s, sh, sargs);
      detail::app_spine(t, th, targs);
      const TVar* sv = std::get_if<TVar>(&sh->node);
      const TVar* tv = std::get_if<TVar>(&th->node);
      if (!sv || !tv) return shape_mismatch(s, t, fail); // normalized heads are variables
      if (sv->name != tv->name) {
        return fail_here("mismatch", s, t, SubtypeReason::HeadMismatch,
                         "The type variable '" + sv->name + " does not match '" + tv->name, fail);
      }
      if (sargs.size() != targs.size()) {
        return fail_here("apply '" + sv->name, s, t, SubtypeReason::HeadMismatch,
                         "The type applications have different argument counts", fail);
      }
      const KindPtr* k = ctx_.lookup_tyvar(sv->name);
      if (!k) throw KindError(s->span, "unbound type variable '" + sv->name);
      SubtypeNode n{false, "apply '" + sv->name, s, t, "", {}};
      KindPtr cur = *k;
      for (size_t i = 0; i < sargs.size(); ++i) {
        if (cur->is_star()) throw KindError(s->span, "over-applied type variable '" + sv->name);
        std::string origin;
        if (!relate_argument("'" + sv->name, i + 1, cur->v, cur->param, sargs[i], targs[i], flipped,
                             fail, n.children, origin)) {
          n.fail_code = origin;
          return n;
        }
        cur = cur->result;
      }
      n.ok = true;
      return n;
    }

    // Ref: invariant cell.
    if (const TRef* a = std::get_if<TRef>(&s->node)) {
      if (const TRef* b = std::get_if<TRef>(&t->node)) {
        SubtypeNode n{false, "ref", s, t, "", {}};
        Fail ignored;
        SubtypeNode fwd = go(a->cell, b->cell, flipped, ignored);
        bool ok = fwd.ok;
        n.children.push_back(std::move(fwd));
        if (ok) {
          ignored.reset();
          SubtypeNode bwd = go(b->cell, a->cell, !flipped, ignored);
          ok = bwd.ok;
          n.children.push_back(std::move(bwd));
        }
        if (!ok) {
          n.fail_code = subtype_reason_name(SubtypeReason::InvariantMismatch);
          fail = SubtypeFailure{{"ref"},
                                SubtypeReason::InvariantMismatch,
                                "The reference cell types " + type_to_string(a->cell) + " and " +
                                    type_to_string(b->cell) + " are not equivalent"};
          return n;
        }
        n.ok = true;
        return n;
      }
      return shape_mismatch(s, t, fail);
    }

    // Quantifiers: identical binder kinds, bodies covariant.
    if (std::holds_alternative<TForall>(s->node) && std::holds_alternative<TForall>(t->node)) {
      const TForall& a = std::get<TForall>(s->node);
      const TForall& b = std::get<TForall>(t->node);
      return quantifier_rule("all", a.var, a.kind, a.body, b.var, b.kind, b.body, s, t, flipped, fail);
    }
    if (std::holds_alternative<TExists>(s->node) && std::holds_alternative<TExists>(t->node)) {
      const TExists& a = std::get<TExists>(s->node);
      const TExists& b = std::get<TExists>(t->node);
      return quantifier_rule("exists", a.var, a.kind, a.body, b.var, b.kind, b.body, s, t, flipped,
                             fail);
    }

    return shape_mismatch(s, t, fail);
  }

  SubtypeNode quantifier_rule(const char* which, const std::string& av, const KindPtr& ak,
                              const TypePtr& abody, const std::string& bv, const KindPtr& bk,
                              const TypePtr& bbody, const TypePtr& s, const TypePtr& t, bool flipped,
                              Fail& fail) {
    if (!kind_equal(ak, bk)) {
      return fail_here(which, s, t, SubtypeReason::KindMismatch,
                       "The quantifier kinds " + kind_to_string(ak) + " and " + kind_to_string(bk) +
                           " are not identical",
                       fail);
    }
    // Pick one name for both binders, reusing an existing one when that
    // cannot capture a free variable of the other body.
    std::string common;
    TypePtr sb = abody, tb = bbody;
    if (av == bv) {
      common = av;
    } else if (!free_type_vars(bbody).count(av)) {
      common = av;
      tb = subst_type(bbody, bv, t_var(av, bbody->span));
    } else if (!free_type_vars(abody).count(bv)) {
      common = bv;
      sb = subst_type(abody, av, t_var(bv, abody->span));
    } else {
      std::set<std::string> avoid = free_type_vars(abody);
      for (const std::string& v : free_type_vars(bbody)) avoid.insert(v);
      common = fresh_type_var(av, avoid);
      sb = subst_type(abody, av, t_var(common, abody->span));
      tb = subst_type(bbody, bv, t_var(common, bbody->span));
    }
    SubtypeNode n{false, which, s, t, "", {}};
    Fail sub;
    {
      TyVarScope scope(ctx_, common, ak);
      SubtypeNode body = go(sb, tb, flipped, sub);
      n.ok = body.ok;
      n.children.push_back(std::move(body));
    }
    if (!n.ok) {
      push_path(sub, std::string("body of ") + which + " '" + common);
      fail = std::move(sub);
    }
    return n;
  }

  KindingContext& ctx_;
};

inline SubtypeResult check_subtype(KindingContext& ctx, const TypePtr& s, const TypePtr& t) {
  SubtypeChecker c(ctx);
  return c.check(s, t);
}

inline bool is_subtype(KindingContext& ctx, const TypePtr& s, const TypePtr& t) {
  SubtypeChecker c(ctx);
  return c.holds(s, t);
}

inline bool type_equiv(KindingContext& ctx, const TypePtr& s, const TypePtr& t) {
  SubtypeChecker c(ctx);
  return c.equiv(s, t);
}

// Renders the two-line message used by diagnostics; the caller prefixes the
// first line with "Error: " so the second line's indent lines up beneath it.
inline std::string subtype_error_message(const TypePtr& s, const TypePtr& t, const SubtypeFailure& f) {
  return "Type " + type_to_string(s) + " is not a subtype of " + type_to_string(t) + "\n       " +
         f.explanation;
}

inline void render_subtype_trace(const SubtypeNode& n, int depth, std::string& out) {
  out.append((size_t)depth * 2, ' ');
  out += n.rule + ": " + type_to_string(n.s) + " <= " + type_to_string(n.t);
  if (!n.ok) {
    out += " [fail";
    if (!n.fail_code.empty()) out += ": " + n.fail_code;
    out += "]";
  }
  out += "\n";
  for (const SubtypeNode& c : n.children) render_subtype_trace(c, depth + 1, out);
}

inline std::string subtype_trace_string(const SubtypeNode& n) {
  std::string out;
  render_subtype_trace(n, 0, out);
  return out;
}

} // namespace subwit
