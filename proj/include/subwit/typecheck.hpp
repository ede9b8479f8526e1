#pragma once

// Bidirectional typechecker.
//
// `infer` synthesizes a normalized type; `check` pushes an expected type into
// a term, falling back to synthesis plus subsumption (subtyping) at the
// leaves.  Subsumption applies at application arguments, let/annotation
// boundaries, pack payloads, match arms, try handlers, and assignments.
// Coercions `(e :> T)` are the only construct that *requires* the subtype
// engine to certify a relation and report its derivation.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "subwit/ast.hpp"
#include "subwit/context.hpp"
#include "subwit/kinds.hpp"
#include "subwit/norm.hpp"
#include "subwit/parser.hpp"
#include "subwit/pretty.hpp"
#include "subwit/subtype.hpp"

namespace subwit {

class TypingContext {
 public:
  KindingContext& kinds() { return kinds_; }
  const KindingContext& kinds() const { return kinds_; }

  void push_term(const std::string& name, TypePtr ty) { terms_.push_back({name, std::move(ty)}); }
  void pop_term() { terms_.pop_back(); }
  const TypePtr* lookup_term(const std::string& name) const {
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

 private:
  KindingContext kinds_;
  std::vector<std::pair<std::string, TypePtr>> terms_;
};

class TermScope {
 public:
  TermScope(TypingContext& ctx, const std::string& name, TypePtr ty) : ctx_(ctx) {
    ctx_.push_term(name, std::move(ty));
  }
  ~TermScope() { ctx_.pop_term(); }
  TermScope(const TermScope&) = delete;
  TermScope& operator=(const TermScope&) = delete;

 private:
  TypingContext& ctx_;
};

// Records the subtype derivation produced at an explicit coercion site.
struct CoercionTrace {
  SourceSpan span;
  TypePtr source, target;
  SubtypeResult result;
};

namespace detail {

// Substitutes a type for a type variable inside every type embedded in a
// term (annotations, type arguments, pack/coerce/raise targets), respecting
// term-level type binders.
inline TermPtr subst_tyvar_in_term(const TermPtr& e, const std::string& var, const TypePtr& rep);

inline TypePtr subst_in_type_slot(const TypePtr& t, const std::string& var, const TypePtr& rep) {
  return t ? subst_type(t, var, rep) : nullptr;
}

inline TermPtr subst_tyvar_in_term(const TermPtr& e, const std::string& var, const TypePtr& rep) {
  auto go = [&](const TermPtr& x) { return subst_tyvar_in_term(x, var, rep); };
  auto got = [&](const TypePtr& t) { return subst_in_type_slot(t, var, rep); };
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EVar> || std::is_same_v<T, EIntLit> ||
                      std::is_same_v<T, EBoolLit> || std::is_same_v<T, EUnitLit> ||
                      std::is_same_v<T, EStringLit> || std::is_same_v<T, EPrim>) {
          return e;
        } else if constexpr (std::is_same_v<T, ELam>) {
          return mk_term(ELam{n.param, got(n.ann), go(n.body)}, e->span);
        } else if constexpr (std::is_same_v<T, EApp>) {
          return mk_term(EApp{go(n.fn), go(n.arg)}, e->span);
        } else if constexpr (std::is_same_v<T, ETyAbs>) {
          if (n.var == var) return e; // shadowed below this binder
          if (free_type_vars(rep).count(n.var)) {
            std::set<std::string> avoid = free_type_vars(rep);
            avoid.insert(var);
            std::string f = fresh_type_var(n.var, avoid);
            TermPtr body = subst_tyvar_in_term(n.body, n.var, t_var(f, e->span));
            return mk_term(ETyAbs{f, n.kind, subst_tyvar_in_term(body, var, rep)}, e->span);
          }
          return mk_term(ETyAbs{n.var, n.kind, go(n.body)}, e->span);
        } else if constexpr (std::is_same_v<T, ETyApp>) {
          return mk_term(ETyApp{go(n.fn), got(n.arg)}, e->span);
        } else if constexpr (std::is_same_v<T, ELet>) {
          return mk_term(ELet{n.is_rec, n.name, got(n.ann), go(n.bound), go(n.body)}, e->span);
        } else if constexpr (std::is_same_v<T, ERecord>) {
          std::vector<EFieldInit> fs;
          for (const auto& f : n.fields) fs.push_back({f.label, go(f.value)});
          return mk_term(ERecord{std::move(fs)}, e->span);
        } else if constexpr (std::is_same_v<T, EProj>) {
          return mk_term(EProj{go(n.subject), n.label}, e->span);
        } else if constexpr (std::is_same_v<T, EPack>) {
          return mk_term(EPack{got(n.witness), go(n.payload), got(n.as_type)}, e->span);
        } else if constexpr (std::is_same_v<T, EUnpack>) {
          TermPtr packed = go(n.packed);
          if (n.tyvar == var) return mk_term(EUnpack{n.tyvar, n.var, packed, n.body}, e->span);
          if (free_type_vars(rep).count(n.tyvar)) {
            std::set<std::string> avoid = free_type_vars(rep);
            avoid.insert(var);
            std::string f = fresh_type_var(n.tyvar, avoid);
            TermPtr body = subst_tyvar_in_term(n.body, n.tyvar, t_var(f, e->span));
            return mk_term(EUnpack{f, n.var, packed, subst_tyvar_in_term(body, var, rep)}, e->span);
          }
          return mk_term(EUnpack{n.tyvar, n.var, packed, go(n.body)}, e->span);
        } else if constexpr (std::is_same_v<T, EConstruct>) {
          return mk_term(EConstruct{n.ctor, n.arg ? go(n.arg) : nullptr}, e->span);
        } else if constexpr (std::is_same_v<T, EMatch>) {
          std::vector<EArm> arms;
          for (const auto& a : n.arms) arms.push_back({a.ctor, a.binder, go(a.body)});
          return mk_term(EMatch{go(n.scrutinee), std::move(arms)}, e->span);
        } else if constexpr (std::is_same_v<T, ERefNew>) {
          return mk_term(ERefNew{go(n.init)}, e->span);
        } else if constexpr (std::is_same_v<T, EDeref>) {
          return mk_term(EDeref{go(n.subject)}, e->span);
        } else if constexpr (std::is_same_v<T, EAssign>) {
          return mk_term(EAssign{go(n.target), go(n.value)}, e->span);
        } else if constexpr (std::is_same_v<T, ECoerce>) {
          return mk_term(ECoerce{go(n.subject), got(n.target)}, e->span);
        } else if constexpr (std::is_same_v<T, ERaise>) {
          return mk_term(ERaise{go(n.payload), got(n.target)}, e->span);
        } else if constexpr (std::is_same_v<T, ETry>) {
          return mk_term(ETry{go(n.body), n.binder, go(n.handler)}, e->span);
        } else {
          static_assert(std::is_same_v<T, ESeq>);
          return mk_term(ESeq{go(n.first), go(n.second)}, e->span);
        }
      },
      e->node);
}

} // namespace detail

class TypeChecker {
 public:
  explicit TypeChecker(TypingContext& ctx) : ctx_(ctx) {}

  void set_coercion_trace(std::vector<CoercionTrace>* sink) { trace_sink_ = sink; }

  // Validates that the annotation has kind * and returns its normal form.
  TypePtr annotation(const TypePtr& t) {
    KindPtr k = kind_of(ctx_.kinds(), t);
    if (!k->is_star())
      throw KindError(t->span, "this type has kind " + kind_to_string(k) + " but kind * is required");
    return normalize_type(ctx_.kinds(), t);
  }

  TypePtr infer(const TermPtr& e) {
    return std::visit([&](const auto& n) -> TypePtr { return infer_node(n, e); }, e->node);
  }

  void check(const TermPtr& e, const TypePtr& expected) {
    // Forms whose expected type can be pushed inward.
    if (const ELam* lam = std::get_if<ELam>(&e->node)) {
      if (const TArrow* arr = std::get_if<TArrow>(&expected->node)) {
        TypePtr ann = annotation(lam->ann);
        SubtypeResult r = check_subtype(ctx_.kinds(), arr->dom, ann);
        if (!r.ok) {
          throw TypeError(e->span, DiagCode::TypeMismatch,
                          "the parameter annotation " + type_to_string(ann) +
                              " does not accept the expected domain " + type_to_string(arr->dom) +
                              "\n       " + r.failure.explanation);
        }
        TermScope scope(ctx_, lam->param, ann);
        check(lam->body, arr->cod);
        return;
      }
      throw TypeError(e->span, DiagCode::TypeMismatch,
                      "a function cannot have type " + type_to_string(expected));
    }
    if (const ETyAbs* abs = std::get_if<ETyAbs>(&e->node)) {
      if (const TForall* fa = std::get_if<TForall>(&expected->node)) {
        if (!kind_equal(abs->kind, fa->kind))
          throw TypeError(e->span, DiagCode::TypeMismatch,
                          "type abstraction binds a variable of kind " + kind_to_string(abs->kind) +
                              " but kind " + kind_to_string(fa->kind) + " is expected");
        TermPtr body = abs->body;
        std::string var = abs->var;
        TypePtr want_body = fa->body;
        if (var != fa->var) {
          if (free_type_vars(fa->body).count(var)) {
            // Renaming the expected binder to `var` would capture; rename the
            // term's binder instead.
            std::set<std::string> avoid = free_type_vars(fa->body);
            std::string f = fresh_type_var(var, avoid);
            body = detail::subst_tyvar_in_term(body, var, t_var(f, e->span));
            var = f;
          }
          want_body = subst_type(fa->body, fa->var, t_var(var, expected->span));
        }
        if (ctx_.kinds().lookup_tyvar(var)) {
          std::string f = unshadowed_name(var, free_type_vars(want_body));
          body = detail::subst_tyvar_in_term(body, var, t_var(f, e->span));
          want_body = subst_type(want_body, var, t_var(f, expected->span));
          var = f;
        }
        TyVarScope scope(ctx_.kinds(), var, abs->kind);
        check(body, want_body);
        return;
      }
      throw TypeError(e->span, DiagCode::TypeMismatch,
                      "a type abstraction cannot have type " + type_to_string(expected));
    }
    if (const ELet* let = std::get_if<ELet>(&e->node)) {
      with_let_binding(*let, e->span, [&] { check(let->body, expected); });
      return;
    }
    if (const ESeq* seq = std::get_if<ESeq>(&e->node)) {
      check(seq->first, t_base(BaseType::Unit, seq->first->span));
      check(seq->second, expected);
      return;
    }
    if (const EMatch* m = std::get_if<EMatch>(&e->node)) {
      check_match(*m, e->span, &expected);
      return;
    }
    if (const ERefNew* rn = std::get_if<ERefNew>(&e->node)) {
      if (const TRef* want = std::get_if<TRef>(&expected->node)) {
        check(rn->init, want->cell);
        return;
      }
    }
    if (const ETry* t = std::get_if<ETry>(&e->node)) {
      check(t->body, expected);
      TermScope scope(ctx_, t->binder, t_base(BaseType::Exn, e->span));
      check(t->handler, expected);
      return;
    }
    if (const ERaise* r = std::get_if<ERaise>(&e->node)) {
      check(r->payload, t_base(BaseType::Exn, r->payload->span));
      if (r->target) {
        TypePtr given = annotation(r->target);
        subsume(e->span, given, expected);
      }
      return;
    }
    if (const EUnpack* u = std::get_if<EUnpack>(&e->node)) {
      check_unpack(*u, e->span, &expected);
      return;
    }
    if (const ERecord* rec = std::get_if<ERecord>(&e->node)) {
      if (const TRecord* want = std::get_if<TRecord>(&expected->node)) {
        std::set<std::string> given;
        for (const EFieldInit& f : rec->fields)
          if (!given.insert(f.label).second)
            throw TypeError(e->span, DiagCode::TypeMismatch, "duplicate record field " + f.label);
        for (const TField& w : want->fields)
          if (!given.count(w.label))
            throw TypeError(e->span, DiagCode::TypeMismatch,
                            "record literal is missing field " + w.label + " of type " +
                                type_to_string(w.type));
        for (const EFieldInit& f : rec->fields) {
          const TField* w = nullptr;
          for (const TField& cand : want->fields)
            if (cand.label == f.label) {
              w = &cand;
              break;
            }
          if (w) {
            check(f.value, w->type);
          } else {
            infer(f.value); // width: extra fields just need some type
          }
        }
        return;
      }
    }
    if (const EConstruct* c = std::get_if<EConstruct>(&e->node)) {
      if (const TNamed* named = std::get_if<TNamed>(&expected->node)) {
        if (const AdtInfo* info = ctx_.kinds().find_adt(named->name);
            info && info->params.size() == named->args.size()) {
          check_construct(*c, e->span, *info, named->args, expected);
          return;
        }
      }
      // fall through to synthesis for mismatching shapes
    }
    TypePtr actual = infer(e);
    subsume(e->span, actual, expected);
  }

  // Registers a declaration, typechecking term declarations.  Returns the
  // normalized type for term declarations, null otherwise.
  TypePtr check_decl(const Decl& d) {
    if (const AdtDecl* adt = std::get_if<AdtDecl>(&d.node)) {
      ensure_fresh_type_name(adt->name, d.span);
      for (const CtorDef& c : adt->ctors)
        if (ctx_.kinds().adt_of_ctor(c.name))
          throw KindError(d.span, "constructor " + c.name + " is already defined");
      ctx_.kinds().add_adt(AdtInfo{adt->name, adt->params, adt->ctors}); // first: ctors may recurse
      check_decl_variance(ctx_.kinds(), *adt, d.span);
      return nullptr;
    }
    if (const AliasDecl* alias = std::get_if<AliasDecl>(&d.node)) {
      ensure_fresh_type_name(alias->name, d.span);
      check_decl_variance(ctx_.kinds(), *alias, d.span); // aliases may not recurse
      ctx_.kinds().add_alias(AliasInfo{alias->name, alias->params, alias->body});
      return nullptr;
    }
    const TermDecl& td = std::get<TermDecl>(d.node);
    TypePtr ty = bind_term_decl(td, d.span);
    ctx_.push_term(td.name, ty); // program scope: stays bound
    return ty;
  }

  void check_program(const Prog& p) {
    for (const Decl& d : p.decls) check_decl(d);
  }

 private:
  void ensure_fresh_type_name(const std::string& name, const SourceSpan& span) {
    if (ctx_.kinds().has_type_name(name)) throw KindError(span, "type " + name + " is already defined");
  }

  // A name based on `base` that is bound nowhere in the current type-variable
  // scope and avoids everything in `avoid`.
  std::string unshadowed_name(const std::string& base, std::set<std::string> avoid) {
    for (const std::string& n : ctx_.kinds().tyvar_names()) avoid.insert(n);
    avoid.insert(base);
    return fresh_type_var(base, avoid);
  }

  [[noreturn]] void unknown(const SourceSpan& span, const std::string& what) {
    throw TypeError(span, DiagCode::UnknownName, what);
  }

  void subsume(const SourceSpan& span, const TypePtr& actual, const TypePtr& expected) {
    SubtypeResult r = check_subtype(ctx_.kinds(), actual, expected);
    if (!r.ok) {
      throw TypeError(span, DiagCode::TypeMismatch,
                      "this expression has type " + type_to_string(actual) + " but " +
                          type_to_string(expected) + " was expected\n       " + r.failure.explanation);
    }
  }

  // Shared let-binding logic: binds the name, then runs `body_action` with
  // the binding in scope.
  template <typename F>
  void with_let_binding(const ELet& let, const SourceSpan& span, F&& body_action) {
    TypePtr bound_ty;
    if (let.is_rec) {
      if (!let.ann)
        throw TypeError(span, DiagCode::AnnotationRequired,
                        "recursive definition " + let.name + " requires a type annotation");
      if (!std::holds_alternative<ELam>(let.bound->node) &&
          !std::holds_alternative<ETyAbs>(let.bound->node))
        throw TypeError(span, DiagCode::TypeMismatch,
                        "recursive definition " + let.name + " must be a function or type abstraction");
      bound_ty = annotation(let.ann);
      TermScope rec_scope(ctx_, let.name, bound_ty);
      check(let.bound, bound_ty);
      body_action();
      return;
    }
    if (let.ann) {
      bound_ty = annotation(let.ann);
      check(let.bound, bound_ty);
    } else {
      bound_ty = infer(let.bound);
    }
    TermScope scope(ctx_, let.name, bound_ty);
    body_action();
  }

  TypePtr bind_term_decl(const TermDecl& td, const SourceSpan& span) {
    if (td.is_rec) {
      if (!td.ann)
        throw TypeError(span, DiagCode::AnnotationRequired,
                        "recursive definition " + td.name + " requires a type annotation");
      if (!std::holds_alternative<ELam>(td.body->node) &&
          !std::holds_alternative<ETyAbs>(td.body->node))
        throw TypeError(span, DiagCode::TypeMismatch,
                        "recursive definition " + td.name + " must be a function or type abstraction");
      TypePtr ty = annotation(td.ann);
      TermScope rec_scope(ctx_, td.name, ty);
      check(td.body, ty);
      return ty;
    }
    if (td.ann) {
      TypePtr ty = annotation(td.ann);
      check(td.body, ty);
      return ty;
    }
    return infer(td.body);
  }

  // --- synthesis cases ---

  TypePtr infer_node(const EVar& n, const TermPtr& e) {
    if (const TypePtr* ty = ctx_.lookup_term(n.name)) return *ty;
    unknown(e->span, "unbound variable " + n.name);
  }
  TypePtr infer_node(const EIntLit&, const TermPtr& e) { return t_base(BaseType::Int, e->span); }
  TypePtr infer_node(const EBoolLit&, const TermPtr& e) { return t_base(BaseType::Bool, e->span); }
  TypePtr infer_node(const EUnitLit&, const TermPtr& e) { return t_base(BaseType::Unit, e->span); }
  TypePtr infer_node(const EStringLit&, const TermPtr& e) { return t_base(BaseType::String, e->span); }

  TypePtr infer_node(const ELam& n, const TermPtr& e) {
    TypePtr ann = annotation(n.ann);
    TermScope scope(ctx_, n.param, ann);
    TypePtr body = infer(n.body);
    return t_arrow(ann, body, e->span);
  }

  TypePtr infer_node(const EApp& n, const TermPtr& e) {
    TypePtr fn = infer(n.fn);
    const TArrow* arr = std::get_if<TArrow>(&fn->node);
    if (!arr)
      throw TypeError(e->span, DiagCode::NotAFunction,
                      "this expression has type " + type_to_string(fn) + " and cannot be applied");
    check(n.arg, arr->dom);
    return arr->cod;
  }

  TypePtr infer_node(const ETyAbs& n, const TermPtr& e) {
    TermPtr body = n.body;
    std::string var = n.var;
    if (ctx_.kinds().lookup_tyvar(var)) {
      // The binder shadows an enclosing type variable that may occur in the
      // types of captured term variables; rename it to keep the generalized
      // type honest.
      std::string f = unshadowed_name(var, {});
      body = detail::subst_tyvar_in_term(body, var, t_var(f, e->span));
      var = f;
    }
    TyVarScope scope(ctx_.kinds(), var, n.kind);
    TypePtr body_ty = infer(body);
    return t_forall(var, n.kind, body_ty, e->span);
  }

  TypePtr infer_node(const ETyApp& n, const TermPtr& e) {
    TypePtr fn = infer(n.fn);
    const TForall* fa = std::get_if<TForall>(&fn->node);
    if (!fa)
      throw TypeError(e->span, DiagCode::TypeMismatch,
                      "this expression has type " + type_to_string(fn) +
                          " and cannot take a type argument");
    KindPtr have = kind_of(ctx_.kinds(), n.arg);
    if (!kind_equal(have, fa->kind))
      throw KindError(n.arg->span, "type argument has kind " + kind_to_string(have) + " but kind " +
                                       kind_to_string(fa->kind) + " is required");
    TypePtr arg = normalize_type(ctx_.kinds(), n.arg);
    return normalize_type(ctx_.kinds(), subst_type(fa->body, fa->var, arg));
  }

  TypePtr infer_node(const ELet& n, const TermPtr& e) {
    TypePtr result;
    with_let_binding(n, e->span, [&] { result = infer(n.body); });
    return result;
  }

  TypePtr infer_node(const ERecord& n, const TermPtr& e) {
    std::vector<TField> fields;
    for (const EFieldInit& f : n.fields) {
      for (const TField& seen : fields)
        if (seen.label == f.label)
          throw TypeError(e->span, DiagCode::TypeMismatch, "duplicate record field " + f.label);
      fields.push_back({f.label, infer(f.value)});
    }
    return t_record(std::move(fields), e->span);
  }

  TypePtr infer_node(const EProj& n, const TermPtr& e) {
    TypePtr subject = infer(n.subject);
    const TRecord* rec = std::get_if<TRecord>(&subject->node);
    if (!rec)
      throw TypeError(e->span, DiagCode::TypeMismatch,
                      "this expression has type " + type_to_string(subject) +
                          " and has no field " + n.label);
    for (const TField& f : rec->fields)
      if (f.label == n.label) return f.type;
    throw TypeError(e->span, DiagCode::TypeMismatch,
                    "this expression has type " + type_to_string(subject) + " and has no field " +
                        n.label);
  }

  TypePtr infer_node(const EPack& n, const TermPtr& e) {
    TypePtr as = annotation(n.as_type);
    const TExists* ex = std::get_if<TExists>(&as->node);
    if (!ex)
      throw TypeError(e->span, DiagCode::PackMismatch,
                      "pack target " + type_to_string(as) + " is not an existential type");
    KindPtr have = kind_of(ctx_.kinds(), n.witness);
    if (!kind_equal(have, ex->kind))
      throw TypeError(n.witness->span, DiagCode::PackMismatch,
                      "pack witness has kind " + kind_to_string(have) + " but kind " +
                          kind_to_string(ex->kind) + " is required");
    TypePtr witness = normalize_type(ctx_.kinds(), n.witness);
    TypePtr payload_ty = normalize_type(ctx_.kinds(), subst_type(ex->body, ex->var, witness));
    check(n.payload, payload_ty);
    return as;
  }

  TypePtr infer_node(const EUnpack& n, const TermPtr& e) { return check_unpack(n, e->span, nullptr); }

  TypePtr infer_node(const EConstruct& n, const TermPtr& e) {
    const AdtInfo* info = ctx_.kinds().adt_of_ctor(n.ctor);
    if (!info) unknown(e->span, "unknown constructor " + n.ctor);
    if (!info->params.empty())
      throw TypeError(e->span, DiagCode::AnnotationRequired,
                      "cannot infer the type arguments of constructor " + n.ctor +
                          "; an annotation is required");
    return check_construct(n, e->span, *info, {}, t_named(info->name, {}, e->span));
  }

  TypePtr infer_node(const EMatch& n, const TermPtr& e) { return check_match(n, e->span, nullptr); }

  TypePtr infer_node(const ERefNew& n, const TermPtr& e) { return t_ref(infer(n.init), e->span); }

  TypePtr infer_node(const EDeref& n, const TermPtr& e) {
    TypePtr subject = infer(n.subject);
    const TRef* r = std::get_if<TRef>(&subject->node);
    if (!r)
      throw TypeError(e->span, DiagCode::TypeMismatch,
                      "this expression has type " + type_to_string(subject) +
                          " and cannot be dereferenced");
    return r->cell;
  }

  TypePtr infer_node(const EAssign& n, const TermPtr& e) {
    TypePtr target = infer(n.target);
    const TRef* r = std::get_if<TRef>(&target->node);
    if (!r)
      throw TypeError(e->span, DiagCode::TypeMismatch,
                      "this expression has type " + type_to_string(target) +
                          " and cannot be assigned to");
    check(n.value, r->cell);
    return t_base(BaseType::Unit, e->span);
  }

  TypePtr infer_node(const ECoerce& n, const TermPtr& e) {
    TypePtr source = infer(n.subject);
    TypePtr target = annotation(n.target);
    SubtypeResult r = check_subtype(ctx_.kinds(), source, target);
    if (trace_sink_) trace_sink_->push_back({e->span, source, target, r});
    if (!r.ok)
      throw TypeError(e->span, DiagCode::CoercionFailed,
                      subtype_error_message(source, target, r.failure));
    return target;
  }

  TypePtr infer_node(const ERaise& n, const TermPtr& e) {
    check(n.payload, t_base(BaseType::Exn, n.payload->span));
    if (!n.target)
      throw TypeError(e->span, DiagCode::AnnotationRequired,
                      "raise needs a result type annotation here, as in raise [T] e");
    return annotation(n.target);
  }

  TypePtr infer_node(const ETry& n, const TermPtr& e) {
    TypePtr body = infer(n.body);
    TermScope scope(ctx_, n.binder, t_base(BaseType::Exn, e->span));
    check(n.handler, body);
    return body;
  }

  TypePtr infer_node(const ESeq& n, const TermPtr&) {
    check(n.first, t_base(BaseType::Unit, n.first->span));
    return infer(n.second);
  }

  TypePtr infer_node(const EPrim& n, const TermPtr&) {
    throw std::logic_error("internal primitive " + n.prim + " reached the typechecker");
  }

  // --- shared constructor / match / unpack logic ---

  TypePtr check_construct(const EConstruct& n, const SourceSpan& span, const AdtInfo& info,
                          const std::vector<TypePtr>& args, const TypePtr& result) {
    const CtorDef* def = info.find_ctor(n.ctor);
    if (!def)
      throw TypeError(span, DiagCode::TypeMismatch,
                      "constructor " + n.ctor + " does not belong to type " + info.name);
    if (def->arg && !n.arg)
      throw TypeError(span, DiagCode::TypeMismatch, "constructor " + n.ctor + " expects an argument");
    if (!def->arg && n.arg)
      throw TypeError(span, DiagCode::TypeMismatch, "constructor " + n.ctor + " takes no argument");
    if (def->arg) {
      std::vector<std::pair<std::string, TypePtr>> inst;
      for (size_t i = 0; i < info.params.size(); ++i)
        inst.emplace_back(info.params[i].name, args[i]);
      check(n.arg, normalize_type(ctx_.kinds(), subst_type_many(def->arg, inst)));
    }
    return result;
  }

  TypePtr check_match(const EMatch& n, const SourceSpan& span, const TypePtr* expected) {
    TypePtr scrut = infer(n.scrutinee);
    const TNamed* named = std::get_if<TNamed>(&scrut->node);
    const AdtInfo* info = named ? ctx_.kinds().find_adt(named->name) : nullptr;
    if (!info)
      throw TypeError(span, DiagCode::TypeMismatch,
                      "match subject has type " + type_to_string(scrut) + " which is not a data type");
    std::set<std::string> seen;
    for (const EArm& arm : n.arms) {
      if (!info->find_ctor(arm.ctor))
        throw TypeError(span, DiagCode::TypeMismatch,
                        "constructor " + arm.ctor + " does not belong to type " + info->name);
      if (!seen.insert(arm.ctor).second)
        throw TypeError(span, DiagCode::TypeMismatch, "duplicate match arm for " + arm.ctor);
    }
    for (const CtorDef& c : info->ctors)
      if (!seen.count(c.name))
        throw TypeError(span, DiagCode::NonexhaustiveMatch,
                        "match does not cover constructor " + c.name);

    TypePtr result = expected ? *expected : nullptr;
    for (const EArm& arm : n.arms) {
      const CtorDef* def = info->find_ctor(arm.ctor);
      if (def->arg && !arm.binder)
        throw TypeError(arm.body->span, DiagCode::TypeMismatch,
                        "constructor " + arm.ctor + " carries an argument; bind it");
      if (!def->arg && arm.binder)
        throw TypeError(arm.body->span, DiagCode::TypeMismatch,
                        "constructor " + arm.ctor + " takes no argument");
      TypePtr arg_ty;
      if (def->arg) {
        std::vector<std::pair<std::string, TypePtr>> inst;
        for (size_t i = 0; i < info->params.size(); ++i)
          inst.emplace_back(info->params[i].name, named->args[i]);
        arg_ty = normalize_type(ctx_.kinds(), subst_type_many(def->arg, inst));
      }
      auto run_arm = [&] {
        if (result) {
          check(arm.body, result);
        } else {
          result = infer(arm.body);
        }
      };
      if (arg_ty) {
        TermScope scope(ctx_, *arm.binder, arg_ty);
        run_arm();
      } else {
        run_arm();
      }
    }
    return result;
  }

  TypePtr check_unpack(const EUnpack& n, const SourceSpan& span, const TypePtr* expected) {
    TypePtr packed = infer(n.packed);
    const TExists* ex = std::get_if<TExists>(&packed->node);
    if (!ex)
      throw TypeError(span, DiagCode::PackMismatch,
                      "unpack subject has type " + type_to_string(packed) +
                          " which is not an existential type");
    TermPtr body = n.body;
    std::string tyvar = n.tyvar;
    if (ctx_.kinds().lookup_tyvar(tyvar)) {
      std::string f = unshadowed_name(tyvar, free_type_vars(packed));
      body = detail::subst_tyvar_in_term(body, tyvar, t_var(f, span));
      tyvar = f;
    }
    TypePtr payload_ty = normalize_type(ctx_.kinds(), subst_type(ex->body, ex->var, t_var(tyvar, span)));
    TypePtr result;
    {
      TyVarScope tscope(ctx_.kinds(), tyvar, ex->kind);
      TermScope vscope(ctx_, n.var, payload_ty);
      if (expected) {
        check(body, *expected);
        result = *expected;
      } else {
        result = infer(body);
      }
    }
    if (!expected && free_type_vars(result).count(tyvar))
      throw TypeError(span, DiagCode::PackMismatch,
                      "the existential type variable '" + tyvar + " would escape its scope");
    return result;
  }

  TypingContext& ctx_;
  std::vector<CoercionTrace>* trace_sink_ = nullptr;
};

} // namespace subwit
