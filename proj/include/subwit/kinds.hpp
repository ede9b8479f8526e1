#pragma once

// Kind checking and variance analysis.
//
// Kinds are polarized: an arrow kind carries the variance at which the
// parameter may be used. variance_of infers how a type variable occurs in a
// type by composing position variances along each occurrence path and joining
// the results; declaration checking compares the inferred variance against
// the declared marker.

#include <string>

#include "subwit/ast.hpp"
#include "subwit/context.hpp"
#include "subwit/source.hpp"

namespace subwit {

// compose(position, occurrence): the variance of an occurrence seen through
// an enclosing position of the given variance.
inline Variance compose(Variance position, Variance occurrence) {
  switch (position) {
    case Variance::Cov: return occurrence;
    case Variance::Contra: return neg(occurrence);
    case Variance::Inv: return occurrence == Variance::Unused ? Variance::Unused : Variance::Inv;
    case Variance::Unused: return Variance::Unused;
  }
  return Variance::Unused;
}

KindPtr kind_of(KindingContext& ctx, const TypePtr& ty);
Variance variance_of(KindingContext& ctx, const TypePtr& ty, const std::string& var);

namespace detail {

// Kind of a named constructor before applying any arguments: the declared
// parameters become arrow kinds (at their declared variances) around the kind
// of the underlying definition (always * for ADTs; computed for aliases,
// whose bodies may themselves be type-level lambdas).
inline KindPtr constructor_kind(KindingContext& ctx, const TNamed& n, const SourceSpan& sp) {
  if (const AdtInfo* adt = ctx.find_adt(n.name)) {
    KindPtr k = kstar();
    for (auto it = adt->params.rbegin(); it != adt->params.rend(); ++it)
      k = karrow(it->variance, kstar(), k);
    return k;
  }
  if (const AliasInfo* al = ctx.find_alias(n.name)) {
    for (const auto& p : al->params) ctx.push_tyvar(p.name, kstar());
    KindPtr body = kind_of(ctx, al->body);
    for (size_t i = 0; i < al->params.size(); ++i) ctx.pop_tyvar();
    KindPtr k = body;
    for (auto it = al->params.rbegin(); it != al->params.rend(); ++it)
      k = karrow(it->variance, kstar(), k);
    return k;
  }
  throw KindError(sp, "unknown type name " + n.name);
}

} // namespace detail

// Kind of a type. Throws KindError for unbound names, arity and argument-kind
// mismatches; throws VarianceError when a type-lambda binder marker is weaker
// than the body's use of the binder.
inline KindPtr kind_of(KindingContext& ctx, const TypePtr& ty) {
  return std::visit(
      [&](const auto& n) -> KindPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TVar>) {
          if (const KindPtr* k = ctx.lookup_tyvar(n.name)) return *k;
          throw KindError(ty->span, "unbound type variable '" + n.name);
        } else if constexpr (std::is_same_v<T, TBase>) {
          return kstar();
        } else if constexpr (std::is_same_v<T, TArrow>) {
          if (!kind_of(ctx, n.dom)->is_star())
            throw KindError(n.dom->span, "function domain must have kind *");
          if (!kind_of(ctx, n.cod)->is_star())
            throw KindError(n.cod->span, "function codomain must have kind *");
          return kstar();
        } else if constexpr (std::is_same_v<T, TRecord>) {
          for (const auto& f : n.fields)
            if (!kind_of(ctx, f.type)->is_star())
              throw KindError(f.type->span, "record field " + f.label + " must have kind *");
          return kstar();
        } else if constexpr (std::is_same_v<T, TNamed>) {
          if (const AdtInfo* adt = ctx.find_adt(n.name)) {
            if (n.args.size() != adt->params.size())
              throw KindError(ty->span, n.name + " expects " + std::to_string(adt->params.size()) +
                                            " type argument(s), got " + std::to_string(n.args.size()));
          }
          KindPtr k = detail::constructor_kind(ctx, n, ty->span);
          for (const auto& a : n.args) {
            if (k->is_star())
              throw KindError(ty->span, n.name + " is applied to too many type arguments");
            KindPtr ka = kind_of(ctx, a);
            if (!kind_equal(ka, k->param))
              throw KindError(a->span, "type argument of " + n.name + " has kind " + kind_to_string(ka) +
                                           ", expected " + kind_to_string(k->param));
            k = k->result;
          }
          return k;
        } else if constexpr (std::is_same_v<T, TRef>) {
          if (!kind_of(ctx, n.cell)->is_star())
            throw KindError(n.cell->span, "ref contents must have kind *");
          return kstar();
        } else if constexpr (std::is_same_v<T, TForall> || std::is_same_v<T, TExists>) {
          TyVarScope scope(ctx, n.var, n.kind);
          if (!kind_of(ctx, n.body)->is_star())
            throw KindError(n.body->span, "quantified body must have kind *");
          return kstar();
        } else if constexpr (std::is_same_v<T, TLam>) {
          KindPtr body_kind;
          Variance occ;
          {
            TyVarScope scope(ctx, n.var, n.kind);
            body_kind = kind_of(ctx, n.body);
            occ = variance_of(ctx, n.body, n.var);
          }
          Variance v;
          if (n.v) {
            if (!variance_leq(occ, *n.v))
              throw VarianceError(ty->span, "type-lambda binder '" + n.var + " is marked " +
                                                variance_name(*n.v) + " but occurs " + variance_name(occ) +
                                                "ly in the body");
            v = *n.v;
          } else {
            v = occ == Variance::Unused ? Variance::Cov : occ;
          }
          return karrow(v, n.kind, body_kind);
        } else if constexpr (std::is_same_v<T, TApp>) {
          KindPtr kf = kind_of(ctx, n.fn);
          if (kf->is_star())
            throw KindError(ty->span, "type of kind * cannot be applied to an argument");
          KindPtr ka = kind_of(ctx, n.arg);
          if (!kind_equal(ka, kf->param))
            throw KindError(n.arg->span, "type argument has kind " + kind_to_string(ka) + ", expected " +
                                             kind_to_string(kf->param));
          return kf->result;
        }
      },
      ty->node);
}

// Variance at which `var` occurs in `ty` (the join over all occurrences of
// each occurrence's composed position variance). `ty` must be well-kinded in
// `ctx` extended with `var`. Occurrences of a variable in constructor (head)
// position count as invariant.
inline Variance variance_of(KindingContext& ctx, const TypePtr& ty, const std::string& var) {
  return std::visit(
      [&](const auto& n) -> Variance {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TVar>) {
          return n.name == var ? Variance::Cov : Variance::Unused;
        } else if constexpr (std::is_same_v<T, TBase>) {
          return Variance::Unused;
        } else if constexpr (std::is_same_v<T, TArrow>) {
          return join(compose(Variance::Contra, variance_of(ctx, n.dom, var)),
                      compose(Variance::Cov, variance_of(ctx, n.cod, var)));
        } else if constexpr (std::is_same_v<T, TRecord>) {
          Variance acc = Variance::Unused;
          for (const auto& f : n.fields)
            acc = join(acc, compose(Variance::Cov, variance_of(ctx, f.type, var)));
          return acc;
        } else if constexpr (std::is_same_v<T, TNamed>) {
          // Arguments compose with the head's declared parameter variance;
          // extra arguments (over-applied aliases) follow the body's kind.
          KindPtr k = detail::constructor_kind(ctx, n, ty->span);
          Variance acc = Variance::Unused;
          for (const auto& a : n.args) {
            if (k->is_star()) break; // arity error reported by kind_of
            acc = join(acc, compose(k->v, variance_of(ctx, a, var)));
            k = k->result;
          }
          return acc;
        } else if constexpr (std::is_same_v<T, TRef>) {
          return compose(Variance::Inv, variance_of(ctx, n.cell, var));
        } else if constexpr (std::is_same_v<T, TForall> || std::is_same_v<T, TExists>) {
          if (n.var == var) return Variance::Unused;
          TyVarScope scope(ctx, n.var, n.kind);
          return compose(Variance::Cov, variance_of(ctx, n.body, var));
        } else if constexpr (std::is_same_v<T, TLam>) {
          if (n.var == var) return Variance::Unused;
          TyVarScope scope(ctx, n.var, n.kind);
          return compose(Variance::Cov, variance_of(ctx, n.body, var));
        } else if constexpr (std::is_same_v<T, TApp>) {
          Variance head;
          if (const TVar* v = std::get_if<TVar>(&n.fn->node))
            head = v->name == var ? Variance::Inv : Variance::Unused;
          else
            head = variance_of(ctx, n.fn, var);
          KindPtr kf = kind_of(ctx, n.fn);
          Variance arg = kf->is_star() ? Variance::Unused // ill-kinded; kind_of reports it
                                       : compose(kf->v, variance_of(ctx, n.arg, var));
          return join(head, arg);
        }
      },
      ty->node);
}

// Check the declared variance markers of a declaration against the inferred
// occurrence variances. For ADTs the declaration must already be registered
// in `ctx` (self-references assume the declared variance); aliases must not
// be registered yet (they may not be recursive).
inline void check_decl_variance(KindingContext& ctx, const AdtDecl& d, const SourceSpan& sp) {
  for (const auto& p : d.params) ctx.push_tyvar(p.name, kstar());
  struct Pop {
    KindingContext& c;
    size_t n;
    ~Pop() {
      for (size_t i = 0; i < n; ++i) c.pop_tyvar();
    }
  } pop{ctx, d.params.size()};
  for (const auto& c : d.ctors) {
    if (!c.arg) continue;
    if (!kind_of(ctx, c.arg)->is_star())
      throw KindError(c.arg->span, "constructor " + c.name + " argument must have kind *");
  }
  for (const auto& p : d.params) {
    Variance occ = Variance::Unused;
    for (const auto& c : d.ctors)
      if (c.arg) occ = join(occ, variance_of(ctx, c.arg, p.name));
    if (!variance_leq(occ, p.variance))
      throw VarianceError(sp, "type parameter '" + p.name + " of " + d.name + " is declared " +
                                  variance_name(p.variance) + " but occurs " + variance_name(occ) +
                                  "ly in its definition");
  }
}

inline void check_decl_variance(KindingContext& ctx, const AliasDecl& d, const SourceSpan& sp) {
  for (const auto& p : d.params) ctx.push_tyvar(p.name, kstar());
  struct Pop {
    KindingContext& c;
    size_t n;
    ~Pop() {
      for (size_t i = 0; i < n; ++i) c.pop_tyvar();
    }
  } pop{ctx, d.params.size()};
  kind_of(ctx, d.body); // validates the body (including inner type-lambdas)
  for (const auto& p : d.params) {
    Variance occ = variance_of(ctx, d.body, p.name);
    if (!variance_leq(occ, p.variance))
      throw VarianceError(sp, "type parameter '" + p.name + " of " + d.name + " is declared " +
                                  variance_name(p.variance) + " but occurs " + variance_name(occ) +
                                  "ly in its definition");
  }
}

} // namespace subwit
