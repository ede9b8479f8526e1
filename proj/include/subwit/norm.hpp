#pragma once

// Substitution, alpha-equality and normalization of types.
//
// Normal forms contain no alias references and no beta redexes: aliases are
// expanded (eta-wrapping unapplied parameters as type-lambdas, so aliases can
// be passed around as constructors), and type-lambda applications are
// reduced. Unannotated type-lambda binders get their inferred variance filled
// in, so normalized types can be compared structurally.

#include <algorithm>
#include <set>
#include <string>

#include "subwit/ast.hpp"
#include "subwit/context.hpp"
#include "subwit/kinds.hpp"

namespace subwit {

// Smallest `base`+suffix not in `avoid`; deterministic.
inline std::string fresh_type_var(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// Capture-avoiding substitution of `rep` for free occurrences of 'var.
inline TypePtr subst_type(const TypePtr& ty, const std::string& var, const TypePtr& rep) {
  std::set<std::string> fv_ty = free_type_vars(ty);
  if (!fv_ty.count(var)) return ty;
  std::set<std::string> fv_rep = free_type_vars(rep);

  auto subst_binder = [&](const std::string& bv, const KindPtr& k, const TypePtr& body,
                          auto rebuild) -> TypePtr {
    if (bv == var) return ty; // shadowed: nothing to do below
    if (fv_rep.count(bv)) {
      // Binder would capture a free variable of the replacement: rename it.
      std::set<std::string> avoid = fv_rep;
      free_type_vars(body, avoid);
      avoid.insert(var);
      std::string bv2 = fresh_type_var(bv, avoid);
      TypePtr body2 = subst_type(body, bv, t_var(bv2));
      return rebuild(bv2, k, subst_type(body2, var, rep));
    }
    return rebuild(bv, k, subst_type(body, var, rep));
  };

  return std::visit(
      [&](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TVar>) {
          return n.name == var ? rep : ty;
        } else if constexpr (std::is_same_v<T, TBase>) {
          return ty;
        } else if constexpr (std::is_same_v<T, TArrow>) {
          return t_arrow(subst_type(n.dom, var, rep), subst_type(n.cod, var, rep), ty->span);
        } else if constexpr (std::is_same_v<T, TRecord>) {
          std::vector<TField> fs;
          fs.reserve(n.fields.size());
          for (const auto& f : n.fields) fs.push_back({f.label, subst_type(f.type, var, rep)});
          return t_record(std::move(fs), ty->span);
        } else if constexpr (std::is_same_v<T, TNamed>) {
          std::vector<TypePtr> args;
          args.reserve(n.args.size());
          for (const auto& a : n.args) args.push_back(subst_type(a, var, rep));
          return t_named(n.name, std::move(args), ty->span);
        } else if constexpr (std::is_same_v<T, TRef>) {
          return t_ref(subst_type(n.cell, var, rep), ty->span);
        } else if constexpr (std::is_same_v<T, TForall>) {
          return subst_binder(n.var, n.kind, n.body, [&](std::string v, KindPtr k, TypePtr b) {
            return t_forall(std::move(v), std::move(k), std::move(b), ty->span);
          });
        } else if constexpr (std::is_same_v<T, TExists>) {
          return subst_binder(n.var, n.kind, n.body, [&](std::string v, KindPtr k, TypePtr b) {
            return t_exists(std::move(v), std::move(k), std::move(b), ty->span);
          });
        } else if constexpr (std::is_same_v<T, TLam>) {
          auto decl = n.v;
          return subst_binder(n.var, n.kind, n.body, [&](std::string v, KindPtr k, TypePtr b) {
            return t_lam(std::move(v), decl, std::move(k), std::move(b), ty->span);
          });
        } else if constexpr (std::is_same_v<T, TApp>) {
          return t_app(subst_type(n.fn, var, rep), subst_type(n.arg, var, rep), ty->span);
        }
      },
      ty->node);
}

// Simultaneous capture-avoiding substitution: all variables are replaced at
// once, so an earlier replacement is never rewritten by a later binding
// (e.g. instantiating params ('a,'b) with ('b,'c) must not turn 'a into 'c).
// Implemented by renaming every substituted variable to a fresh intermediate
// first; the intermediates cannot collide with anything, so the final
// single-variable substitutions are independent.
inline TypePtr subst_type_many(TypePtr ty,
                               const std::vector<std::pair<std::string, TypePtr>>& subs) {
  if (subs.empty()) return ty;
  if (subs.size() == 1) return subst_type(ty, subs[0].first, subs[0].second);
  std::set<std::string> avoid = free_type_vars(ty);
  for (const auto& [name, rep] : subs) {
    avoid.insert(name);
    free_type_vars(rep, avoid);
  }
  std::vector<std::string> temps;
  temps.reserve(subs.size());
  for (const auto& [name, rep] : subs) {
    std::string tmp = fresh_type_var(name + "_tmp", avoid);
    avoid.insert(tmp);
    temps.push_back(tmp);
    ty = subst_type(ty, name, t_var(tmp));
  }
  for (size_t i = 0; i < subs.size(); ++i) ty = subst_type(ty, temps[i], subs[i].second);
  return ty;
}

namespace detail {

struct AlphaEnv {
  std::vector<std::pair<std::string, std::string>> pairs; // (left binder, right binder)

  bool var_equal(const std::string& a, const std::string& b) const {
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
      if (it->first == a || it->second == b) return it->first == a && it->second == b;
    }
    return a == b; // both free
  }
};

inline bool alpha_equal_rec(const TypePtr& a, const TypePtr& b, AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, TVar>) {
          return env.var_equal(na.name, nb.name);
        } else if constexpr (std::is_same_v<T, TBase>) {
          return na.base == nb.base;
        } else if constexpr (std::is_same_v<T, TArrow>) {
          return alpha_equal_rec(na.dom, nb.dom, env) && alpha_equal_rec(na.cod, nb.cod, env);
        } else if constexpr (std::is_same_v<T, TRecord>) {
          if (na.fields.size() != nb.fields.size()) return false;
          auto fa = na.fields, fb = nb.fields;
          auto by_label = [](const TField& x, const TField& y) { return x.label < y.label; };
          std::sort(fa.begin(), fa.end(), by_label);
          std::sort(fb.begin(), fb.end(), by_label);
          for (size_t i = 0; i < fa.size(); ++i) {
            if (fa[i].label != fb[i].label) return false;
            if (!alpha_equal_rec(fa[i].type, fb[i].type, env)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, TNamed>) {
          if (na.name != nb.name || na.args.size() != nb.args.size()) return false;
          for (size_t i = 0; i < na.args.size(); ++i)
            if (!alpha_equal_rec(na.args[i], nb.args[i], env)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, TRef>) {
          return alpha_equal_rec(na.cell, nb.cell, env);
        } else if constexpr (std::is_same_v<T, TForall> || std::is_same_v<T, TExists>) {
          if (!kind_equal(na.kind, nb.kind)) return false;
          env.pairs.emplace_back(na.var, nb.var);
          bool ok = alpha_equal_rec(na.body, nb.body, env);
          env.pairs.pop_back();
          return ok;
        } else if constexpr (std::is_same_v<T, TLam>) {
          if (na.v != nb.v || !kind_equal(na.kind, nb.kind)) return false;
          env.pairs.emplace_back(na.var, nb.var);
          bool ok = alpha_equal_rec(na.body, nb.body, env);
          env.pairs.pop_back();
          return ok;
        } else if constexpr (std::is_same_v<T, TApp>) {
          return alpha_equal_rec(na.fn, nb.fn, env) && alpha_equal_rec(na.arg, nb.arg, env);
        }
      },
      a->node);
}

} // namespace detail

// Alpha-equality: structural equality up to consistent renaming of bound
// variables, with record fields compared label-wise.
inline bool alpha_equal(const TypePtr& a, const TypePtr& b) {
  detail::AlphaEnv env;
  return detail::alpha_equal_rec(a, b, env);
}

// Full normalization: expand aliases, reduce type-lambda applications,
// resolve unannotated type-lambda binder variances. `ty` must be well-kinded
// in `ctx`. Idempotent; terminates because aliases are acyclic and the type
// language is simply kinded.
inline TypePtr normalize_type(KindingContext& ctx, const TypePtr& ty) {
  return std::visit(
      [&](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TVar> || std::is_same_v<T, TBase>) {
          return ty;
        } else if constexpr (std::is_same_v<T, TArrow>) {
          return t_arrow(normalize_type(ctx, n.dom), normalize_type(ctx, n.cod), ty->span);
        } else if constexpr (std::is_same_v<T, TRecord>) {
          std::vector<TField> fs;
          fs.reserve(n.fields.size());
          for (const auto& f : n.fields) fs.push_back({f.label, normalize_type(ctx, f.type)});
          return t_record(std::move(fs), ty->span);
        } else if constexpr (std::is_same_v<T, TRef>) {
          return t_ref(normalize_type(ctx, n.cell), ty->span);
        } else if constexpr (std::is_same_v<T, TNamed>) {
          if (ctx.find_adt(n.name)) {
            std::vector<TypePtr> args;
            args.reserve(n.args.size());
            for (const auto& a : n.args) args.push_back(normalize_type(ctx, a));
            return t_named(n.name, std::move(args), ty->span);
          }
          const AliasInfo* al = ctx.find_alias(n.name);
          if (!al) throw KindError(ty->span, "unknown type name " + n.name);
          size_t applied = std::min(n.args.size(), al->params.size());
          TypePtr body = al->body;
          // Unapplied parameters become type-lambda binders; freshen them
          // first so argument variables cannot be captured.
          std::vector<TypeParam> remaining(al->params.begin() + applied, al->params.end());
          if (!remaining.empty()) {
            std::set<std::string> avoid;
            for (const auto& a : n.args) free_type_vars(a, avoid);
            for (auto& p : remaining) {
              if (avoid.count(p.name)) {
                std::set<std::string> avoid2 = avoid;
                free_type_vars(body, avoid2);
                std::string p2 = fresh_type_var(p.name, avoid2);
                body = subst_type(body, p.name, t_var(p2));
                p.name = p2;
              }
            }
          }
          std::vector<std::pair<std::string, TypePtr>> inst;
          inst.reserve(applied);
          for (size_t i = 0; i < applied; ++i) inst.emplace_back(al->params[i].name, n.args[i]);
          body = subst_type_many(body, inst);
          for (auto it = remaining.rbegin(); it != remaining.rend(); ++it)
            body = t_lam(it->name, it->variance, kstar(), body, ty->span);
          // Extra arguments (over-applied alias) become ordinary applications.
          for (size_t i = al->params.size(); i < n.args.size(); ++i)
            body = t_app(body, n.args[i], ty->span);
          return normalize_type(ctx, body);
        } else if constexpr (std::is_same_v<T, TForall>) {
          TyVarScope scope(ctx, n.var, n.kind);
          return t_forall(n.var, n.kind, normalize_type(ctx, n.body), ty->span);
        } else if constexpr (std::is_same_v<T, TExists>) {
          TyVarScope scope(ctx, n.var, n.kind);
          return t_exists(n.var, n.kind, normalize_type(ctx, n.body), ty->span);
        } else if constexpr (std::is_same_v<T, TLam>) {
          TypePtr body;
          Variance v;
          {
            TyVarScope scope(ctx, n.var, n.kind);
            body = normalize_type(ctx, n.body);
            if (n.v) {
              v = *n.v;
            } else {
              Variance occ = variance_of(ctx, body, n.var);
              v = occ == Variance::Unused ? Variance::Cov : occ;
            }
          }
          return t_lam(n.var, v, n.kind, body, ty->span);
        } else if constexpr (std::is_same_v<T, TApp>) {
          TypePtr fn = normalize_type(ctx, n.fn);
          TypePtr arg = normalize_type(ctx, n.arg);
          if (const TLam* lam = std::get_if<TLam>(&fn->node))
            return normalize_type(ctx, subst_type(lam->body, lam->var, arg));
          return t_app(fn, arg, ty->span);
        }
      },
      ty->node);
}

} // namespace subwit
