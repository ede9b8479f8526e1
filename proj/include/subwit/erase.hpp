// Coercion erasure: rewrite a term so that no coercion remains, either as a
// cast node or as a fully applied use of the library function `coerce`.
// Running the stripped program must produce the same transcript and outcome
// as the original — that is the sense in which subtyping casts are free.
//
// The stripped term is generally *not* well-typed (the very point of a cast
// is to change a type); it is meant for the untyped evaluator only.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "subwit/ast.hpp"

namespace subwit {

inline TermPtr strip_coercions(const TermPtr& e);

namespace detail {

// Matches `coerce [A] [B] x w` — two type instantiations, then the coerced
// value, then the witness — and returns the value, or null when `e` is not
// such an application.  The library's coercion functions all share this shape
// and this argument order; the dropped witness expressions are pure.
inline bool is_coercion_fn_name(const std::string& name) {
  return name == "coerce" || name == "coerce_n" || name == "coerce_p" || name == "coerce_c";
}

inline TermPtr coerce_application_payload(const TermPtr& e) {
  const EApp* outer = std::get_if<EApp>(&e->node);
  if (outer == nullptr) return nullptr;
  const EApp* inner = std::get_if<EApp>(&outer->fn->node);
  if (inner == nullptr) return nullptr;
  const ETyApp* ty2 = std::get_if<ETyApp>(&inner->fn->node);
  if (ty2 == nullptr) return nullptr;
  const ETyApp* ty1 = std::get_if<ETyApp>(&ty2->fn->node);
  if (ty1 == nullptr) return nullptr;
  const EVar* head = std::get_if<EVar>(&ty1->fn->node);
  if (head == nullptr || !is_coercion_fn_name(head->name)) return nullptr;
  return inner->arg;
}

} // namespace detail

inline TermPtr strip_coercions(const TermPtr& e) {
  if (e == nullptr) return nullptr;
  if (const ECoerce* c = std::get_if<ECoerce>(&e->node)) return strip_coercions(c->subject);
  if (TermPtr payload = detail::coerce_application_payload(e)) return strip_coercions(payload);
  auto rebuilt = std::visit(
      [&](const auto& n) -> TermNode {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, EVar> || std::is_same_v<N, EIntLit> || std::is_same_v<N, EBoolLit> ||
                      std::is_same_v<N, EUnitLit> || std::is_same_v<N, EStringLit>) {
          return n;
        } else if constexpr (std::is_same_v<N, ELam>) {
          return ELam{n.param, n.ann, strip_coercions(n.body)};
        } else if constexpr (std::is_same_v<N, EApp>) {
          return EApp{strip_coercions(n.fn), strip_coercions(n.arg)};
        } else if constexpr (std::is_same_v<N, ETyAbs>) {
          return ETyAbs{n.var, n.kind, strip_coercions(n.body)};
        } else if constexpr (std::is_same_v<N, ETyApp>) {
          return ETyApp{strip_coercions(n.fn), n.arg};
        } else if constexpr (std::is_same_v<N, ELet>) {
          return ELet{n.is_rec, n.name, n.ann, strip_coercions(n.bound), strip_coercions(n.body)};
        } else if constexpr (std::is_same_v<N, ERecord>) {
          ERecord r;
          r.fields.reserve(n.fields.size());
          for (const EFieldInit& f : n.fields) r.fields.push_back(EFieldInit{f.label, strip_coercions(f.value)});
          return r;
        } else if constexpr (std::is_same_v<N, EProj>) {
          return EProj{strip_coercions(n.subject), n.label};
        } else if constexpr (std::is_same_v<N, EPack>) {
          return EPack{n.witness, strip_coercions(n.payload), n.as_type};
        } else if constexpr (std::is_same_v<N, EUnpack>) {
          return EUnpack{n.tyvar, n.var, strip_coercions(n.packed), strip_coercions(n.body)};
        } else if constexpr (std::is_same_v<N, EConstruct>) {
          return EConstruct{n.ctor, strip_coercions(n.arg)};
        } else if constexpr (std::is_same_v<N, EMatch>) {
          EMatch m;
          m.scrutinee = strip_coercions(n.scrutinee);
          m.arms.reserve(n.arms.size());
          for (const EArm& a : n.arms) m.arms.push_back(EArm{a.ctor, a.binder, strip_coercions(a.body)});
          return m;
        } else if constexpr (std::is_same_v<N, ERefNew>) {
          return ERefNew{strip_coercions(n.init)};
        } else if constexpr (std::is_same_v<N, EDeref>) {
          return EDeref{strip_coercions(n.subject)};
        } else if constexpr (std::is_same_v<N, EAssign>) {
          return EAssign{strip_coercions(n.target), strip_coercions(n.value)};
        } else if constexpr (std::is_same_v<N, ERaise>) {
          return ERaise{strip_coercions(n.payload), n.target};
        } else if constexpr (std::is_same_v<N, ETry>) {
          return ETry{strip_coercions(n.body), n.binder, strip_coercions(n.handler)};
        } else if constexpr (std::is_same_v<N, ESeq>) {
          return ESeq{strip_coercions(n.first), strip_coercions(n.second)};
        } else if constexpr (std::is_same_v<N, EPrim>) {
          EPrim p;
          p.prim = n.prim;
          p.args.reserve(n.args.size());
          for (const TermPtr& a : n.args) p.args.push_back(strip_coercions(a));
          return p;
        } else {
          static_assert(std::is_same_v<N, ECoerce>, "unhandled term node in strip_coercions");
          return EVar{"unreachable"};
        }
      },
      e->node);
  return mk_term(std::move(rebuilt), e->span);
}

// Strips every term declaration in a program; type declarations pass through.
inline Prog strip_coercions(const Prog& p) {
  Prog out;
  out.decls.reserve(p.decls.size());
  for (const Decl& d : p.decls) {
    if (const TermDecl* td = std::get_if<TermDecl>(&d.node)) {
      Decl nd;
      nd.span = d.span;
      nd.node = TermDecl{td->is_rec, td->name, td->ann, strip_coercions(td->body)};
      out.decls.push_back(std::move(nd));
    } else {
      out.decls.push_back(d);
    }
  }
  return out;
}

} // namespace subwit
