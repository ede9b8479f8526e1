#pragma once

// Core syntax: variances, polarized kinds, types, terms, declarations.
// Types and terms are immutable trees behind shared_ptr; helpers at the
// bottom build nodes and query free type variables.

#include <cassert>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "subwit/source.hpp"

namespace subwit {

// ---------------------------------------------------------------------------
// Variance: four-point lattice  Unused <= Cov, Contra <= Inv.
// Unused only ever arises from inference; it cannot be declared.

enum class Variance : uint8_t { Unused = 0, Cov = 1, Contra = 2, Inv = 3 };

inline const char* variance_name(Variance v) {
  switch (v) {
    case Variance::Unused: return "unused";
    case Variance::Cov: return "covariant";
    case Variance::Contra: return "contravariant";
    case Variance::Inv: return "invariant";
  }
  return "?";
}

// Surface marker: + / - / ! (Unused has no surface form).
inline const char* variance_marker(Variance v) {
  switch (v) {
    case Variance::Cov: return "+";
    case Variance::Contra: return "-";
    case Variance::Inv: return "!";
    case Variance::Unused: return "";
  }
  return "";
}

// Flip a variance (used when passing under a contravariant position).
inline Variance neg(Variance v) {
  switch (v) {
    case Variance::Cov: return Variance::Contra;
    case Variance::Contra: return Variance::Cov;
    default: return v; // Unused and Inv are self-inverse
  }
}

// Least upper bound in the lattice.
inline Variance join(Variance a, Variance b) {
  if (a == b) return a;
  if (a == Variance::Unused) return b;
  if (b == Variance::Unused) return a;
  return Variance::Inv; // Cov vs Contra, or anything vs Inv
}

inline bool variance_leq(Variance a, Variance b) { return join(a, b) == b; }

// ---------------------------------------------------------------------------
// Kinds: * or (v k1 -> k2) where v is the parameter variance.

struct Kind;
using KindPtr = std::shared_ptr<const Kind>;

struct Kind {
  // Star iff !param; Arrow otherwise.
  Variance v = Variance::Cov; // parameter variance (Arrow only)
  KindPtr param;              // null for Star
  KindPtr result;             // null for Star

  bool is_star() const { return param == nullptr; }
};

inline KindPtr kstar() {
  static const KindPtr star = std::make_shared<Kind>();
  return star;
}

inline KindPtr karrow(Variance v, KindPtr param, KindPtr result) {
  auto k = std::make_shared<Kind>();
  k->v = v;
  k->param = std::move(param);
  k->result = std::move(result);
  return k;
}

inline bool kind_equal(const KindPtr& a, const KindPtr& b) {
  if (a->is_star() || b->is_star()) return a->is_star() && b->is_star();
  return a->v == b->v && kind_equal(a->param, b->param) && kind_equal(a->result, b->result);
}

inline std::string kind_to_string(const KindPtr& k) {
  if (k->is_star()) return "*";
  return std::string("(") + variance_marker(k->v) + " " + kind_to_string(k->param) + " -> " +
         kind_to_string(k->result) + ")";
}

// ---------------------------------------------------------------------------
// Types.

struct Type;
using TypePtr = std::shared_ptr<const Type>;

enum class BaseType : uint8_t { Int, Bool, Unit, String, Exn };

inline const char* base_type_name(BaseType b) {
  switch (b) {
    case BaseType::Int: return "int";
    case BaseType::Bool: return "bool";
    case BaseType::Unit: return "unit";
    case BaseType::String: return "string";
    case BaseType::Exn: return "exn";
  }
  return "?";
}

struct TVar {
  std::string name; // without the leading quote
};
struct TBase {
  BaseType base;
};
struct TArrow {
  TypePtr dom, cod;
};
struct TField; // fwd
struct TRecord {
  std::vector<TField> fields; // source order preserved; comparison sorts
};
// A named constructor applied to arguments. Before resolution this may be an
// ADT or an alias; normalization expands aliases, so in normal forms a TNamed
// head is always an ADT.
struct TNamed {
  std::string name;
  std::vector<TypePtr> args;
};
struct TRef {
  TypePtr cell;
};
struct TForall {
  std::string var;
  KindPtr kind;
  TypePtr body;
};
struct TExists {
  std::string var;
  KindPtr kind;
  TypePtr body;
};
struct TLam {
  std::string var;
  std::optional<Variance> v; // declared marker; filled in by normalization
  KindPtr kind;
  TypePtr body;
};
struct TApp {
  TypePtr fn, arg;
};

using TypeNode = std::variant<TVar, TBase, TArrow, TRecord, TNamed, TRef, TForall, TExists, TLam, TApp>;

struct Type {
  SourceSpan span;
  TypeNode node;
};

struct TField {
  std::string label;
  TypePtr type;
};

inline TypePtr mk_type(TypeNode n, SourceSpan sp = {}) {
  auto t = std::make_shared<Type>();
  t->span = std::move(sp);
  t->node = std::move(n);
  return t;
}

inline TypePtr t_var(std::string n, SourceSpan sp = {}) { return mk_type(TVar{std::move(n)}, std::move(sp)); }
inline TypePtr t_base(BaseType b, SourceSpan sp = {}) { return mk_type(TBase{b}, std::move(sp)); }
inline TypePtr t_int() { return t_base(BaseType::Int); }
inline TypePtr t_bool() { return t_base(BaseType::Bool); }
inline TypePtr t_unit() { return t_base(BaseType::Unit); }
inline TypePtr t_string() { return t_base(BaseType::String); }
inline TypePtr t_exn() { return t_base(BaseType::Exn); }
inline TypePtr t_arrow(TypePtr d, TypePtr c, SourceSpan sp = {}) {
  return mk_type(TArrow{std::move(d), std::move(c)}, std::move(sp));
}
inline TypePtr t_record(std::vector<TField> fs, SourceSpan sp = {}) {
  return mk_type(TRecord{std::move(fs)}, std::move(sp));
}
inline TypePtr t_named(std::string n, std::vector<TypePtr> args = {}, SourceSpan sp = {}) {
  return mk_type(TNamed{std::move(n), std::move(args)}, std::move(sp));
}
inline TypePtr t_ref(TypePtr c, SourceSpan sp = {}) { return mk_type(TRef{std::move(c)}, std::move(sp)); }
inline TypePtr t_forall(std::string v, KindPtr k, TypePtr b, SourceSpan sp = {}) {
  return mk_type(TForall{std::move(v), std::move(k), std::move(b)}, std::move(sp));
}
inline TypePtr t_exists(std::string v, KindPtr k, TypePtr b, SourceSpan sp = {}) {
  return mk_type(TExists{std::move(v), std::move(k), std::move(b)}, std::move(sp));
}
inline TypePtr t_lam(std::string v, std::optional<Variance> var, KindPtr k, TypePtr b, SourceSpan sp = {}) {
  return mk_type(TLam{std::move(v), var, std::move(k), std::move(b)}, std::move(sp));
}
inline TypePtr t_app(TypePtr f, TypePtr a, SourceSpan sp = {}) {
  return mk_type(TApp{std::move(f), std::move(a)}, std::move(sp));
}

// Free type variables of a type.
inline void free_type_vars(const TypePtr& t, std::set<std::string>& out) {
  struct V {
    std::set<std::string>& out;
    void go(const TypePtr& t) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TVar>) {
              out.insert(n.name);
            } else if constexpr (std::is_same_v<T, TBase>) {
            } else if constexpr (std::is_same_v<T, TArrow>) {
              go(n.dom);
              go(n.cod);
            } else if constexpr (std::is_same_v<T, TRecord>) {
              for (const auto& f : n.fields) go(f.type);
            } else if constexpr (std::is_same_v<T, TNamed>) {
              for (const auto& a : n.args) go(a);
            } else if constexpr (std::is_same_v<T, TRef>) {
              go(n.cell);
            } else if constexpr (std::is_same_v<T, TForall>) {
              bound(n.var, n.body);
            } else if constexpr (std::is_same_v<T, TExists>) {
              bound(n.var, n.body);
            } else if constexpr (std::is_same_v<T, TLam>) {
              bound(n.var, n.body);
            } else if constexpr (std::is_same_v<T, TApp>) {
              go(n.fn);
              go(n.arg);
            }
          },
          t->node);
    }
    void bound(const std::string& v, const TypePtr& body) {
      std::set<std::string> inner;
      V{inner}.go(body);
      inner.erase(v);
      out.insert(inner.begin(), inner.end());
    }
  };
  V{out}.go(t);
}

inline std::set<std::string> free_type_vars(const TypePtr& t) {
  std::set<std::string> s;
  free_type_vars(t, s);
  return s;
}

// ---------------------------------------------------------------------------
// Terms.

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct EVar {
  std::string name;
};
struct EIntLit {
  long long value = 0;
};
struct EBoolLit {
  bool value = false;
};
struct EUnitLit {};
struct EStringLit {
  std::string value;
};
struct ELam {
  std::string param;
  TypePtr ann; // parameter annotation (required by the surface grammar)
  TermPtr body;
};
struct EApp {
  TermPtr fn, arg;
};
struct ETyAbs {
  std::string var;
  KindPtr kind;
  TermPtr body;
};
struct ETyApp {
  TermPtr fn;
  TypePtr arg;
};
struct ELet {
  bool is_rec = false;
  std::string name;
  TypePtr ann; // may be null
  TermPtr bound;
  TermPtr body;
};
struct EFieldInit; // fwd
struct ERecord {
  std::vector<EFieldInit> fields;
};
struct EProj {
  TermPtr subject;
  std::string label;
};
struct EPack {
  TypePtr witness;
  TermPtr payload;
  TypePtr as_type;
};
struct EUnpack {
  std::string tyvar;
  std::string var;
  TermPtr packed;
  TermPtr body;
};
struct EConstruct {
  std::string ctor;
  TermPtr arg; // null for nullary constructors
};
struct EArm; // fwd
struct EMatch {
  TermPtr scrutinee;
  std::vector<EArm> arms;
};
struct ERefNew {
  TermPtr init;
};
struct EDeref {
  TermPtr subject;
};
struct EAssign {
  TermPtr target, value;
};
struct ECoerce {
  TermPtr subject;
  TypePtr target;
};
struct ERaise {
  TermPtr payload;
  TypePtr target; // null unless written as `raise [T] e`
};
struct ETry {
  TermPtr body;
  std::string binder;
  TermPtr handler;
};
struct ESeq {
  TermPtr first, second;
};
// Internal node used to implement builtins; not produced by the parser.
struct EPrim {
  std::string prim;
  std::vector<TermPtr> args;
};

using TermNode = std::variant<EVar, EIntLit, EBoolLit, EUnitLit, EStringLit, ELam, EApp, ETyAbs, ETyApp, ELet,
                              ERecord, EProj, EPack, EUnpack, EConstruct, EMatch, ERefNew, EDeref, EAssign,
                              ECoerce, ERaise, ETry, ESeq, EPrim>;

struct Term {
  SourceSpan span;
  TermNode node;
};

struct EFieldInit {
  std::string label;
  TermPtr value;
};

struct EArm {
  std::string ctor;
  std::optional<std::string> binder; // absent for nullary constructor arms
  TermPtr body;
};

inline TermPtr mk_term(TermNode n, SourceSpan sp = {}) {
  auto t = std::make_shared<Term>();
  t->span = std::move(sp);
  t->node = std::move(n);
  return t;
}

inline TermPtr e_var(std::string n, SourceSpan sp = {}) { return mk_term(EVar{std::move(n)}, std::move(sp)); }
inline TermPtr e_int(long long v) { return mk_term(EIntLit{v}); }
inline TermPtr e_bool(bool v) { return mk_term(EBoolLit{v}); }
inline TermPtr e_unit() { return mk_term(EUnitLit{}); }
inline TermPtr e_string(std::string s) { return mk_term(EStringLit{std::move(s)}); }
inline TermPtr e_lam(std::string p, TypePtr ann, TermPtr body, SourceSpan sp = {}) {
  return mk_term(ELam{std::move(p), std::move(ann), std::move(body)}, std::move(sp));
}
inline TermPtr e_app(TermPtr f, TermPtr a, SourceSpan sp = {}) {
  return mk_term(EApp{std::move(f), std::move(a)}, std::move(sp));
}

// ---------------------------------------------------------------------------
// Declarations and programs.

struct TypeParam {
  std::string name;
  Variance variance = Variance::Inv; // declared marker (required on decls)
};

struct CtorDef {
  std::string name;
  TypePtr arg; // null for nullary constructors
};

struct AdtDecl {
  std::string name;
  std::vector<TypeParam> params;
  std::vector<CtorDef> ctors;
};

struct AliasDecl {
  std::string name;
  std::vector<TypeParam> params;
  TypePtr body;
};

struct TermDecl {
  bool is_rec = false;
  std::string name;
  TypePtr ann; // may be null
  TermPtr body;
};

struct Decl {
  SourceSpan span;
  std::variant<AdtDecl, AliasDecl, TermDecl> node;
};

struct Prog {
  std::vector<Decl> decls;
};

} // namespace subwit
