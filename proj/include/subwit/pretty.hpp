#pragma once

// Printing of kinds, types, terms and programs. The output is valid surface
// syntax: print followed by parse yields an alpha-equal tree (tested).

#include <functional>
#include <string>

#include "subwit/ast.hpp"

namespace subwit {

namespace detail {

// Type precedence levels: 0 binders/arrows, 1 applications, 2 atoms.
inline void print_type_rec(const TypePtr& t, int min_level, std::string& out);

inline void print_type_paren(const TypePtr& t, int level, int min_level, std::string& out) {
  if (level < min_level) {
    out += "(";
    print_type_rec(t, 0, out);
    out += ")";
  } else {
    print_type_rec(t, 0, out);
  }
}

inline void print_type_rec(const TypePtr& t, int min_level, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TVar>) {
          out += "'" + n.name;
        } else if constexpr (std::is_same_v<T, TBase>) {
          out += base_type_name(n.base);
        } else if constexpr (std::is_same_v<T, TArrow>) {
          if (min_level > 0) out += "(";
          print_type_rec(n.dom, 1, out);
          out += " -> ";
          print_type_rec(n.cod, 0, out);
          if (min_level > 0) out += ")";
        } else if constexpr (std::is_same_v<T, TRecord>) {
          out += "{";
          bool first = true;
          for (const auto& f : n.fields) {
            if (!first) out += "; ";
            first = false;
            out += f.label + ": ";
            print_type_rec(f.type, 0, out);
          }
          out += "}";
        } else if constexpr (std::is_same_v<T, TNamed>) {
          if (n.args.empty()) {
            out += n.name;
          } else {
            if (min_level > 1) out += "(";
            out += n.name;
            for (const auto& a : n.args) {
              out += " ";
              print_type_rec(a, 2, out);
            }
            if (min_level > 1) out += ")";
          }
        } else if constexpr (std::is_same_v<T, TRef>) {
          if (min_level > 1) out += "(";
          out += "ref ";
          print_type_rec(n.cell, 2, out);
          if (min_level > 1) out += ")";
        } else if constexpr (std::is_same_v<T, TForall> || std::is_same_v<T, TExists>) {
          if (min_level > 0) out += "(";
          out += std::is_same_v<T, TForall> ? "all '" : "exists '";
          out += n.var + "::" + kind_to_string(n.kind) + ". ";
          print_type_rec(n.body, 0, out);
          if (min_level > 0) out += ")";
        } else if constexpr (std::is_same_v<T, TLam>) {
          if (min_level > 0) out += "(";
          out += "\\'" + n.var;
          if (n.v) out += variance_marker(*n.v);
          out += "::" + kind_to_string(n.kind) + ". ";
          print_type_rec(n.body, 0, out);
          if (min_level > 0) out += ")";
        } else if constexpr (std::is_same_v<T, TApp>) {
          if (min_level > 1) out += "(";
          print_type_rec(n.fn, 1, out);
          out += " ";
          print_type_rec(n.arg, 2, out);
          if (min_level > 1) out += ")";
        }
      },
      t->node);
}

inline std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      default: out += c;
    }
  }
  out += "\"";
  return out;
}

// Term precedence levels: 0 sequences, 1 control/prefix forms and assignment,
// 3 applications, 4 deref/ref-new, 5 projection/type application, 6 atoms.
// A deref or ref-new operand swallows trailing postfix operators, so postfix
// subjects are printed at level 5 and `(!r).l` keeps its parentheses.
inline void print_term_rec(const TermPtr& e, int min_level, std::string& out);

inline void with_parens(bool need, std::string& out, const std::function<void()>& body) {
  if (need) out += "(";
  body();
  if (need) out += ")";
}

inline void print_term_rec(const TermPtr& e, int min_level, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EVar>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, EIntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, EBoolLit>) {
          out += n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, EUnitLit>) {
          out += "()";
        } else if constexpr (std::is_same_v<T, EStringLit>) {
          out += quote_string(n.value);
        } else if constexpr (std::is_same_v<T, ELam>) {
          with_parens(min_level > 1, out, [&] {
            out += "fun (" + n.param + ": ";
            print_type_rec(n.ann, 0, out);
            out += ") -> ";
            print_term_rec(n.body, 0, out);
          });
        } else if constexpr (std::is_same_v<T, EApp>) {
          with_parens(min_level > 3, out, [&] {
            print_term_rec(n.fn, 3, out);
            out += " ";
            print_term_rec(n.arg, 4, out);
          });
        } else if constexpr (std::is_same_v<T, ETyAbs>) {
          with_parens(min_level > 1, out, [&] {
            out += "Fun '" + n.var + "::" + kind_to_string(n.kind) + " -> ";
            print_term_rec(n.body, 0, out);
          });
        } else if constexpr (std::is_same_v<T, ETyApp>) {
          with_parens(min_level > 5, out, [&] {
            print_term_rec(n.fn, 5, out);
            out += " [";
            print_type_rec(n.arg, 0, out);
            out += "]";
          });
        } else if constexpr (std::is_same_v<T, ELet>) {
          with_parens(min_level > 1, out, [&] {
            out += n.is_rec ? "let rec " : "let ";
            out += n.name;
            if (n.ann) {
              out += ": ";
              print_type_rec(n.ann, 0, out);
            }
            out += " = ";
            print_term_rec(n.bound, 0, out);
            out += " in ";
            print_term_rec(n.body, 0, out);
          });
        } else if constexpr (std::is_same_v<T, ERecord>) {
          out += "{";
          bool first = true;
          for (const auto& f : n.fields) {
            if (!first) out += "; ";
            first = false;
            out += f.label + " = ";
            // Level 2 keeps `;`-separated fields unambiguous: sequences and
            // control forms are parenthesized, applications print bare.
            print_term_rec(f.value, 2, out);
          }
          out += "}";
        } else if constexpr (std::is_same_v<T, EProj>) {
          with_parens(min_level > 5, out, [&] {
            print_term_rec(n.subject, 5, out);
            out += "." + n.label;
          });
        } else if constexpr (std::is_same_v<T, EPack>) {
          with_parens(min_level > 1, out, [&] {
            out += "pack [";
            print_type_rec(n.witness, 0, out);
            out += ", ";
            print_term_rec(n.payload, 0, out);
            out += "] as ";
            print_type_rec(n.as_type, 0, out);
          });
        } else if constexpr (std::is_same_v<T, EUnpack>) {
          with_parens(min_level > 1, out, [&] {
            out += "unpack ";
            print_term_rec(n.packed, 3, out);
            out += " as ('" + n.tyvar + ", " + n.var + ") in ";
            print_term_rec(n.body, 0, out);
          });
        } else if constexpr (std::is_same_v<T, EConstruct>) {
          if (!n.arg) {
            out += n.ctor;
          } else {
            with_parens(min_level > 3, out, [&] {
              out += n.ctor + " ";
              print_term_rec(n.arg, 4, out);
            });
          }
        } else if constexpr (std::is_same_v<T, EMatch>) {
          with_parens(min_level > 1, out, [&] {
            out += "match ";
            print_term_rec(n.scrutinee, 0, out);
            out += " with";
            for (const auto& arm : n.arms) {
              out += " | " + arm.ctor;
              if (arm.binder) out += " " + *arm.binder;
              out += " -> ";
              print_term_rec(arm.body, 0, out);
            }
          });
        } else if constexpr (std::is_same_v<T, ERefNew>) {
          with_parens(min_level > 4, out, [&] {
            out += "ref ";
            print_term_rec(n.init, 4, out);
          });
        } else if constexpr (std::is_same_v<T, EDeref>) {
          with_parens(min_level > 4, out, [&] {
            out += "!";
            print_term_rec(n.subject, 4, out);
          });
        } else if constexpr (std::is_same_v<T, EAssign>) {
          with_parens(min_level > 1, out, [&] {
            print_term_rec(n.target, 3, out);
            out += " := ";
            print_term_rec(n.value, 1, out);
          });
        } else if constexpr (std::is_same_v<T, ECoerce>) {
          out += "(";
          print_term_rec(n.subject, 0, out);
          out += " :> ";
          print_type_rec(n.target, 0, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, ERaise>) {
          with_parens(min_level > 1, out, [&] {
            out += "raise ";
            if (n.target) {
              out += "[";
              print_type_rec(n.target, 0, out);
              out += "] ";
            }
            print_term_rec(n.payload, 4, out);
          });
        } else if constexpr (std::is_same_v<T, ETry>) {
          with_parens(min_level > 1, out, [&] {
            out += "try ";
            print_term_rec(n.body, 0, out);
            out += " with " + n.binder + " -> ";
            print_term_rec(n.handler, 0, out);
          });
        } else if constexpr (std::is_same_v<T, ESeq>) {
          with_parens(min_level > 0, out, [&] {
            print_term_rec(n.first, 1, out);
            out += "; ";
            print_term_rec(n.second, 0, out);
          });
        } else if constexpr (std::is_same_v<T, EPrim>) {
          out += "#" + n.prim; // internal; never re-parsed
        }
      },
      e->node);
}

} // namespace detail

inline std::string type_to_string(const TypePtr& t) {
  std::string out;
  detail::print_type_rec(t, 0, out);
  return out;
}

inline std::string term_to_string(const TermPtr& e) {
  std::string out;
  detail::print_term_rec(e, 0, out);
  return out;
}

inline std::string decl_to_string(const Decl& d) {
  std::string out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AdtDecl> || std::is_same_v<T, AliasDecl>) {
          out += "type ";
          if (!n.params.empty()) {
            out += "(";
            bool first = true;
            for (const auto& p : n.params) {
              if (!first) out += ",";
              first = false;
              out += "'" + p.name + variance_marker(p.variance);
            }
            out += ") ";
          }
          out += n.name + " = ";
          if constexpr (std::is_same_v<T, AdtDecl>) {
            bool first = true;
            for (const auto& c : n.ctors) {
              if (!first) out += " | ";
              first = false;
              out += c.name;
              if (c.arg) {
                out += " of ";
                detail::print_type_rec(c.arg, 0, out);
              }
            }
          } else {
            detail::print_type_rec(n.body, 0, out);
          }
          out += " ;";
        } else if constexpr (std::is_same_v<T, TermDecl>) {
          out += n.is_rec ? "let rec " : "let ";
          out += n.name;
          if (n.ann) {
            out += ": ";
            detail::print_type_rec(n.ann, 0, out);
          }
          out += " = ";
          detail::print_term_rec(n.body, 0, out);
          out += " ;";
        }
      },
      d.node);
  return out;
}

inline std::string program_to_string(const Prog& p) {
  std::string out;
  for (const auto& d : p.decls) {
    out += decl_to_string(d);
    out += "\n";
  }
  return out;
}

} // namespace subwit
