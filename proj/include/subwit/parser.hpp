#pragma once

// Lexer and recursive-descent parser for the surface syntax.
//
// Declarations:  type ('a+,'b-) name = <type-or-ctors> ;   let [rec] x [: T] = e ;
// Types:         'a | int|bool|unit|string|exn | T -> T | {l: T; ...}
//                | name T...  | 'v T... (prefix application) | ref T | T ref
//                | all 'a::K. T | exists 'a::K. T | \'a[+-!]::K. T | (T)
// Kinds:         * | ([+-!] K -> K)
// Terms:         x | literals | fun (x: T) -> e | e e | Fun 'a::K -> e | e [T]
//                | {l = e; ...} | e.l | pack [T, e] as T | unpack e as ('a, x) in e
//                | Ctor e | match e with | C x -> e ... | ref e | !e | e := e
//                | (e :> T) | let [rec] x [: T] = e in e | raise [T] e
//                | try e with x -> e | e; e | (e)

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "subwit/ast.hpp"
#include "subwit/source.hpp"

namespace subwit {

namespace lex {

enum class TokKind { Ident, UIdent, TyVar, Int, String, Kw, Punct, Eof };

struct Token {
  TokKind kind = TokKind::Eof;
  std::string text;
  long long int_value = 0;
  std::string string_value;
  SourceSpan span;

  bool is_kw(const char* k) const { return kind == TokKind::Kw && text == k; }
  bool is_punct(const char* p) const { return kind == TokKind::Punct && text == p; }
};

inline bool is_keyword(const std::string& s) {
  static const char* kws[] = {"type", "all", "exists", "fun",  "Fun",    "let",  "rec",  "in",
                              "match", "with", "pack",  "unpack", "as",  "ref",    "raise", "try",
                              "of",    "int",  "bool",  "unit",   "string", "exn", "true", "false"};
  for (const char* k : kws)
    if (s == k) return true;
  return false;
}

class Lexer {
 public:
  Lexer(std::string src, std::string file) : src_(std::move(src)), file_(std::move(file)) { tokenize(); }

  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(SourceSpan{file_, {line_, col_}, {line_, col_}}, msg);
  }

  char peek(size_t off = 0) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '(' && peek(1) == '*') {
        int start_line = line_, start_col = col_;
        advance();
        advance();
        int depth = 1;
        while (depth > 0) {
          if (pos_ >= src_.size())
            throw ParseError(SourceSpan{file_, {start_line, start_col}, {line_, col_}},
                             "unterminated comment");
          if (peek() == '(' && peek(1) == '*') {
            advance();
            advance();
            ++depth;
          } else if (peek() == '*' && peek(1) == ')') {
            advance();
            advance();
            --depth;
          } else {
            advance();
          }
        }
      } else {
        break;
      }
    }
  }

  static bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
  static bool ident_cont(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

  void tokenize() {
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        Token t;
        t.kind = TokKind::Eof;
        t.span = SourceSpan{file_, {line_, col_}, {line_, col_}};
        tokens_.push_back(std::move(t));
        return;
      }
      Token t;
      t.span.file = file_;
      t.span.begin = {line_, col_};
      char c = peek();
      if (c == '\'') {
        advance();
        if (!ident_start(peek())) fail("expected identifier after '");
        std::string name;
        while (ident_cont(peek())) name += advance();
        t.kind = TokKind::TyVar;
        t.text = name;
      } else if (ident_start(c)) {
        std::string name;
        while (ident_cont(peek())) name += advance();
        if (is_keyword(name)) {
          t.kind = TokKind::Kw;
        } else if (std::isupper((unsigned char)name[0])) {
          t.kind = TokKind::UIdent;
        } else {
          t.kind = TokKind::Ident;
        }
        t.text = name;
      } else if (std::isdigit((unsigned char)c)) {
        std::string digits;
        while (std::isdigit((unsigned char)peek())) digits += advance();
        t.kind = TokKind::Int;
        t.text = digits;
        t.int_value = std::stoll(digits);
      } else if (c == '"') {
        advance();
        std::string val;
        for (;;) {
          if (pos_ >= src_.size()) fail("unterminated string literal");
          char d = advance();
          if (d == '"') break;
          if (d == '\\') {
            char e = advance();
            switch (e) {
              case 'n': val += '\n'; break;
              case 't': val += '\t'; break;
              case '\\': val += '\\'; break;
              case '"': val += '"'; break;
              default: fail(std::string("unknown escape \\") + e);
            }
          } else {
            val += d;
          }
        }
        t.kind = TokKind::String;
        t.text = val;
        t.string_value = val;
      } else {
        // punctuation, longest match first
        static const char* two[] = {"::", ":=", ":>", "->"};
        std::string p;
        for (const char* cand : two) {
          if (peek() == cand[0] && peek(1) == cand[1]) {
            p = cand;
            advance();
            advance();
            break;
          }
        }
        if (p.empty()) {
          static const std::string singles = "(){}[];:.,=|\\!+-*";
          if (singles.find(c) == std::string::npos) fail(std::string("unexpected character '") + c + "'");
          p = std::string(1, advance());
        }
        t.kind = TokKind::Punct;
        t.text = p;
      }
      t.span.end = {line_, col_};
      tokens_.push_back(std::move(t));
    }
  }

  std::string src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  std::vector<Token> tokens_;
};

} // namespace lex

class Parser {
 public:
  Parser(std::string src, std::string file) : lexer_(std::move(src), file), file_(std::move(file)) {}

  Prog parse_program() {
    Prog p;
    while (!at_eof()) p.decls.push_back(parse_decl());
    return p;
  }

  // Entry points used by tests and tools.
  TypePtr parse_type_only() {
    TypePtr t = parse_type();
    expect_eof();
    return t;
  }
  TermPtr parse_term_only() {
    TermPtr e = parse_term();
    expect_eof();
    return e;
  }
  KindPtr parse_kind_only() {
    KindPtr k = parse_kind();
    expect_eof();
    return k;
  }

 private:
  using Token = lex::Token;
  using TokKind = lex::TokKind;

  const Token& cur() const { return lexer_.tokens()[idx_]; }
  const Token& peek(size_t off = 1) const {
    size_t i = idx_ + off;
    const auto& ts = lexer_.tokens();
    return i < ts.size() ? ts[i] : ts.back();
  }
  bool at_eof() const { return cur().kind == TokKind::Eof; }
  Token advance() { return lexer_.tokens()[idx_++]; }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(cur().span, msg); }

  void expect_punct(const char* p) {
    if (!cur().is_punct(p)) fail(std::string("expected '") + p + "'");
    advance();
  }
  void expect_kw(const char* k) {
    if (!cur().is_kw(k)) fail(std::string("expected '") + k + "'");
    advance();
  }
  void expect_eof() {
    if (!at_eof()) fail("unexpected trailing input");
  }

  std::string expect_ident() {
    if (cur().kind != TokKind::Ident) fail("expected identifier");
    return advance().text;
  }
  std::string expect_uident() {
    if (cur().kind != TokKind::UIdent) fail("expected constructor name");
    return advance().text;
  }
  std::string expect_tyvar() {
    if (cur().kind != TokKind::TyVar) fail("expected type variable");
    return advance().text;
  }

  std::optional<Variance> try_variance_marker() {
    if (cur().is_punct("+")) {
      advance();
      return Variance::Cov;
    }
    if (cur().is_punct("-")) {
      advance();
      return Variance::Contra;
    }
    if (cur().is_punct("!")) {
      advance();
      return Variance::Inv;
    }
    return std::nullopt;
  }

  static SourceSpan merge(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    s.end = b.end;
    return s;
  }
  SourceSpan prev_end_span(const SourceSpan& start) const {
    return merge(start, lexer_.tokens()[idx_ > 0 ? idx_ - 1 : 0].span);
  }

  // --- kinds ---

  KindPtr parse_kind() {
    if (cur().is_punct("*")) {
      advance();
      return kstar();
    }
    if (cur().is_punct("(")) {
      advance();
      std::optional<Variance> v = try_variance_marker();
      if (!v) fail("expected variance marker (+, - or !) in arrow kind");
      KindPtr param = parse_kind();
      expect_punct("->");
      KindPtr result = parse_kind();
      expect_punct(")");
      return karrow(*v, std::move(param), std::move(result));
    }
    fail("expected kind");
  }

  // --- types ---

  bool starts_type_atom() const {
    const Token& t = cur();
    return t.kind == TokKind::TyVar || t.kind == TokKind::Ident || t.is_punct("{") || t.is_punct("(") ||
           t.is_kw("int") || t.is_kw("bool") || t.is_kw("unit") || t.is_kw("string") || t.is_kw("exn") ||
           t.is_kw("ref");
  }

  TypePtr parse_type() {
    SourceSpan start = cur().span;
    if (cur().is_kw("all") || cur().is_kw("exists")) {
      bool is_all = cur().is_kw("all");
      advance();
      std::string v = expect_tyvar();
      expect_punct("::");
      KindPtr k = parse_kind();
      expect_punct(".");
      TypePtr body = parse_type();
      SourceSpan sp = prev_end_span(start);
      return is_all ? t_forall(v, std::move(k), std::move(body), sp)
                    : t_exists(v, std::move(k), std::move(body), sp);
    }
    if (cur().is_punct("\\")) {
      advance();
      std::string v = expect_tyvar();
      std::optional<Variance> marker = try_variance_marker();
      expect_punct("::");
      KindPtr k = parse_kind();
      expect_punct(".");
      TypePtr body = parse_type();
      return t_lam(v, marker, std::move(k), std::move(body), prev_end_span(start));
    }
    TypePtr t = parse_type_app();
    if (cur().is_punct("->")) {
      advance();
      TypePtr cod = parse_type();
      return t_arrow(std::move(t), std::move(cod), prev_end_span(start));
    }
    return t;
  }

  TypePtr parse_type_app() {
    SourceSpan start = cur().span;
    TypePtr head = parse_type_atom();
    for (;;) {
      if (cur().is_kw("ref")) {
        // Postfix form `T ref`, accepted alongside the canonical `ref T`.
        advance();
        head = t_ref(std::move(head), prev_end_span(start));
        continue;
      }
      if (!starts_type_atom()) break;
      TypePtr arg = parse_type_atom();
      SourceSpan sp = prev_end_span(start);
      if (const TNamed* nm = std::get_if<TNamed>(&head->node)) {
        std::vector<TypePtr> args = nm->args;
        args.push_back(std::move(arg));
        head = t_named(nm->name, std::move(args), sp);
      } else {
        head = t_app(std::move(head), std::move(arg), sp);
      }
    }
    return head;
  }

  TypePtr parse_type_atom() {
    SourceSpan start = cur().span;
    const Token& t = cur();
    if (t.kind == TokKind::TyVar) {
      std::string v = advance().text;
      return t_var(v, start);
    }
    if (t.is_kw("int") || t.is_kw("bool") || t.is_kw("unit") || t.is_kw("string") || t.is_kw("exn")) {
      std::string b = advance().text;
      BaseType bt = b == "int"      ? BaseType::Int
                    : b == "bool"   ? BaseType::Bool
                    : b == "unit"   ? BaseType::Unit
                    : b == "string" ? BaseType::String
                                    : BaseType::Exn;
      return t_base(bt, start);
    }
    if (t.is_kw("ref")) {
      advance();
      TypePtr cell = parse_type_atom();
      return t_ref(std::move(cell), prev_end_span(start));
    }
    if (t.kind == TokKind::Ident) {
      std::string name = advance().text;
      return t_named(name, {}, start);
    }
    if (t.is_punct("{")) {
      advance();
      std::vector<TField> fields;
      if (!cur().is_punct("}")) {
        for (;;) {
          std::string label = expect_ident();
          expect_punct(":");
          TypePtr ft = parse_type();
          fields.push_back({std::move(label), std::move(ft)});
          if (cur().is_punct(";")) {
            advance();
            continue;
          }
          break;
        }
      }
      expect_punct("}");
      return t_record(std::move(fields), prev_end_span(start));
    }
    if (t.is_punct("(")) {
      advance();
      TypePtr inner = parse_type();
      expect_punct(")");
      return inner;
    }
    fail("expected a type");
  }

  // --- terms ---

  bool starts_term_atom() const {
    const Token& t = cur();
    return t.kind == TokKind::Ident || t.kind == TokKind::UIdent || t.kind == TokKind::Int ||
           t.kind == TokKind::String || t.is_kw("true") || t.is_kw("false") || t.is_punct("(") ||
           t.is_punct("{") || t.is_punct("!") || t.is_kw("ref");
  }

  bool starts_prefix_form() const {
    const Token& t = cur();
    return t.is_kw("fun") || t.is_kw("Fun") || t.is_kw("let") || t.is_kw("match") || t.is_kw("try") ||
           t.is_kw("raise") || t.is_kw("pack") || t.is_kw("unpack");
  }

  TermPtr parse_term() { return parse_seq(); }

  TermPtr parse_seq() {
    SourceSpan start = cur().span;
    TermPtr first = parse_assign();
    // `;` doubles as the sequence separator and the declaration terminator.
    // Treat it as a separator only when the rest parses as a term; otherwise
    // leave it for the declaration parser.  The `let` keyword is the one
    // genuinely ambiguous continuation (`let ... in` vs. a new declaration),
    // so this backtracks rather than peeking a single token.
    if (cur().is_punct(";") && starts_term(peek(1))) {
      size_t saved = idx_;
      advance();
      try {
        TermPtr second = parse_seq();
        return mk_term(ESeq{std::move(first), std::move(second)}, prev_end_span(start));
      } catch (const ParseError&) {
        idx_ = saved;
      }
    }
    return first;
  }

  static bool starts_term(const Token& t) {
    switch (t.kind) {
      case TokKind::Ident:
      case TokKind::UIdent:
      case TokKind::Int:
      case TokKind::String:
        return true;
      case TokKind::Punct:
        return t.text == "(" || t.text == "{" || t.text == "!";
      case TokKind::Kw:
        return t.text == "fun" || t.text == "Fun" || t.text == "let" || t.text == "match" || t.text == "try" ||
               t.text == "pack" || t.text == "unpack" || t.text == "ref" || t.text == "raise" || t.text == "true" ||
               t.text == "false";
      default:
        return false;
    }
  }

  TermPtr parse_assign() {
    if (starts_prefix_form()) return parse_prefix();
    SourceSpan start = cur().span;
    TermPtr lhs = parse_app();
    if (cur().is_punct(":=")) {
      advance();
      TermPtr rhs = parse_assign();
      return mk_term(EAssign{std::move(lhs), std::move(rhs)}, prev_end_span(start));
    }
    return lhs;
  }

  TermPtr parse_prefix() {
    SourceSpan start = cur().span;
    if (cur().is_kw("fun")) {
      advance();
      expect_punct("(");
      std::string param = expect_ident();
      expect_punct(":");
      TypePtr ann = parse_type();
      expect_punct(")");
      expect_punct("->");
      TermPtr body = parse_term();
      return e_lam(param, std::move(ann), std::move(body), prev_end_span(start));
    }
    if (cur().is_kw("Fun")) {
      advance();
      std::string v = expect_tyvar();
      expect_punct("::");
      KindPtr k = parse_kind();
      expect_punct("->");
      TermPtr body = parse_term();
      return mk_term(ETyAbs{v, std::move(k), std::move(body)}, prev_end_span(start));
    }
    if (cur().is_kw("let")) {
      advance();
      bool is_rec = false;
      if (cur().is_kw("rec")) {
        advance();
        is_rec = true;
      }
      std::string name = expect_ident();
      TypePtr ann;
      if (cur().is_punct(":")) {
        advance();
        ann = parse_type();
      }
      expect_punct("=");
      TermPtr bound = parse_term();
      expect_kw("in");
      TermPtr body = parse_term();
      return mk_term(ELet{is_rec, name, std::move(ann), std::move(bound), std::move(body)},
                     prev_end_span(start));
    }
    if (cur().is_kw("match")) {
      advance();
      TermPtr scrut = parse_term();
      expect_kw("with");
      std::vector<EArm> arms;
      if (cur().is_punct("|")) advance();
      for (;;) {
        std::string ctor = expect_uident();
        std::optional<std::string> binder;
        if (cur().kind == TokKind::Ident) binder = advance().text;
        expect_punct("->");
        TermPtr body = parse_term();
        arms.push_back({std::move(ctor), std::move(binder), std::move(body)});
        if (cur().is_punct("|")) {
          advance();
          continue;
        }
        break;
      }
      return mk_term(EMatch{std::move(scrut), std::move(arms)}, prev_end_span(start));
    }
    if (cur().is_kw("try")) {
      advance();
      TermPtr body = parse_term();
      expect_kw("with");
      std::string binder = expect_ident();
      expect_punct("->");
      TermPtr handler = parse_term();
      return mk_term(ETry{std::move(body), std::move(binder), std::move(handler)}, prev_end_span(start));
    }
    if (cur().is_kw("raise")) {
      advance();
      TypePtr target;
      if (cur().is_punct("[")) {
        advance();
        target = parse_type();
        expect_punct("]");
      }
      TermPtr payload = parse_app();
      return mk_term(ERaise{std::move(payload), std::move(target)}, prev_end_span(start));
    }
    if (cur().is_kw("pack")) {
      advance();
      expect_punct("[");
      TypePtr witness = parse_type();
      expect_punct(",");
      TermPtr payload = parse_term();
      expect_punct("]");
      expect_kw("as");
      TypePtr as_type = parse_type();
      return mk_term(EPack{std::move(witness), std::move(payload), std::move(as_type)},
                     prev_end_span(start));
    }
    if (cur().is_kw("unpack")) {
      advance();
      TermPtr packed = parse_app();
      expect_kw("as");
      expect_punct("(");
      std::string tyvar = expect_tyvar();
      expect_punct(",");
      std::string var = expect_ident();
      expect_punct(")");
      expect_kw("in");
      TermPtr body = parse_term();
      return mk_term(EUnpack{std::move(tyvar), std::move(var), std::move(packed), std::move(body)},
                     prev_end_span(start));
    }
    fail("expected a term");
  }

  TermPtr parse_app() {
    SourceSpan start = cur().span;
    TermPtr head = parse_postfix();
    for (;;) {
      if (!starts_term_atom()) break;
      TermPtr arg = parse_postfix();
      SourceSpan sp = prev_end_span(start);
      // A bare constructor takes its single argument directly.
      if (const EConstruct* c = std::get_if<EConstruct>(&head->node); c && !c->arg) {
        head = mk_term(EConstruct{c->ctor, std::move(arg)}, sp);
      } else {
        head = e_app(std::move(head), std::move(arg), sp);
      }
    }
    return head;
  }

  TermPtr parse_postfix() {
    SourceSpan start = cur().span;
    TermPtr e = parse_atom();
    for (;;) {
      if (cur().is_punct(".")) {
        advance();
        std::string label = expect_ident();
        e = mk_term(EProj{std::move(e), std::move(label)}, prev_end_span(start));
        continue;
      }
      if (cur().is_punct("[")) {
        advance();
        TypePtr arg = parse_type();
        expect_punct("]");
        e = mk_term(ETyApp{std::move(e), std::move(arg)}, prev_end_span(start));
        continue;
      }
      break;
    }
    return e;
  }

  TermPtr parse_atom() {
    SourceSpan start = cur().span;
    const Token& t = cur();
    if (t.kind == TokKind::Ident) return e_var(advance().text, start);
    if (t.kind == TokKind::UIdent) {
      std::string ctor = advance().text;
      return mk_term(EConstruct{std::move(ctor), nullptr}, start);
    }
    if (t.kind == TokKind::Int) {
      long long v = advance().int_value;
      return mk_term(EIntLit{v}, start);
    }
    if (t.kind == TokKind::String) {
      std::string s = advance().string_value;
      return mk_term(EStringLit{std::move(s)}, start);
    }
    if (t.is_kw("true") || t.is_kw("false")) {
      bool v = advance().text == "true";
      return mk_term(EBoolLit{v}, start);
    }
    if (t.is_punct("!")) {
      advance();
      TermPtr subject = parse_postfix();
      return mk_term(EDeref{std::move(subject)}, prev_end_span(start));
    }
    if (t.is_kw("ref")) {
      advance();
      TermPtr init = parse_postfix();
      return mk_term(ERefNew{std::move(init)}, prev_end_span(start));
    }
    if (t.is_punct("{")) {
      advance();
      std::vector<EFieldInit> fields;
      if (!cur().is_punct("}")) {
        for (;;) {
          std::string label = expect_ident();
          expect_punct("=");
          // One level below sequencing: `;` separates fields, so a sequence
          // used as a field value needs parentheses.
          TermPtr value = parse_assign();
          fields.push_back({std::move(label), std::move(value)});
          if (cur().is_punct(";")) {
            advance();
            continue;
          }
          break;
        }
      }
      expect_punct("}");
      return mk_term(ERecord{std::move(fields)}, prev_end_span(start));
    }
    if (t.is_punct("(")) {
      advance();
      if (cur().is_punct(")")) {
        advance();
        return mk_term(EUnitLit{}, prev_end_span(start));
      }
      TermPtr inner = parse_term();
      if (cur().is_punct(":>")) {
        advance();
        TypePtr target = parse_type();
        expect_punct(")");
        return mk_term(ECoerce{std::move(inner), std::move(target)}, prev_end_span(start));
      }
      expect_punct(")");
      return inner;
    }
    fail("expected a term");
  }

  // --- declarations ---

  Decl parse_decl() {
    SourceSpan start = cur().span;
    if (cur().is_kw("type")) {
      advance();
      std::vector<TypeParam> params;
      if (cur().is_punct("(")) {
        advance();
        for (;;) {
          std::string v = expect_tyvar();
          std::optional<Variance> marker = try_variance_marker();
          if (!marker) fail("declared type parameters require a variance marker (+, - or !)");
          params.push_back({std::move(v), *marker});
          if (cur().is_punct(",")) {
            advance();
            continue;
          }
          break;
        }
        expect_punct(")");
      }
      std::string name = expect_ident();
      expect_punct("=");
      if (cur().is_punct("|") || cur().kind == TokKind::UIdent) {
        // ADT: constructor alternatives.
        if (cur().is_punct("|")) advance();
        std::vector<CtorDef> ctors;
        for (;;) {
          std::string cname = expect_uident();
          TypePtr arg;
          if (cur().is_kw("of")) {
            advance();
            arg = parse_type();
          }
          ctors.push_back({std::move(cname), std::move(arg)});
          if (cur().is_punct("|")) {
            advance();
            continue;
          }
          break;
        }
        expect_punct(";");
        return Decl{prev_end_span(start), AdtDecl{std::move(name), std::move(params), std::move(ctors)}};
      }
      TypePtr body = parse_type();
      expect_punct(";");
      return Decl{prev_end_span(start), AliasDecl{std::move(name), std::move(params), std::move(body)}};
    }
    if (cur().is_kw("let")) {
      advance();
      bool is_rec = false;
      if (cur().is_kw("rec")) {
        advance();
        is_rec = true;
      }
      std::string name = expect_ident();
      TypePtr ann;
      if (cur().is_punct(":")) {
        advance();
        ann = parse_type();
      }
      expect_punct("=");
      TermPtr body = parse_term();
      expect_punct(";");
      return Decl{prev_end_span(start), TermDecl{is_rec, std::move(name), std::move(ann), std::move(body)}};
    }
    fail("expected a declaration");
  }

  lex::Lexer lexer_;
  std::string file_;
  size_t idx_ = 0;
};

inline Prog parse_program(const std::string& src, const std::string& file) {
  Parser p(src, file);
  return p.parse_program();
}

inline TypePtr parse_type_string(const std::string& src, const std::string& file = "<type>") {
  Parser p(src, file);
  return p.parse_type_only();
}

inline TermPtr parse_term_string(const std::string& src, const std::string& file = "<term>") {
  Parser p(src, file);
  return p.parse_term_only();
}

inline KindPtr parse_kind_string(const std::string& src, const std::string& file = "<kind>") {
  Parser p(src, file);
  return p.parse_kind_only();
}

} // namespace subwit
