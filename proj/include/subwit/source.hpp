#pragma once

// Source positions, spans and diagnostics shared by every phase.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace subwit {

struct Pos {
  int line = 1; // 1-based
  int col = 1;  // 1-based, in bytes
};

struct SourceSpan {
  std::string file;
  Pos begin;
  Pos end;

  bool known() const { return !file.empty() || begin.line != 1 || begin.col != 1 || end.line != 1 || end.col != 1; }

  std::string to_string() const {
    return file + ":" + std::to_string(begin.line) + ":" + std::to_string(begin.col);
  }
};

// Machine-readable diagnostic codes; these are the `code` field of the JSON
// diagnostics emitted by the CLI.
enum class DiagCode {
  ParseError,
  KindError,
  VarianceError,
  TypeMismatch,
  NotAFunction,
  UnknownName,
  CoercionFailed,
  PackMismatch,
  NonexhaustiveMatch,
  AnnotationRequired,
  IoError,
};

inline const char* diag_code_name(DiagCode c) {
  switch (c) {
    case DiagCode::ParseError: return "parse-error";
    case DiagCode::KindError: return "kind-error";
    case DiagCode::VarianceError: return "variance-error";
    case DiagCode::TypeMismatch: return "mismatch";
    case DiagCode::NotAFunction: return "not-a-function";
    case DiagCode::UnknownName: return "unknown-name";
    case DiagCode::CoercionFailed: return "coercion-failed";
    case DiagCode::PackMismatch: return "pack-mismatch";
    case DiagCode::NonexhaustiveMatch: return "nonexhaustive-match";
    case DiagCode::AnnotationRequired: return "annotation-required";
    case DiagCode::IoError: return "io-error";
  }
  return "unknown";
}

struct Diag {
  SourceSpan span;
  DiagCode code = DiagCode::TypeMismatch;
  std::string message; // may span two lines (reason line indented by 7 spaces)
};

// Base of all front-end failures. Phases throw a subclass; the driver catches
// CompileError and renders the diagnostic.
class CompileError : public std::runtime_error {
 public:
  explicit CompileError(Diag d) : std::runtime_error(d.message), diag_(std::move(d)) {}
  const Diag& diag() const { return diag_; }

 private:
  Diag diag_;
};

class ParseError : public CompileError {
 public:
  ParseError(SourceSpan sp, std::string msg)
      : CompileError(Diag{std::move(sp), DiagCode::ParseError, std::move(msg)}) {}
};

class KindError : public CompileError {
 public:
  KindError(SourceSpan sp, std::string msg)
      : CompileError(Diag{std::move(sp), DiagCode::KindError, std::move(msg)}) {}
};

class VarianceError : public CompileError {
 public:
  VarianceError(SourceSpan sp, std::string msg)
      : CompileError(Diag{std::move(sp), DiagCode::VarianceError, std::move(msg)}) {}
};

class TypeError : public CompileError {
 public:
  TypeError(SourceSpan sp, DiagCode code, std::string msg)
      : CompileError(Diag{std::move(sp), code, std::move(msg)}) {}
};

} // namespace subwit
