#pragma once

// Command-line driver: the check / run / test commands behind the `subwit`
// binary, written against abstract streams so the test suite can exercise
// them in-process.
//
// Exit-code contract (stable for CI):
//   0  success
//   1  semantic failure: a diagnostic, a corpus-test FAIL, or an uncaught
//      object-language exception
//   2  usage, I/O, or parse failure

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subwit/corpus.hpp"
#include "subwit/eval.hpp"
#include "subwit/prelude.hpp"
#include "subwit/source.hpp"
#include "subwit/subtype.hpp"
#include "subwit/typecheck.hpp"

namespace subwit {

enum class Command { Check, Run, Test };

struct CliConfig {
  Command command = Command::Check;
  std::vector<std::string> paths; // files for check/run; manifest path for test
  bool trace_subtype = false;     // print coercion subtype derivations to stderr
  bool count_steps = false;       // run: print main's step count to stderr
  bool json_diagnostics = false;  // print diagnostics as a JSON array on stdout
  bool no_prelude = false;        // do not load the corpus prelude first
};

namespace detail {

// One diagnostic in the machine-readable schema.
inline nlohmann::json diag_to_json(const Diag& d) {
  return nlohmann::json{{"file", d.span.file},
                        {"line", d.span.begin.line},
                        {"col", d.span.begin.col},
                        {"code", diag_code_name(d.code)},
                        {"message", d.message}};
}

inline void emit_human_diag(std::ostream& err, const Diag& d) {
  err << "Error: " << d.message << "\n";
  if (d.span.known()) err << "  --> " << d.span.to_string() << "\n";
}

// Collects diagnostics for one driver invocation and renders them in the
// requested format at the end (JSON mode must emit a single array).
class DiagSink {
 public:
  DiagSink(bool json, std::ostream& out, std::ostream& err) : json_(json), out_(out), err_(err) {}

  void add(const Diag& d) {
    diags_.push_back(d);
    if (!json_) emit_human_diag(err_, d);
  }

  // Prints the JSON array (JSON mode only).  Call exactly once, last.
  void flush() {
    if (!json_) return;
    nlohmann::json arr = nlohmann::json::array();
    for (const Diag& d : diags_) arr.push_back(diag_to_json(d));
    out_ << arr.dump(2) << "\n";
  }

  bool empty() const { return diags_.empty(); }

 private:
  bool json_;
  std::ostream& out_;
  std::ostream& err_;
  std::vector<Diag> diags_;
};

inline void emit_coercion_traces(std::ostream& err, const std::vector<CoercionTrace>& traces) {
  for (const CoercionTrace& t : traces) {
    err << "coercion at " << t.span.to_string() << ": " << type_to_string(t.source) << " :> "
        << type_to_string(t.target) << "\n";
    err << subtype_trace_string(t.result.derivation);
  }
}

// Builds the typing context holding the builtins and (unless suppressed) the
// checked prelude.  Returns false and records a diagnostic on failure;
// `io_or_parse` distinguishes exit code 2 from exit code 1.
inline bool prepare_context(const CliConfig& cfg, TypingContext& ctx, std::vector<PreludeFile>& prelude,
                            DiagSink& sink, bool& io_or_parse) {
  ctx = make_typing_context();
  if (cfg.no_prelude) return true;
  try {
    prelude = load_prelude();
    check_prelude_into(ctx, prelude);
    return true;
  } catch (const CompileError& ce) {
    sink.add(ce.diag());
    io_or_parse = ce.diag().code == DiagCode::ParseError;
    return false;
  } catch (const std::exception& ex) {
    sink.add(Diag{SourceSpan{}, DiagCode::IoError, ex.what()});
    io_or_parse = true;
    return false;
  }
}

// Parses and typechecks one file against a copy of the prelude context.
// Returns 0 / 1 / 2 in the exit-code vocabulary.
inline int check_one(const TypingContext& base, const std::string& path, const CliConfig& cfg, DiagSink& sink,
                     std::ostream& err, Prog* out_prog = nullptr) {
  std::string src;
  try {
    src = read_file(path);
  } catch (const std::exception& ex) {
    sink.add(Diag{SourceSpan{}, DiagCode::IoError, ex.what()});
    return 2;
  }
  try {
    Prog prog = parse_program(src, path);
    TypingContext ctx = base; // per-file isolation
    TypeChecker tc(ctx);
    std::vector<CoercionTrace> traces;
    if (cfg.trace_subtype) tc.set_coercion_trace(&traces);
    tc.check_program(prog);
    if (cfg.trace_subtype) emit_coercion_traces(err, traces);
    if (out_prog != nullptr) *out_prog = std::move(prog);
    return 0;
  } catch (const ParseError& pe) {
    sink.add(pe.diag());
    return 2;
  } catch (const CompileError& ce) {
    sink.add(ce.diag());
    return 1;
  }
}

} // namespace detail

// `subwit check <files...>`: typecheck each file independently against the
// prelude.  Any I/O or parse failure yields 2; otherwise any diagnostic
// yields 1.
inline int cmd_check(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::DiagSink sink(cfg.json_diagnostics, out, err);
  TypingContext base;
  std::vector<PreludeFile> prelude;
  bool io_or_parse = false;
  int worst = 0;
  if (!detail::prepare_context(cfg, base, prelude, sink, io_or_parse)) {
    worst = io_or_parse ? 2 : 1;
  } else {
    for (const std::string& path : cfg.paths) {
      int rc = detail::check_one(base, path, cfg, sink, err);
      worst = std::max(worst, rc);
    }
  }
  sink.flush();
  return worst;
}

// `subwit run <file>`: check, then evaluate the prelude followed by the file.
// The transcript goes to stdout; an uncaught object-language exception prints
// its payload to stderr and yields 1; `--count-steps` prints the step count
// of `main` (and only `main`) to stderr.
inline int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::DiagSink sink(cfg.json_diagnostics, out, err);
  TypingContext base;
  std::vector<PreludeFile> prelude;
  bool io_or_parse = false;
  if (!detail::prepare_context(cfg, base, prelude, sink, io_or_parse)) {
    sink.flush();
    return io_or_parse ? 2 : 1;
  }
  Prog prog;
  int rc = detail::check_one(base, cfg.paths.at(0), cfg, sink, err, &prog);
  sink.flush();
  if (rc != 0) return rc;

  Prog whole = cfg.no_prelude ? Prog{} : prelude_decls(prelude);
  for (const Decl& d : prog.decls) whole.decls.push_back(d);

  Evaluator ev;
  ProgramOutcome result;
  run_with_big_stack([&] { result = ev.eval_program(whole); });
  out << ev.transcript();

  int exit_code = 0;
  if (result.outcome.is_raised()) {
    std::string payload = value_to_string(result.outcome.raised);
    if (const ExnV* x = std::get_if<ExnV>(&result.outcome.raised->node)) payload = x->message;
    err << "Uncaught exception: " << payload << "\n";
    exit_code = 1;
  }
  if (cfg.count_steps) err << result.main_steps.total() << "\n";
  return exit_code;
}

// `subwit test <manifest>`: verify every corpus entry, printing one PASS/FAIL
// line per entry (in manifest order) and a final passed/total summary.
inline int cmd_test(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  CorpusManifest manifest;
  std::string manifest_path = cfg.paths.at(0);
  try {
    manifest = load_manifest(manifest_path);
  } catch (const std::exception& ex) {
    err << "Error: " << ex.what() << "\n";
    return 2;
  }
  std::string corpus_dir = std::filesystem::path(manifest_path).parent_path().string();
  if (corpus_dir.empty()) corpus_dir = ".";

  CorpusReport report = verify_corpus(manifest, corpus_dir);
  for (const EntryReport& r : report.entries) {
    if (r.pass) out << "PASS " << r.entry.path << "\n";
    else out << "FAIL " << r.entry.path << ": " << r.detail << "\n";
  }
  for (const std::string& a : report.missing_anchors)
    out << "FAIL anchor coverage: no entry is tagged \"" << a << "\"\n";
  out << report.passed << "/" << report.entries.size() << "\n";
  return report.ok() ? 0 : 1;
}

inline int run_cli(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  switch (cfg.command) {
    case Command::Check: return cmd_check(cfg, out, err);
    case Command::Run: return cmd_run(cfg, out, err);
    case Command::Test: return cmd_test(cfg, out, err);
  }
  return 2;
}

} // namespace subwit
