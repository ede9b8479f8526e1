#pragma once

// Corpus manifest handling.
//
// The shipped corpus carries a `manifest.toml` describing every object-language
// source file: the verdict the toolchain must produce for it (`expects`) and an
// anchor tag used for coverage bookkeeping.  `verify_corpus` re-derives every
// verdict and compares golden transcripts, producing a machine-checkable
// report; the CLI `test` command and the test suite both consume it.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subwit/eval.hpp"
#include "subwit/prelude.hpp"
#include "subwit/source.hpp"
#include "subwit/typecheck.hpp"

namespace subwit {

struct ManifestEntry {
  std::string path;    // corpus-relative, forward slashes
  std::string expects; // one of: checks, variance-error, type-error
  std::string anchor;  // coverage tag; free-form
  int line = 0;        // manifest line of the [[entry]] header
};

struct CorpusManifest {
  std::vector<std::string> required_anchors; // every tag here must appear on >=1 entry
  std::vector<ManifestEntry> entries;
};

// ---------------------------------------------------------------------------
// Manifest parsing: the small TOML subset the manifest actually uses —
// comments, `[[entry]]` table-array headers, `key = "string"`, and
// `key = ["a", "b"]` string arrays (single- or multi-line).

namespace detail {

inline std::string manifest_trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Strips a trailing `# comment`, respecting double-quoted strings.
inline std::string manifest_strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"') in_str = !in_str;
    else if (c == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] inline void manifest_fail(const std::string& file, int line, const std::string& msg) {
  throw std::runtime_error(file + ":" + std::to_string(line) + ": " + msg);
}

// Parses one double-quoted string starting at s[i] == '"'; advances i past it.
inline std::string manifest_string_at(const std::string& file, int line, const std::string& s, size_t& i) {
  if (i >= s.size() || s[i] != '"') manifest_fail(file, line, "expected a double-quoted string");
  std::string out;
  for (++i; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') {
      ++i;
      return out;
    }
    if (c == '\\') {
      if (++i >= s.size()) break;
      char e = s[i];
      if (e == 'n') out += '\n';
      else if (e == 't') out += '\t';
      else out += e; // \" \\ and anything else: literal
      continue;
    }
    out += c;
  }
  manifest_fail(file, line, "unterminated string");
}

inline std::vector<std::string> manifest_string_array(const std::string& file, int line, const std::string& s) {
  std::vector<std::string> out;
  size_t i = 0;
  auto skip_ws = [&] { while (i < s.size() && std::isspace((unsigned char)s[i])) ++i; };
  skip_ws();
  if (i >= s.size() || s[i] != '[') manifest_fail(file, line, "expected '['");
  ++i;
  skip_ws();
  if (i < s.size() && s[i] == ']') return out;
  while (true) {
    skip_ws();
    out.push_back(manifest_string_at(file, line, s, i));
    skip_ws();
    if (i < s.size() && s[i] == ',') {
      ++i;
      skip_ws();
      if (i < s.size() && s[i] == ']') break; // trailing comma
      continue;
    }
    break;
  }
  skip_ws();
  if (i >= s.size() || s[i] != ']') manifest_fail(file, line, "expected ']'");
  return out;
}

} // namespace detail

inline bool manifest_expects_valid(const std::string& e) {
  return e == "checks" || e == "variance-error" || e == "type-error";
}

inline CorpusManifest parse_manifest(const std::string& text, const std::string& file) {
  CorpusManifest m;
  ManifestEntry* current = nullptr;

  std::vector<std::pair<int, std::string>> lines; // (line number, logical line)
  {
    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t nl = text.find('\n', pos);
      std::string raw = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
      pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
      ++lineno;
      lines.emplace_back(lineno, detail::manifest_strip_comment(raw));
    }
  }

  for (size_t li = 0; li < lines.size(); ++li) {
    auto [lineno, line] = lines[li];
    std::string t = detail::manifest_trim(line);
    if (t.empty()) continue;
    if (t == "[[entry]]") {
      m.entries.push_back(ManifestEntry{});
      current = &m.entries.back();
      current->line = lineno;
      continue;
    }
    if (t.front() == '[') detail::manifest_fail(file, lineno, "unknown table header " + t);
    size_t eq = t.find('=');
    if (eq == std::string::npos) detail::manifest_fail(file, lineno, "expected key = value");
    std::string key = detail::manifest_trim(t.substr(0, eq));
    std::string value = detail::manifest_trim(t.substr(eq + 1));
    // Multi-line arrays: keep appending lines until the brackets balance.
    if (!value.empty() && value.front() == '[') {
      while (std::count(value.begin(), value.end(), '[') > std::count(value.begin(), value.end(), ']')) {
        if (li + 1 >= lines.size()) detail::manifest_fail(file, lineno, "unterminated array");
        ++li;
        value += " " + detail::manifest_trim(lines[li].second);
      }
    }
    if (current == nullptr) {
      if (key == "required_anchors") {
        m.required_anchors = detail::manifest_string_array(file, lineno, value);
      } else {
        detail::manifest_fail(file, lineno, "unknown top-level key " + key);
      }
      continue;
    }
    size_t vi = 0;
    if (key == "path") current->path = detail::manifest_string_at(file, lineno, value, vi);
    else if (key == "expects") current->expects = detail::manifest_string_at(file, lineno, value, vi);
    else if (key == "anchor") current->anchor = detail::manifest_string_at(file, lineno, value, vi);
    else detail::manifest_fail(file, lineno, "unknown entry key " + key);
  }

  for (const ManifestEntry& e : m.entries) {
    if (e.path.empty()) detail::manifest_fail(file, e.line, "entry is missing path");
    if (!manifest_expects_valid(e.expects))
      detail::manifest_fail(file, e.line, "entry " + e.path + " has invalid expects \"" + e.expects +
                                              "\" (want checks, variance-error, or type-error)");
  }
  return m;
}

inline CorpusManifest load_manifest(const std::string& path) {
  return parse_manifest(read_file(path), path);
}

// ---------------------------------------------------------------------------
// Corpus verification.

struct EntryReport {
  ManifestEntry entry;
  bool pass = false;
  std::string detail; // on failure: what went wrong; on pass: optional note
};

struct CorpusReport {
  std::vector<EntryReport> entries;
  std::vector<std::string> missing_anchors;
  std::size_t passed = 0;
  bool ok() const { return passed == entries.size() && missing_anchors.empty(); }
};

namespace detail {

inline bool diag_is_type_error(DiagCode c) {
  switch (c) {
    case DiagCode::TypeMismatch:
    case DiagCode::NotAFunction:
    case DiagCode::UnknownName:
    case DiagCode::CoercionFailed:
    case DiagCode::PackMismatch:
    case DiagCode::NonexhaustiveMatch:
    case DiagCode::AnnotationRequired:
      return true;
    default:
      return false;
  }
}

// First line of a (possibly multi-line) diagnostic message, for report details.
inline std::string first_line(const std::string& s) {
  size_t nl = s.find('\n');
  return nl == std::string::npos ? s : s.substr(0, nl);
}

} // namespace detail

// The golden transcript sitting next to a demo: `examples/foo.swl` ->
// `examples/foo.expected`.
inline std::string expected_path_for(const std::string& swl_path) {
  std::string p = swl_path;
  const std::string ext = ".swl";
  if (p.size() >= ext.size() && p.compare(p.size() - ext.size(), ext.size(), ext) == 0)
    p.resize(p.size() - ext.size());
  return p + ".expected";
}

// Re-derives the verdict for every manifest entry.
//
// Prelude entries are checked cumulatively: the prelude prefix up to and
// including the entry must typecheck against an otherwise-empty context, so
// the manifest order doubles as a load-order witness.  All other entries are
// checked against the full prelude; entries with a sibling `.expected` file
// are additionally evaluated and their transcript compared byte-exactly.
inline CorpusReport verify_corpus(const CorpusManifest& m, const std::string& corpus_dir) {
  CorpusReport report;
  std::vector<PreludeFile> prelude = load_prelude(corpus_dir);

  for (const ManifestEntry& e : m.entries) {
    EntryReport r;
    r.entry = e;
    try {
      if (e.path.rfind("prelude/", 0) == 0) {
        std::string name = e.path.substr(std::string("prelude/").size());
        std::size_t idx = prelude.size();
        for (std::size_t i = 0; i < prelude.size(); ++i)
          if (prelude[i].name == name) idx = i;
        if (idx == prelude.size()) {
          r.detail = "not a prelude file known to the loader";
        } else if (e.expects != "checks") {
          r.detail = "prelude entries must expect \"checks\"";
        } else {
          TypingContext ctx = make_typing_context();
          check_prelude_into(ctx, prelude, idx + 1);
          r.pass = true;
        }
      } else {
        std::string full = corpus_dir + "/" + e.path;
        Prog prog = parse_program(read_file(full), full);
        TypingContext ctx = make_typing_context();
        check_prelude_into(ctx, prelude);
        try {
          TypeChecker tc(ctx);
          tc.check_program(prog);
          if (e.expects == "checks") {
            r.pass = true;
            // Run-and-compare when a golden transcript ships with the demo.
            std::string golden_path = corpus_dir + "/" + expected_path_for(e.path);
            if (std::filesystem::exists(golden_path)) {
              std::string golden = read_file(golden_path);
              Prog whole = prelude_decls(prelude);
              for (const Decl& d : prog.decls) whole.decls.push_back(d);
              Evaluator ev;
              ProgramOutcome out;
              run_with_big_stack([&] { out = ev.eval_program(whole); });
              if (out.outcome.is_raised()) {
                r.pass = false;
                r.detail = "evaluation raised: " + value_to_string(out.outcome.raised);
              } else if (ev.transcript() != golden) {
                r.pass = false;
                r.detail = "transcript differs from " + expected_path_for(e.path);
              }
            }
          } else {
            r.detail = "expected " + e.expects + " but the file checks";
          }
        } catch (const CompileError& ce) {
          const Diag& d = ce.diag();
          bool matches = (e.expects == "variance-error" && d.code == DiagCode::VarianceError) ||
                         (e.expects == "type-error" && detail::diag_is_type_error(d.code));
          if (matches) {
            r.pass = true;
            r.detail = detail::first_line(d.message);
          } else {
            r.detail = std::string("[") + diag_code_name(d.code) + "] " + detail::first_line(d.message) +
                       (e.expects == "checks" ? "" : " (wanted " + e.expects + ")");
          }
        }
      }
    } catch (const CompileError& ce) {
      // Prelude prefix failed, or the file failed to parse.
      r.detail = std::string("[") + diag_code_name(ce.diag().code) + "] " + detail::first_line(ce.diag().message);
    } catch (const std::exception& ex) {
      r.detail = ex.what();
    }
    if (r.pass) ++report.passed;
    report.entries.push_back(std::move(r));
  }

  std::set<std::string> covered;
  for (const ManifestEntry& e : m.entries)
    if (!e.anchor.empty()) covered.insert(e.anchor);
  for (const std::string& a : m.required_anchors)
    if (!covered.count(a)) report.missing_anchors.push_back(a);

  return report;
}

} // namespace subwit
