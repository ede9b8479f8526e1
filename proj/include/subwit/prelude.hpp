#pragma once

// Prelude loading.  The prelude is a fixed, ordered list of source files in
// the corpus directory; later files may use names declared by earlier ones.
// Programs are checked and run with the whole prelude loaded first unless
// that is explicitly disabled.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subwit/ast.hpp"
#include "subwit/eval.hpp"
#include "subwit/parser.hpp"
#include "subwit/typecheck.hpp"

namespace subwit {

// Prelude files in load order.  Each file only depends on earlier entries.
inline const std::vector<std::string>& prelude_file_order() {
  static const std::vector<std::string> order = {
      "fig1_contexts.swl", "sub_neg.swl", "sub_pos.swl",  "sub_church.swl", "sub_ops.swl",
      "church_nat.swl",    "eq_leibniz.swl", "lzy.swl",   "covlzy.swl",     "lzy_hof.swl",
      "arr.swl",           "abstract_demo.swl", "bounded.swl", "variance_proof.swl",
  };
  return order;
}

// Resolves the corpus directory: an explicit override wins, then the
// SUBWIT_CORPUS_DIR environment variable, then the build-time default.
inline std::string corpus_dir(const std::string& override_dir = "") {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("SUBWIT_CORPUS_DIR"); env && *env) return env;
#ifdef SUBWIT_DEFAULT_CORPUS_DIR
  return SUBWIT_DEFAULT_CORPUS_DIR;
#else
  return "corpus";
#endif
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PreludeFile {
  std::string name; // file name within the prelude directory
  std::string path; // full path it was loaded from
  Prog prog;
};

// Parses every prelude file in order.  Parse errors propagate as ParseError.
inline std::vector<PreludeFile> load_prelude(const std::string& dir = "") {
  std::string base = corpus_dir(dir) + "/prelude/";
  std::vector<PreludeFile> files;
  for (const std::string& name : prelude_file_order()) {
    std::string path = base + name;
    files.push_back({name, path, parse_program(read_file(path), path)});
  }
  return files;
}

// A typing context with the built-in value signatures bound.
inline TypingContext make_typing_context() {
  TypingContext ctx;
  for (const auto& [name, ty] : builtin_signatures()) ctx.push_term(name, ty);
  return ctx;
}

// Checks the prelude (or a prefix of it, for corpus verification) into the
// given context.
inline void check_prelude_into(TypingContext& ctx, const std::vector<PreludeFile>& files,
                               size_t upto = SIZE_MAX) {
  TypeChecker tc(ctx);
  size_t n = std::min(upto, files.size());
  for (size_t i = 0; i < n; ++i) tc.check_program(files[i].prog);
}

// Concatenates prelude declarations (or a prefix) in load order, for
// evaluation ahead of a user program.
inline Prog prelude_decls(const std::vector<PreludeFile>& files, size_t upto = SIZE_MAX) {
  Prog all;
  size_t n = std::min(upto, files.size());
  for (size_t i = 0; i < n; ++i)
    for (const Decl& d : files[i].prog.decls) all.decls.push_back(d);
  return all;
}

} // namespace subwit
