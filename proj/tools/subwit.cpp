// subwit: checker, interpreter, and corpus harness for a small polymorphic
// language with polarized kinds and first-class subtype witnesses.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subwit/driver.hpp"

int main(int argc, char** argv) {
  using subwit::CliConfig;
  using subwit::Command;

  CliConfig cfg;

  CLI::App app{"subwit — polarized-kind language toolchain"};
  app.require_subcommand(1);

  auto add_common_flags = [&](CLI::App* cmd) {
    cmd->add_flag("--trace-subtype", cfg.trace_subtype,
                  "print the subtype derivation of every explicit coercion to stderr");
    cmd->add_flag("--json-diagnostics", cfg.json_diagnostics,
                  "emit diagnostics as a JSON array ({file, line, col, code, message}) on stdout");
    cmd->add_flag("--no-prelude", cfg.no_prelude, "do not load the corpus prelude");
  };

  CLI::App* check = app.add_subcommand("check", "typecheck programs against the prelude");
  check->add_option("files", cfg.paths, "object-language source files")->required()->expected(-1);
  add_common_flags(check);

  CLI::App* run = app.add_subcommand("run", "typecheck and evaluate one program");
  run->add_option("file", cfg.paths, "object-language source file")->required()->expected(1);
  run->add_flag("--count-steps", cfg.count_steps,
                "print the number of evaluation steps taken by `main` to stderr");
  add_common_flags(run);

  CLI::App* test = app.add_subcommand("test", "verify a corpus manifest");
  test->add_option("manifest", cfg.paths, "manifest file (TOML)")->required()->expected(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2; // usage errors are exit 2; --help is success
  }

  if (check->parsed()) cfg.command = Command::Check;
  else if (run->parsed()) cfg.command = Command::Run;
  else cfg.command = Command::Test;

  return subwit::run_cli(cfg, std::cout, std::cerr);
}
