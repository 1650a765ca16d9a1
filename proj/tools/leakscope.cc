//
// Copyright 2026 The Leakscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
  namespace cli = leakscope::cli;
  cli::RunConfig config;
  CLI::App app{"leakscope: leakage measures and multi-guess strategies for discrete channels"};
  std::string names;
  for (const auto& [name, spec] : cli::commands()) names += (names.empty() ? "" : ", ") + name;
  app.add_option("command", config.command, "one of: " + names)->required();
  app.add_option("--input", config.input, "input distribution file");
  app.add_option("--format", config.format, "input format: json or csv");
  app.add_option("--alpha", config.alpha, "order: a positive number, 1 or inf");
  app.add_option("--gain", config.gain, "identity, alpha:<a>, log or custom:<expr in t>");
  app.add_option("--k", config.k, "number of guesses");
  app.add_option("--y", config.y, "output symbol");
  app.add_option("--t", config.t, "comma-separated guess vector");
  app.add_option("--suite", config.suite, "variational, kkt, admissibility, bregman or robustness");
  app.add_flag("--decompose", config.decompose, "emit the strategy as a mixture of k-subsets");
  app.add_option("--out", config.out, "output format: json or table");
  app.add_option("--seed", config.seed, "random seed (falls back to LEAKSCOPE_SEED)");
  app.add_option("--tol", config.tol, "tolerance override");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << cli::error_json("ParseError", e.what()).dump() << "\n";
    return cli::kExitValidation;
  }
  return cli::run(config, std::cout);
}
