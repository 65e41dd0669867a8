// Copyright 2026 The xrzone Authors
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

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xrzone/cli.hpp"

namespace {

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    xrzone::cli::write_file(out_path, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xrzone scenario runner"};
  app.require_subcommand(1);

  std::string scenario, engine, config, out, format = "text", engines = "greedy,oracle,mock";
  std::uint64_t seed = 0;
  int trials = 20;
  bool verbose = false, timing = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario, "scenario file")->required();
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--config", config, "engine config file");
    cmd->add_option("--out", out, "write the report here instead of stdout");
    cmd->add_option("--format", format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
    cmd->add_flag("--verbose", verbose, "log pipeline stages to stderr");
    cmd->add_flag("--timing", timing, "include wall time in the report");
  };
  CLI::App* run = app.add_subcommand("run", "run a scenario and auto-accept the proposal");
  add_common(run);
  run->add_option("--engine", engine, "greedy, oracle, llm or mock")
      ->check(CLI::IsMember({"greedy", "oracle", "llm", "mock"}));
  CLI::App* cmp = app.add_subcommand("compare", "compare engines on random instances");
  add_common(cmp);
  cmp->add_option("--engine,--engines", engines, "comma-separated engines");
  cmp->add_option("--trials", trials, "number of random instances")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  xrzone::cli::Options opt;
  opt.config_path = config;
  opt.timing = timing;
  if (verbose) opt.verbose = &std::cerr;
  if (run->parsed() && !engine.empty()) opt.engine = engine;
  if (run->parsed() && run->get_option("--seed")->count() > 0) opt.seed = seed;

  try {
    const xrzone::cli::Format fmt = xrzone::cli::format_from_string(format);
    const xrzone::cli::Loaded loaded = xrzone::cli::load(scenario, opt);
    if (run->parsed()) return emit(xrzone::cli::render(xrzone::cli::run(loaded, opt), fmt), out);

    std::vector<std::string> list;
    std::stringstream ss(engines);
    for (std::string e; std::getline(ss, e, ',');)
      if (!e.empty()) list.push_back(e);
    return emit(xrzone::cli::render(xrzone::cli::compare(loaded, list, trials, seed, opt), fmt), out);
  } catch (const xrzone::cli::InputError& e) {
    std::cerr << "xrzone: " << e.what() << "\n";
    return 2;
  } catch (const xrzone::Error& e) {
    std::cerr << "xrzone: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
}
