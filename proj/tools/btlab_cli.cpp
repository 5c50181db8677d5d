// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library only through btlab.h.

#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "btlab.h"

namespace {

enum Exit { kPass = 0, kChecksFailed = 1, kUsage = 2, kRuntime = 3 };

int exit_code(btl_status s) {
  switch (s) {
    case BTL_OK: return kPass;
    case BTL_CONFIG:
    case BTL_INVALID_ARGUMENT:
    case BTL_IO: return kUsage;
    default: return kRuntime;
  }
}

int fail(btl_status s) {
  std::cerr << "btlab: " << btl_status_string(s) << ": " << btl_last_error() << '\n';
  return exit_code(s);
}

int print_string(btl_status (*fn)(char**)) {
  char* text = nullptr;
  if (const auto s = fn(&text); s != BTL_OK) return fail(s);
  std::cout << text;
  if (*text && text[std::strlen(text) - 1] != '\n') std::cout << '\n';
  btl_string_free(text);
  return kPass;
}

void summarize(const std::string& report, std::ostream& out) {
  const auto j = nlohmann::json::parse(report);
  out << j["experiment"].get<std::string>() << '\n';
  for (const auto& c : j["checks"]) {
    out << "  " << (c["pass"].get<bool>() ? "PASS" : "FAIL") << "  " << c["name"].get<std::string>()
        << "  value=" << c["value"].dump() << "  tol=" << c["tolerance"].dump() << '\n';
  }
  out << (j["passed"].get<bool>() ? "PASSED" : "FAILED") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berezin-Toeplitz and Bergman-space numerical lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(btl_version()));

  std::string config_path, output_dir;
  unsigned long long seed = 0;
  unsigned workers = 0;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment config and write report.json");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--output-dir", output_dir, "Directory for report.json and data files");
  auto* seed_opt = run->add_option("--seed", seed, "Override sim.seed");
  run->add_option("--workers", workers, "Worker threads, 0 = all cores");
  run->add_flag("--quiet,-q", quiet, "Print nothing on success");
  auto* presets = app.add_subcommand("list-presets", "List spaces, maps and symbols");
  auto* schema = app.add_subcommand("schema", "Print the config JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  if (presets->parsed()) return print_string(btl_list_presets);
  if (schema->parsed()) return print_string(btl_config_schema);

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "btlab: cannot read " << config_path << '\n';
    return kUsage;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  btl_run_options opts{};
  opts.output_dir = output_dir.empty() ? nullptr : output_dir.c_str();
  opts.has_seed = seed_opt->count() > 0;
  opts.seed = seed;
  opts.workers = workers;
  char* report = nullptr;
  int passed = 0;
  if (const auto s = btl_run_experiment(buf.str().c_str(), &opts, &report, &passed); s != BTL_OK) return fail(s);
  if (!quiet || !passed) summarize(report, passed ? std::cout : std::cerr);
  btl_string_free(report);
  return passed ? kPass : kChecksFailed;
}
