// Copyright 2026 The fuzzmux Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fuzzmux command line. Three subcommands:
//
//   run      drive an ensemble campaign from a config file
//   report   render one campaign directory's telemetry
//   compare  rank campaign directories by union coverage
//
// Option precedence for run: command-line flag > FUZZMUX_* environment
// variable > config file > built-in default.
//
// Exit codes: 0 success, 1 runtime failure (campaign aborted, I/O error),
// 2 configuration or usage error.

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fuzzmux/campaign.hpp"
#include "fuzzmux/config.hpp"
#include "fuzzmux/log.hpp"
#include "fuzzmux/report.hpp"

namespace {

struct RunArgs {
  std::string config_path;
  std::optional<double> cpu_budget;
  std::optional<int> cores;
  std::optional<std::string> policy;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
};

int do_run(const RunArgs& args) {
  fuzzmux::CampaignConfig config = fuzzmux::load_config(args.config_path);
  if (args.cpu_budget) config.schedule.total_cpu_budget = *args.cpu_budget;
  if (args.cores) config.schedule.cores = *args.cores;
  if (args.policy) config.schedule.policy = fuzzmux::parse_policy(*args.policy);
  if (args.seed) config.rng_seed = *args.seed;
  if (args.output) config.output_dir = *args.output;
  fuzzmux::validate_config(config);
  return fuzzmux::run_campaign_command(std::move(config));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ensemble fuzzing orchestrator"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run a campaign");
  run->add_option("--config", run_args.config_path, "campaign config file")
      ->required();
  run->add_option("--cpu-budget", run_args.cpu_budget,
                  "total CPU budget in seconds");
  run->add_option("--cores", run_args.cores, "CPU cores available");
  run->add_option("--policy", run_args.policy, "autofz or roundrobin");
  run->add_option("--seed", run_args.seed, "campaign RNG seed");
  run->add_option("--output", run_args.output, "campaign output directory");

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "render campaign telemetry");
  report->add_option("dir", report_dir, "campaign directory")->required();

  std::vector<std::string> compare_dirs;
  CLI::App* compare =
      app.add_subcommand("compare", "rank campaigns by union coverage");
  compare->add_option("dirs", compare_dirs, "campaign directories")
      ->required()
      ->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return do_run(run_args);
    if (report->parsed()) return fuzzmux::cli_report(report_dir);
    if (compare->parsed()) {
      std::vector<std::filesystem::path> dirs(compare_dirs.begin(),
                                              compare_dirs.end());
      return fuzzmux::cli_compare(dirs);
    }
  } catch (const fuzzmux::ConfigError& e) {
    fuzzmux::log_error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    fuzzmux::log_error("{}", e.what());
    return 1;
  }
  return 2;
}
