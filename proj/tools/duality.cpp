// Copyright 2026 The wpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// duality run --config exp.json [--out dir] [--seed s] [--threads k] [--ideal]
// duality report results/a/results.json results/b/results.json
//
// Exit codes: 0 success, 2 config or usage error, 3 runtime failure or
// invariant violation.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "wpd/cli/config.hpp"
#include "wpd/cli/experiments.hpp"
#include "wpd/cli/report.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int run(const std::string &config_path, const wpd::cli::Overrides &overrides,
        unsigned threads) {
    wpd::cli::ExperimentConfig config;
    try {
        config = wpd::cli::load_config(config_path);
        wpd::cli::apply_overrides(config, overrides);
    } catch (const wpd::cli::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const auto out = wpd::cli::run_experiment(config, threads);
        wpd::cli::write_outputs(out, config.output_dir, config.plots);
        std::cout << "wrote " << config.output_dir << "/results.json ("
                  << out.results["records"].size() << " records)\n";
        if (!out.violations.empty()) {
            for (const auto &v : out.violations) {
                std::cerr << "violation: " << v << "\n";
            }
            return kExitRuntime;
        }
    } catch (const wpd::cli::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

int report(const std::vector<std::string> &files) {
    if (files.empty()) {
        std::cerr << "error: no result files given\n";
        return kExitConfig;
    }
    try {
        const auto r = wpd::cli::build_report({files.begin(), files.end()});
        std::cout << wpd::cli::format_report(r);
        return r.flagged == 0 ? 0 : kExitRuntime;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulated multi-path interferometer: wave-particle duality "
                 "experiments"};
    app.require_subcommand(1);

    auto *run_cmd = app.add_subcommand("run", "run an experiment config");
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = std::max(1U, std::thread::hardware_concurrency());
    bool ideal = false;
    run_cmd->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    auto *out_opt = run_cmd->add_option("--out", out_dir, "output directory");
    auto *seed_opt =
        run_cmd->add_option("--seed", seed, "base seed, overrides config");
    run_cmd->add_option("--threads", threads, "worker threads")
        ->check(CLI::Range(1U, 1024U));
    run_cmd->add_flag("--ideal", ideal, "force zero noise");

    auto *report_cmd =
        app.add_subcommand("report", "summarize results.json files");
    std::vector<std::string> files;
    report_cmd->add_option("files", files, "results.json files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*run_cmd) {
        wpd::cli::Overrides o;
        if (*out_opt) {
            o.output_dir = out_dir;
        }
        if (*seed_opt) {
            o.seed = seed;
        }
        o.ideal = ideal;
        return run(config_path, o, threads);
    }
    return report(files);
}
