// SPDX-License-Identifier: Apache-2.0
//
// isac-afbf: ambiguity-function-aware ISAC transmit beamforming
// Copyright (C) 2026 The isac-afbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: isac_sim <subcommand> [options]

#include "isac/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"isac_sim: ambiguity-function-aware ISAC transmit beamforming"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string designs;
    double solver_eps = 0.0;
    int randomizations = 0;

    app.add_option("--config", config_path, "JSON config file (defaults when omitted)")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* designs_opt = app.add_option("--designs", designs, "comma-separated designs or 'all'");
    auto* eps_opt = app.add_option("--solver-eps", solver_eps, "relative duality gap of the conic solver");
    auto* rand_opt = app.add_option("--randomizations", randomizations, "Gaussian randomization candidates");

    const std::vector<std::pair<std::string, std::string>> subcommands{
        {"design", "solve the designs, export beamformers and metrics"},
        {"heatmaps", "range-angle AF heatmaps"},
        {"cuts", "range and angle cuts of the AF"},
        {"beampattern", "transmit beampatterns"},
        {"sweep", "median ISLR over SINR / gain targets and channel seeds"},
        {"verify", "re-check exported beamformers against the constraints"},
    };
    for (const auto& [name, help] : subcommands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(isac::ExitCode::config_error);
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    isac::ExperimentConfig config;
    try {
        if (!config_path.empty()) config = isac::load_config(config_path);
        if (*seed_opt) config.seed = seed;
        if (*out_opt) config.output_dir = out_dir;
        if (*eps_opt) config.solver_eps = solver_eps;
        if (*rand_opt) config.randomizations = randomizations;
        if (*designs_opt) config.designs = isac::parse_design_list(designs, "--designs");
        config.validate();
    } catch (const isac::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        isac::RunManifest failed;
        failed.code_version = isac::code_version();
        failed.subcommand = sub;
        failed.seed = *seed_opt ? seed : config.seed;
        failed.exit_code = static_cast<int>(isac::ExitCode::config_error);
        failed.error = e.what();
        isac::write_manifest(failed, *out_opt ? out_dir : config.output_dir);
        return failed.exit_code;
    }

    const isac::RunManifest manifest = isac::run(config, sub, std::cerr);
    for (const auto& d : manifest.designs)
        std::cout << d.design << ": " << d.status << (d.message.empty() ? "" : " (" + d.message + ")") << "\n";
    for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
    return manifest.exit_code;
}
