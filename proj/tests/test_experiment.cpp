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

#include <doctest.h>

#include "isac/experiment.hpp"
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace isac;
namespace fs = std::filesystem;

namespace {

const char* kToy = R"({
  "array": {"num_antennas": 8},
  "users": {"num_users": 2, "los_dods_deg": [-30, 30]},
  "constraints": {"min_sinr": "10 dB", "target_gain": "5 mW"},
  "sensing": {"omega": "[-10,-5]U[5,10] deg, step 0.5", "range_region": "[-240,-30]U[30,240] m",
              "cross_block_threshold": 0.5},
  "waveform": {"roots": [1, 3], "length": 64},
  "solver": {"randomizations": 100, "threads": 2},
  "evaluation": {"heatmap_step_deg": 2.0, "cut_step_deg": 1.0, "beampattern_step_deg": 1.0},
  "sweep": {"gamma_c_db": [10], "gamma_s_db": [7], "seeds": 1},
  "designs": ["proposed", "comm_only", "joint_maxgain"]
})";

fs::path fresh_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("isac_exp_" + name);
    fs::remove_all(d);
    return d;
}

ExperimentConfig toy(const fs::path& out)
{
    ExperimentConfig c = parse_config(kToy);
    c.output_dir = out.string();
    return c;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::set<std::string> listing(const fs::path& d)
{
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(d)) names.insert(e.path().filename().string());
    return names;
}

} // namespace

TEST_CASE("experiment: derived seeds")
{
    CHECK(derive_seed(1, "channel") == derive_seed(1, "channel"));
    CHECK(derive_seed(1, "channel") != derive_seed(2, "channel"));
    CHECK(derive_seed(1, "channel") != derive_seed(1, "randomization"));
    CHECK(derive_seed(1, "sweep-cell", 0) != derive_seed(1, "sweep-cell", 1));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, "sweep-cell", i));
    CHECK(seen.size() == 1000);
}

TEST_CASE("experiment: scenario follows the configuration")
{
    const ExperimentConfig c = toy(fresh_dir("scenario"));
    const auto sc = build_scenario(c);
    CHECK(sc->geometry.num_antennas == 8);
    CHECK(sc->channels.num_users() == 2);
    CHECK(sc->waves.length() == 64);
    CHECK(sc->omega.size() == 22);
    CHECK(sc->corr.grid.max_lag() == 17);
    CHECK(sc->mask.count() == 2 * 14); // bins 3..16 per side
    CHECK(sc->narrowband.satisfied);
    ChannelConfig cc = sc->channel_config;
    cc.seed = derive_seed(c.seed, "channel");
    CHECK(generate_channels(cc, sc->geometry).H == sc->channels.H);

    ExperimentConfig strict = c;
    strict.cross_block_threshold = 0.01;
    CHECK_THROWS_AS(build_scenario(strict), ConfigError);
}

TEST_CASE("experiment: design exports, inventory and verification")
{
    const fs::path dir = fresh_dir("design");
    const ExperimentConfig c = toy(dir);
    std::ostringstream log;
    const RunManifest m = run(c, "design", log);
    INFO(log.str());
    CHECK(m.exit_code == 0);
    REQUIRE(m.designs.size() == 3);
    for (const auto& d : m.designs) CHECK(d.status == "ok");

    std::set<std::string> listed(m.files.begin(), m.files.end());
    listed.insert("manifest.json");
    CHECK(listed == listing(dir));
    CHECK(listed.count("beamformer_proposed.csv") == 1);
    CHECK(listed.count("metrics.csv") == 1);

    const auto doc = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(doc["config_hash"] == config_hash(c));
    CHECK(doc["exit_code"] == 0);
    CHECK(doc["files"].size() == m.files.size());

    std::ostringstream vlog;
    const RunManifest v = run(c, "verify", vlog);
    INFO(vlog.str());
    CHECK(v.exit_code == 0);
    for (const auto& d : v.designs) CHECK(d.status == "verified");
}

TEST_CASE("experiment: tampered beamformers fail verification")
{
    const fs::path dir = fresh_dir("tamper");
    ExperimentConfig c = toy(dir);
    c.designs = {DesignKind::proposed};
    std::ostringstream log;
    REQUIRE(run(c, "design", log).exit_code == 0);
    std::ofstream(dir / "beamformer_proposed.csv") << "0.5,0,0.5,0\n0.5,0,0.5,0\n0.5,0,0.5,0\n0.5,0,0.5,0\n"
                                                      "0.5,0,0.5,0\n0.5,0,0.5,0\n0.5,0,0.5,0\n0.5,0,0.5,0\n";
    const RunManifest v = run(c, "verify", log);
    CHECK(v.exit_code == static_cast<int>(ExitCode::verification_failure));
    CHECK(v.designs.at(0).status == "verification_failed");
    CHECK(fs::exists(dir / "manifest.json"));

    fs::remove(dir / "beamformer_proposed.csv");
    CHECK(run(c, "verify", log).exit_code == static_cast<int>(ExitCode::verification_failure));
}

TEST_CASE("experiment: identical config and seed give byte-identical outputs")
{
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    std::ostringstream log;
    for (const char* sub : {"design", "cuts", "heatmaps", "beampattern"}) {
        ExperimentConfig ca = toy(a), cb = toy(b);
        cb.threads = 1; // thread count must not matter
        REQUIRE(run(ca, sub, log).exit_code == 0);
        REQUIRE(run(cb, sub, log).exit_code == 0);
    }
    const auto names = listing(a);
    CHECK(names == listing(b));
    for (const auto& n : names) {
        if (n == "manifest.json") continue; // carries the config hash, which includes the thread count
        INFO(n);
        CHECK(slurp(a / n) == slurp(b / n));
    }
    // A different master seed draws different channels.
    const fs::path c = fresh_dir("det_c");
    ExperimentConfig cc = toy(c);
    cc.seed = 2;
    REQUIRE(run(cc, "design", log).exit_code == 0);
    CHECK(slurp(c / "beamformer_proposed.csv") != slurp(a / "beamformer_proposed.csv"));
}

TEST_CASE("experiment: single-cell sweep writes one row per design")
{
    const fs::path dir = fresh_dir("sweep");
    ExperimentConfig c = toy(dir);
    c.designs = {DesignKind::proposed};
    std::ostringstream log;
    const RunManifest m = run(c, "sweep", log);
    CHECK(m.exit_code == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(csv.rfind("gamma_c_db,gamma_s_db,design,median_islr_db,n_seeds\n10,7,proposed,", 0) == 0);
    CHECK(csv.substr(csv.size() - 3) == ",1\n");
}

TEST_CASE("experiment: failures still leave a manifest")
{
    std::ostringstream log;
    const fs::path dir = fresh_dir("fail_cfg");
    ExperimentConfig c = toy(dir);
    c.cross_block_threshold = 0.01;
    const RunManifest m = run(c, "design", log);
    CHECK(m.exit_code == static_cast<int>(ExitCode::config_error));
    CHECK_FALSE(m.error.empty());
    const auto doc = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(doc["exit_code"] == 1);
    CHECK(doc["files"].empty());

    const fs::path dir2 = fresh_dir("fail_sub");
    CHECK(run(toy(dir2), "dance", log).exit_code == static_cast<int>(ExitCode::config_error));
    CHECK(fs::exists(dir2 / "manifest.json"));

    const fs::path dir3 = fresh_dir("fail_solve");
    ExperimentConfig s = toy(dir3);
    s.min_sinr_db = 90.0;
    s.designs = {DesignKind::proposed};
    const RunManifest f = run(s, "design", log);
    CHECK(f.exit_code == static_cast<int>(ExitCode::solver_failure));
    CHECK(f.designs.at(0).status != "ok");
    CHECK(fs::exists(dir3 / "manifest.json"));
}
