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

#include "isac/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#ifndef ISAC_VERSION
#define ISAC_VERSION "unknown"
#endif

namespace isac {

using json = nlohmann::json;
namespace fs = std::filesystem;

const char* code_version() { return ISAC_VERSION; }

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    // splitmix64 finalizer over the combined words
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(master) ^ h) ^ index);
}

DesignContext Scenario::context(const ExperimentConfig& config) const
{
    DesignContext ctx;
    ctx.geometry = &geometry;
    ctx.channels = &channels;
    ctx.corr = &corr;
    ctx.mask = &mask;
    ctx.omega = &omega;
    ctx.constraints = constraints;
    ctx.extraction.randomizations = config.randomizations;
    ctx.extraction.rank_one_threshold = config.rank_one_threshold;
    ctx.extraction.threads = config.threads;
    ctx.extraction.seed = derive_seed(config.seed, "randomization");
    ctx.solver_eps = config.solver_eps;
    ctx.beampattern.mainlobe_width_deg = config.mainlobe_width_deg;
    ctx.beampattern.grid_step_deg = config.pattern_step_deg;
    return ctx;
}

namespace {

ChannelConfig channel_config(const ExperimentConfig& config, std::uint64_t seed)
{
    ChannelConfig cc;
    cc.num_users = config.num_users;
    cc.paths_per_user = config.paths_per_user;
    cc.los_energy_fraction = config.los_fraction;
    for (double pl : config.path_loss_db) cc.path_loss.push_back(db_to_linear(pl));
    cc.noise_power_mw = config.noise_power_mw();
    for (double a : config.los_dods_deg) cc.los_dods_rad.push_back(deg_to_rad(a));
    cc.seed = seed;
    return cc;
}

} // namespace

std::unique_ptr<Scenario> build_scenario(const ExperimentConfig& config)
{
    config.validate();
    auto s = std::make_unique<Scenario>();
    s->geometry.num_antennas = config.num_antennas;
    s->geometry.carrier_freq = config.carrier_freq_hz;
    s->geometry.element_spacing = config.element_spacing_wavelengths * s->geometry.wavelength();
    s->constraints = config.constraints();

    s->channel_config = channel_config(config, derive_seed(config.seed, "channel"));
    s->channels = generate_channels(s->channel_config, s->geometry);

    if (config.waveform_files.empty()) {
        try {
            s->waves = make_zadoff_chu_waveforms(config.zc_roots, config.zc_length, config.sample_rate_hz);
        } catch (const InvalidInputError& e) {
            throw ConfigError(std::string("waveform.roots: ") + e.what());
        }
    } else {
        s->waves.sample_rate = config.sample_rate_hz;
        for (const auto& f : config.waveform_files) {
            try {
                s->waves.sequences.push_back(read_sequence_csv(f));
            } catch (const InvalidInputError& e) {
                throw ConfigError(std::string("waveform.files: ") + e.what());
            }
            if (s->waves.sequences.back().size() != s->waves.sequences.front().size())
                throw ConfigError("waveform.files: sequences must have equal length");
        }
    }

    const int window = config.max_lag > 0 ? config.max_lag : lag_window_for(config.range_region_m, config.sample_rate_hz);
    if (window >= s->waves.length())
        throw ConfigError("sensing.range_region: lag window " + std::to_string(window) +
                          " is not below the waveform length " + std::to_string(s->waves.length()));
    const RangeDopplerGrid grid = RangeDopplerGrid::symmetric(std::max(window, 1), config.sample_rate_hz);
    s->corr = build_correlation_matrix(s->waves, grid, config.correlation);
    s->mask = build_mask(grid, config.range_region_m);
    s->omega = make_angle_grid(config.omega_deg, config.omega_step_deg, config.target_angle_deg);

    s->cross_block_ratio = max_masked_cross_ratio(s->corr, s->mask);
    if (s->cross_block_ratio > config.cross_block_threshold) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "sensing.cross_block_threshold: masked cross-correlation reaches %.4g of the waveform energy, "
                      "above the threshold %.4g",
                      s->cross_block_ratio, config.cross_block_threshold);
        throw ConfigError(buf);
    }
    s->narrowband = narrowband_check(s->waves, config.max_velocity_mps);
    return s;
}

std::string RunManifest::to_json() const
{
    json d = json::array();
    for (const auto& s : designs) d.push_back({{"design", s.design}, {"status", s.status}, {"message", s.message}});
    json doc = {
        {"config_hash", config_hash},
        {"code_version", code_version},
        {"subcommand", subcommand},
        {"seed", seed},
        {"designs", d},
        {"files", files},
        {"warnings", warnings},
        {"exit_code", exit_code},
        {"error", error},
    };
    return doc.dump(2) + "\n";
}

namespace {

class Run {
public:
    Run(const ExperimentConfig& config, RunManifest& manifest, std::ostream& log)
        : cfg_(config), man_(manifest), log_(log), dir_(config.output_dir)
    {
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body)
    {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        body(out);
        out.close();
        if (!out) throw Error("failed writing " + path.string());
        man_.files.push_back(name);
        log_ << "wrote " << path.string() << "\n";
    }

    struct Solved {
        DesignKind kind;
        DesignResult result;
    };

    // Solves every configured design; failures are recorded, not thrown.
    std::vector<Solved> solve_all(const Scenario& sc)
    {
        std::vector<Solved> out;
        const std::vector<DesignKind> all = all_designs();
        for (DesignKind d : cfg_.designs) {
            DesignContext ctx = sc.context(cfg_);
            const auto idx = static_cast<std::uint64_t>(std::find(all.begin(), all.end(), d) - all.begin());
            ctx.extraction.seed = derive_seed(cfg_.seed, "randomization", idx);
            log_ << "solving " << to_string(d) << "\n";
            try {
                DesignResult r = run_design(d, ctx);
                log_ << "  " << r.solver_diagnostics << "; extraction " << r.extraction.method << "\n";
                status(to_string(d), "ok", "");
                out.push_back({d, std::move(r)});
            } catch (const InfeasibleError& e) {
                status(to_string(d), "infeasible", e.what());
                solver_failed_ = true;
            } catch (const SolverError& e) {
                status(to_string(d), "solver_error", e.what());
                solver_failed_ = true;
            }
        }
        return out;
    }

    void status(const std::string& design, const std::string& st, const std::string& msg)
    {
        for (auto& s : man_.designs)
            if (s.design == design) {
                s.status = st;
                s.message = msg;
                return;
            }
        man_.designs.push_back({design, st, msg});
        if (!msg.empty()) log_ << design << ": " << st << ": " << msg << "\n";
    }

    int exit_code() const
    {
        if (verify_failed_) return static_cast<int>(ExitCode::verification_failure);
        if (solver_failed_) return static_cast<int>(ExitCode::solver_failure);
        return 0;
    }

    void cmd_design(const Scenario& sc)
    {
        const DesignContext ctx = sc.context(cfg_);
        std::vector<Solved> solved = solve_all(sc);
        std::ostringstream metrics;
        metrics << "design,islr_db,total_power_mw,target_gain_mw,min_sinr_db,verified\n";
        for (const auto& s : solved) {
            const std::string name = to_string(s.kind);
            const MetricsBundle m = compute_metrics(s.kind, s.result.W, ctx);
            const VerificationReport rep =
                verify_beamformer(s.result.W, sc.channels, sc.geometry, sc.constraints,
                                  design_has_sinr_constraint(s.kind),
                                  design_has_gain_equality(s.kind),
                                  s.result.extraction.rank_one ? 1e-3 : ctx.extraction.gain_tolerance);
            write("beamformer_" + name + ".csv", [&](std::ostream& os) { write_beamformer_csv(os, s.result.W); });
            write("beamformer_" + name + ".json", [&](std::ostream& os) { os << metadata(s, m, rep).dump(2) << "\n"; });
            char line[256];
            std::snprintf(line, sizeof line, "%s,%.10g,%.10g,%.10g,%.10g,%s\n", name.c_str(), m.islr_db,
                          m.total_power_mw, m.target_gain_mw, m.per_user_sinr_db.minCoeff(),
                          rep.passed ? "true" : "false");
            metrics << line;
            log_ << name << ": ISLR " << m.islr_db << " dB, power " << m.total_power_mw << " mW, gain "
                 << m.target_gain_mw << " mW\n";
            if (!rep.passed) {
                std::string msg;
                for (const auto& f : rep.failures) msg += (msg.empty() ? "" : "; ") + f;
                status(name, "verification_failed", msg);
                verify_failed_ = true;
            }
        }
        write("metrics.csv", [&](std::ostream& os) { os << metrics.str(); });
    }

    json metadata(const Solved& s, const MetricsBundle& m, const VerificationReport& rep) const
    {
        const DesignResult& r = s.result;
        json meta = json::object();
        for (const auto& [k, v] : r.metadata) meta[k] = v;
        std::vector<double> sinr(m.per_user_sinr_db.data(), m.per_user_sinr_db.data() + m.per_user_sinr_db.size());
        return {
            {"design", to_string(s.kind)},
            {"solver_status", to_string(r.status)},
            {"objective", r.objective},
            {"relative_gap", r.relative_gap},
            {"iterations", r.iterations},
            {"solves", r.solves},
            {"eigen_ratios", r.extraction.eigen_ratios},
            {"extraction", r.extraction.method},
            {"candidates_drawn", r.extraction.candidates_drawn},
            {"candidates_feasible", r.extraction.candidates_feasible},
            {"relaxation_gap", r.extraction.relaxation_gap},
            {"islr_db", m.islr_db},
            {"isl", m.isl},
            {"mainlobe", m.mainlobe},
            {"per_user_sinr_db", sinr},
            {"total_power_mw", m.total_power_mw},
            {"target_gain_mw", m.target_gain_mw},
            {"verified", rep.passed},
            {"verification_failures", rep.failures},
            {"design_metadata", meta},
            {"solver_diagnostics", r.solver_diagnostics},
        };
    }

    void cmd_heatmaps(const Scenario& sc)
    {
        const std::vector<Solved> solved = solve_all(sc);
        const double step = cfg_.heatmap_step_deg;
        const std::vector<double> angles = uniform_angles_rad(-90.0 + step, 90.0 - step, step);
        const double theta0 = sc.constraints.target_angle_rad;
        write("heatmaps.csv", [&](std::ostream& os) {
            bool header = true;
            for (const auto& s : solved) {
                write_heatmap_csv(os, to_string(s.kind),
                                  heatmap(s.result.W, sc.geometry, sc.corr, theta0, angles, cfg_.include_receive_factor),
                                  header);
                header = false;
            }
        });
        if (cfg_.export_af_heatmaps)
            for (const auto& s : solved)
                write("af_heatmap_" + to_string(s.kind) + ".csv", [&](std::ostream& os) {
                    write_af_heatmap_csv(
                        os, heatmap(s.result.W, sc.geometry, sc.corr, theta0, angles, cfg_.include_receive_factor));
                });
    }

    void cmd_cuts(const Scenario& sc)
    {
        const std::vector<Solved> solved = solve_all(sc);
        const double step = cfg_.cut_step_deg;
        const std::vector<double> angles = uniform_angles_rad(-90.0 + step, 90.0 - step, step);
        const double theta0 = sc.constraints.target_angle_rad;
        write("range_cuts.csv", [&](std::ostream& os) {
            bool header = true;
            for (const auto& s : solved) {
                const Cut c = range_cut(s.result.W, sc.geometry, sc.corr, theta0, cfg_.include_receive_factor);
                write_cut_csv(os, to_string(s.kind), c, header);
                header = false;
                log_ << to_string(s.kind) << ": max range sidelobe in region "
                     << max_sidelobe_db(c, cfg_.range_region_m) << " dB\n";
            }
        });
        write("angle_cuts.csv", [&](std::ostream& os) {
            bool header = true;
            for (const auto& s : solved) {
                write_cut_csv(os, to_string(s.kind),
                              angle_cut(s.result.W, sc.geometry, sc.corr, theta0, angles, cfg_.include_receive_factor),
                              header);
                header = false;
            }
        });
    }

    void cmd_beampattern(const Scenario& sc)
    {
        const std::vector<Solved> solved = solve_all(sc);
        const double step = cfg_.beampattern_step_deg;
        const std::vector<double> angles = uniform_angles_rad(-90.0, 90.0, step);
        write("beampattern.csv", [&](std::ostream& os) {
            bool header = true;
            for (const auto& s : solved) {
                write_beampattern_csv(os, to_string(s.kind), angles, beampattern_dbm(s.result.W, sc.geometry, angles),
                                      header);
                header = false;
            }
        });
    }

    void cmd_sweep(const Scenario& sc)
    {
        SweepSetup setup;
        setup.geometry = sc.geometry;
        setup.channel = sc.channel_config;
        setup.corr = &sc.corr;
        setup.mask = &sc.mask;
        setup.omega = &sc.omega;
        setup.base = sc.constraints;
        const DesignContext ctx = sc.context(cfg_);
        setup.extraction = ctx.extraction;
        setup.solver_eps = cfg_.solver_eps;
        setup.beampattern = ctx.beampattern;
        setup.threads = cfg_.threads;
        for (int i = 0; i < cfg_.sweep_seeds; ++i)
            setup.channel_seeds.push_back(derive_seed(cfg_.seed, "sweep-cell", static_cast<std::uint64_t>(i)));
        log_ << "sweep: " << cfg_.sweep_gamma_c_db.size() * cfg_.sweep_gamma_s_db.size() << " cells x "
             << cfg_.sweep_seeds << " seeds x " << cfg_.designs.size() << " designs\n";
        const SweepResult res = sweep_islr(setup, cfg_.sweep_gamma_c_db, cfg_.sweep_gamma_s_db, cfg_.designs);
        for (const auto& r : res.skipped) man_.warnings.push_back("sweep: " + r);
        for (DesignKind d : cfg_.designs) {
            int cells = 0;
            for (const auto& row : res.rows)
                if (row.design == d) ++cells;
            status(to_string(d), cells ? "ok" : "absent", cells ? "" : "no feasible sweep cell");
        }
        log_ << "proposed ISLR spread over the grid: " << res.proposed_spread_db << " dB\n";
        write("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, res); });
    }

    void cmd_verify(const Scenario& sc)
    {
        const DesignContext ctx = sc.context(cfg_);
        for (DesignKind d : cfg_.designs) {
            const std::string name = to_string(d);
            const fs::path csv = dir_ / ("beamformer_" + name + ".csv");
            const fs::path meta = dir_ / ("beamformer_" + name + ".json");
            if (!fs::exists(csv) || !fs::exists(meta)) {
                status(name, "missing", "no exported beamformer in " + dir_.string());
                verify_failed_ = true;
                continue;
            }
            CMatrix W;
            json recorded;
            try {
                W = read_beamformer_csv(csv.string());
                std::ifstream in(meta);
                recorded = json::parse(in);
            } catch (const std::exception& e) {
                status(name, "unreadable", e.what());
                verify_failed_ = true;
                continue;
            }
            const bool rank_one = recorded.value("extraction", std::string()).rfind("eigen", 0) == 0;
            const VerificationReport rep =
                verify_beamformer(W, sc.channels, sc.geometry, sc.constraints, design_has_sinr_constraint(d),
                                  design_has_gain_equality(d), rank_one ? 1e-3 : ctx.extraction.gain_tolerance);
            std::vector<std::string> problems = rep.failures;
            if (rep.failures.empty() && W.rows() == sc.geometry.num_antennas && W.cols() == sc.channels.num_users()) {
                const MetricsBundle m = compute_metrics(d, W, ctx);
                const double before = recorded.value("islr_db", 0.0);
                const double rel = std::abs(m.islr_db - before) / std::max(std::abs(before), 1e-300);
                log_ << name << ": ISLR " << m.islr_db << " dB (recorded " << before << " dB)\n";
                if (!(rel <= 1e-9)) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "ISLR %.12g dB differs from the recorded %.12g dB", m.islr_db,
                                  before);
                    problems.push_back(buf);
                }
            }
            if (problems.empty()) {
                status(name, "verified", "");
            } else {
                std::string msg;
                for (const auto& f : problems) msg += (msg.empty() ? "" : "; ") + f;
                status(name, "verification_failed", msg);
                verify_failed_ = true;
            }
        }
    }

private:
    const ExperimentConfig& cfg_;
    RunManifest& man_;
    std::ostream& log_;
    fs::path dir_;
    bool solver_failed_ = false;
    bool verify_failed_ = false;
};

} // namespace

RunManifest run(const ExperimentConfig& config, const std::string& subcommand, std::ostream& log)
{
    RunManifest man;
    man.code_version = code_version();
    man.subcommand = subcommand;
    man.seed = config.seed;
    const fs::path dir(config.output_dir);

    try {
        man.config_hash = config_hash(config);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw ConfigError("output_dir: cannot create " + dir.string() + ": " + ec.message());
        static const std::vector<std::string> known{"design", "heatmaps", "cuts", "beampattern", "sweep", "verify"};
        if (std::find(known.begin(), known.end(), subcommand) == known.end())
            throw ConfigError("unknown subcommand '" + subcommand + "'");

        const std::unique_ptr<Scenario> sc = build_scenario(config);
        if (!sc->narrowband.satisfied)
            man.warnings.push_back("narrowband assumption violated: 2 v B T / c = " +
                                   std::to_string(sc->narrowband.criterion));
        log << "scenario: M=" << sc->geometry.num_antennas << " K=" << sc->channels.num_users()
            << " N=" << sc->waves.length() << " P=" << sc->omega.size() << " masked lags=" << sc->mask.count()
            << " cross-block ratio=" << sc->cross_block_ratio << "\n";

        Run r(config, man, log);
        if (subcommand == "design") r.cmd_design(*sc);
        else if (subcommand == "heatmaps") r.cmd_heatmaps(*sc);
        else if (subcommand == "cuts") r.cmd_cuts(*sc);
        else if (subcommand == "beampattern") r.cmd_beampattern(*sc);
        else if (subcommand == "sweep") r.cmd_sweep(*sc);
        else r.cmd_verify(*sc);
        man.exit_code = r.exit_code();
    } catch (const ConfigError& e) {
        man.exit_code = static_cast<int>(ExitCode::config_error);
        man.error = e.what();
    } catch (const InvalidInputError& e) {
        man.exit_code = static_cast<int>(ExitCode::config_error);
        man.error = e.what();
    } catch (const Error& e) {
        man.exit_code = static_cast<int>(ExitCode::solver_failure);
        man.error = e.what();
    }
    if (!man.error.empty()) log << "error: " << man.error << "\n";

    write_manifest(man, config.output_dir);
    return man;
}

bool write_manifest(const RunManifest& manifest, const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir, ec)) return false;
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
    out << manifest.to_json();
    return static_cast<bool>(out);
}

} // namespace isac
