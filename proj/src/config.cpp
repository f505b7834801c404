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

#include "isac/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

namespace isac {

using json = nlohmann::json;

DesignConstraints ExperimentConfig::constraints() const
{
    DesignConstraints c;
    c.max_power_mw = max_power_mw();
    c.min_sinr = db_to_linear(min_sinr_db);
    c.target_gain_mw = db_to_linear(target_gain_db);
    c.noise_power_mw = noise_power_mw();
    c.target_angle_rad = deg_to_rad(target_angle_deg);
    return c;
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what)
{
    throw ConfigError(key + ": " + what);
}

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok) bad(key, what);
}

bool finite_all(const std::vector<double>& v)
{
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

void ExperimentConfig::validate() const
{
    require(num_antennas >= 1, "array.num_antennas", "must be at least 1");
    require(carrier_freq_hz > 0.0 && std::isfinite(carrier_freq_hz), "array.carrier_freq_hz", "must be positive");
    require(element_spacing_wavelengths > 0.0, "array.element_spacing_wavelengths", "must be positive");

    require(num_users >= 1, "users.num_users", "must be at least 1");
    require(static_cast<int>(los_dods_deg.size()) == num_users, "users.los_dods_deg",
            "needs one angle per user (" + std::to_string(num_users) + ")");
    for (double a : los_dods_deg)
        require(std::isfinite(a) && std::abs(a) <= 90.0, "users.los_dods_deg", "angles must lie in [-90, 90] deg");
    require(paths_per_user >= 1, "users.paths_per_user", "must be at least 1");
    require(los_fraction >= 0.0 && los_fraction <= 1.0, "users.los_fraction", "must lie in [0, 1]");
    require(path_loss_db.empty() || static_cast<int>(path_loss_db.size()) == num_users, "users.path_loss_db",
            "needs one value per user or none");
    require(finite_all(path_loss_db), "users.path_loss_db", "values must be finite");

    require(std::isfinite(max_power_dbm), "constraints.max_power", "must be finite");
    require(std::isfinite(min_sinr_db), "constraints.min_sinr", "must be finite");
    require(std::isfinite(noise_power_dbm), "constraints.noise_power", "must be finite");
    require(std::isfinite(target_gain_db), "constraints.target_gain", "must be finite");
    require(std::isfinite(target_angle_deg) && std::abs(target_angle_deg) < 90.0, "constraints.target_angle_deg",
            "must lie in (-90, 90) deg");
    if (db_to_linear(target_gain_db) > max_power_mw() * num_antennas * (1.0 + 1e-12)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.4g mW exceeds the largest achievable gain P_t * M = %.4g mW",
                      db_to_linear(target_gain_db), max_power_mw() * num_antennas);
        bad("constraints.target_gain", buf);
    }

    for (const auto& [lo, hi] : omega_deg)
        require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi && lo > -90.0 && hi < 90.0, "sensing.omega",
                "intervals must satisfy -90 < lo <= hi < 90 deg");
    require(omega_step_deg > 0.0, "sensing.omega_step_deg", "must be positive");
    for (const auto& [lo, hi] : range_region_m)
        require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "sensing.range_region",
                "intervals must satisfy lo <= hi");
    require(sample_rate_hz > 0.0 && std::isfinite(sample_rate_hz), "sensing.sample_rate_hz", "must be positive");
    require(max_lag >= 0, "sensing.max_lag", "must be non-negative");
    if (max_lag > 0 && !range_region_m.empty())
        require(max_lag >= lag_window_for(range_region_m, sample_rate_hz), "sensing.max_lag",
                "does not cover the range region");
    require(cross_block_threshold > 0.0, "sensing.cross_block_threshold", "must be positive");
    require(max_velocity_mps >= 0.0, "sensing.max_velocity_mps", "must be non-negative");

    if (waveform_files.empty()) {
        require(static_cast<int>(zc_roots.size()) == num_users, "waveform.roots",
                "needs one root per user (" + std::to_string(num_users) + ")");
        require(zc_length >= 2, "waveform.length", "must be at least 2");
    } else {
        require(static_cast<int>(waveform_files.size()) == num_users, "waveform.files", "needs one file per user");
    }

    require(solver_eps > 0.0 && solver_eps < 1.0, "solver.eps", "must lie in (0, 1)");
    require(randomizations >= 1, "solver.randomizations", "must be at least 1");
    require(rank_one_threshold > 0.0 && rank_one_threshold <= 1.0, "solver.rank_one_threshold",
            "must lie in (0, 1]");
    require(threads >= 0, "solver.threads", "must be non-negative");

    require(mainlobe_width_deg > 0.0 && mainlobe_width_deg < 180.0, "baselines.mainlobe_width_deg",
            "must lie in (0, 180)");
    require(pattern_step_deg > 0.0, "baselines.grid_step_deg", "must be positive");

    require(heatmap_step_deg > 0.0, "evaluation.heatmap_step_deg", "must be positive");
    require(cut_step_deg > 0.0, "evaluation.cut_step_deg", "must be positive");
    require(beampattern_step_deg > 0.0, "evaluation.beampattern_step_deg", "must be positive");

    require(!sweep_gamma_c_db.empty() && finite_all(sweep_gamma_c_db), "sweep.gamma_c_db", "needs finite values");
    require(!sweep_gamma_s_db.empty() && finite_all(sweep_gamma_s_db), "sweep.gamma_s_db", "needs finite values");
    require(sweep_seeds >= 1, "sweep.seeds", "must be at least 1");

    require(!designs.empty(), "designs", "must name at least one design");
    require(!output_dir.empty(), "output_dir", "must not be empty");
}

double parse_level(const std::string& text, LevelKind kind, const std::string& key)
{
    static const std::regex re(R"(^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) bad(key, "cannot parse level '" + text + "'");
    const double v = std::stod(m[1].str());
    const std::string unit = m[2].str();
    if (unit.empty()) bad(key, "level '" + text + "' needs a unit");
    switch (kind) {
    case LevelKind::ratio:
        if (unit == "dB") return v;
        if (unit == "lin") {
            require(v > 0.0, key, "linear ratio must be positive");
            return linear_to_db(v);
        }
        bad(key, "unit '" + unit + "' is not a ratio (use dB or lin)");
    case LevelKind::gain:
        if (unit == "dB") return v;
        [[fallthrough]];
    case LevelKind::power:
        if (unit == "dBm") return v;
        if (unit == "mW" || unit == "W") {
            require(v > 0.0, key, "power must be positive");
            return linear_to_db(unit == "W" ? v * 1e3 : v);
        }
        bad(key, "unit '" + unit + "' is not a power (use dBm, mW or W)");
    }
    bad(key, "unknown level kind");
}

IntervalSpec parse_intervals(const std::string& text, const std::string& key)
{
    static const std::string num = R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)";
    static const std::regex interval(R"(\[\s*()" + num + R"()\s*,\s*()" + num + R"()\s*\])");
    static const std::regex tail(R"(^\s*([A-Za-z]*)\s*(?:,\s*step\s+()" + num + R"()\s*([A-Za-z]*))?\s*$)");
    IntervalSpec spec;
    std::string rest = text;
    std::smatch m;
    bool first = true;
    for (;;) {
        std::string s = trim(rest);
        if (!first) {
            if (s.rfind("∪", 0) == 0) s = s.substr(std::string("∪").size());
            else if (!s.empty() && (s[0] == 'U' || s[0] == 'u') && s.size() > 1 &&
                     (s[1] == '[' || s[1] == ' '))
                s = s.substr(1);
            else break;
            s = trim(s);
        }
        if (!std::regex_search(s, m, interval) || m.position(0) != 0) {
            if (first) bad(key, "expected '[lo,hi]' in '" + text + "'");
            bad(key, "expected an interval after the union in '" + text + "'");
        }
        spec.intervals.emplace_back(std::stod(m[1].str()), std::stod(m[2].str()));
        rest = m.suffix().str();
        first = false;
    }
    if (!std::regex_match(rest, m, tail)) bad(key, "cannot parse '" + text + "'");
    spec.unit = m[1].str();
    if (m[2].matched) spec.step = std::stod(m[2].str());
    if (m[3].matched && !m[3].str().empty() && !spec.unit.empty() && m[3].str() != spec.unit)
        bad(key, "step unit differs from the interval unit");
    if (spec.unit.empty() && m[3].matched) spec.unit = m[3].str();
    for (const auto& [lo, hi] : spec.intervals)
        if (lo > hi) bad(key, "interval lower end exceeds upper end in '" + text + "'");
    return spec;
}

std::vector<DesignKind> parse_design_list(const std::vector<std::string>& names, const std::string& key)
{
    std::vector<DesignKind> out;
    for (const auto& raw : names) {
        const std::string n = trim(raw);
        if (n == "all") {
            for (DesignKind d : all_designs())
                if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
            continue;
        }
        try {
            const DesignKind d = parse_design(n);
            if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
        } catch (const InvalidInputError&) {
            bad(key, "unknown design '" + n + "'");
        }
    }
    if (out.empty()) bad(key, "must name at least one design");
    return out;
}

std::vector<DesignKind> parse_design_list(const std::string& comma_separated, const std::string& key)
{
    std::vector<std::string> names;
    std::stringstream ss(comma_separated);
    std::string item;
    while (std::getline(ss, item, ',')) names.push_back(item);
    return parse_design_list(names, key);
}

namespace {

using Handler = std::function<void(const json&, const std::string&)>;

double as_number(const json& v, const std::string& key)
{
    if (!v.is_number()) bad(key, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& key)
{
    if (!v.is_number_integer()) bad(key, "expected an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& key)
{
    if (!v.is_boolean()) bad(key, "expected true or false");
    return v.get<bool>();
}

std::vector<double> as_numbers(const json& v, const std::string& key)
{
    if (!v.is_array()) bad(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(as_number(x, key));
    return out;
}

double as_level(const json& v, LevelKind kind, const std::string& key)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_level(v.get<std::string>(), kind, key);
    bad(key, "expected a number or a string with a unit");
}

std::vector<std::pair<double, double>> as_pairs(const json& v, const std::string& key)
{
    if (!v.is_array()) bad(key, "expected an array of [lo, hi] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2) bad(key, "expected [lo, hi] pairs");
        out.emplace_back(as_number(p[0], key), as_number(p[1], key));
    }
    return out;
}

void walk(const json& obj, const std::string& prefix, const std::map<std::string, Handler>& handlers)
{
    if (!obj.is_object()) bad(prefix, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        const auto h = handlers.find(it.key());
        if (h == handlers.end()) bad(key, "unknown key");
        h->second(it.value(), key);
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    ExperimentConfig cfg;
    if (trim(text).empty()) {
        cfg.validate();
        return cfg;
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": invalid JSON: " + e.what());
    }
    if (doc.is_null()) doc = json::object();

    std::map<std::string, Handler> array{
        {"num_antennas", [&](const json& v, const std::string& k) { cfg.num_antennas = as_int(v, k); }},
        {"carrier_freq_hz", [&](const json& v, const std::string& k) { cfg.carrier_freq_hz = as_number(v, k); }},
        {"element_spacing_wavelengths",
         [&](const json& v, const std::string& k) { cfg.element_spacing_wavelengths = as_number(v, k); }},
    };
    std::map<std::string, Handler> users{
        {"num_users", [&](const json& v, const std::string& k) { cfg.num_users = as_int(v, k); }},
        {"los_dods_deg", [&](const json& v, const std::string& k) { cfg.los_dods_deg = as_numbers(v, k); }},
        {"paths_per_user", [&](const json& v, const std::string& k) { cfg.paths_per_user = as_int(v, k); }},
        {"los_fraction", [&](const json& v, const std::string& k) { cfg.los_fraction = as_number(v, k); }},
        {"path_loss_db", [&](const json& v, const std::string& k) { cfg.path_loss_db = as_numbers(v, k); }},
    };
    std::map<std::string, Handler> constraints{
        {"max_power", [&](const json& v, const std::string& k) { cfg.max_power_dbm = as_level(v, LevelKind::power, k); }},
        {"min_sinr", [&](const json& v, const std::string& k) { cfg.min_sinr_db = as_level(v, LevelKind::ratio, k); }},
        {"noise_power",
         [&](const json& v, const std::string& k) { cfg.noise_power_dbm = as_level(v, LevelKind::power, k); }},
        {"target_gain",
         [&](const json& v, const std::string& k) { cfg.target_gain_db = as_level(v, LevelKind::gain, k); }},
        {"target_angle_deg", [&](const json& v, const std::string& k) { cfg.target_angle_deg = as_number(v, k); }},
    };
    std::map<std::string, Handler> sensing{
        {"omega",
         [&](const json& v, const std::string& k) {
             if (v.is_string()) {
                 const IntervalSpec s = parse_intervals(v.get<std::string>(), k);
                 if (!s.unit.empty() && s.unit != "deg") bad(k, "angles must be given in deg");
                 cfg.omega_deg = s.intervals;
                 if (s.step > 0.0) cfg.omega_step_deg = s.step;
             } else {
                 cfg.omega_deg = as_pairs(v, k);
             }
         }},
        {"omega_step_deg", [&](const json& v, const std::string& k) { cfg.omega_step_deg = as_number(v, k); }},
        {"range_region",
         [&](const json& v, const std::string& k) {
             if (v.is_string()) {
                 const IntervalSpec s = parse_intervals(v.get<std::string>(), k);
                 if (!s.unit.empty() && s.unit != "m") bad(k, "ranges must be given in m");
                 if (s.step > 0.0) bad(k, "the range region takes no step");
                 cfg.range_region_m = s.intervals;
             } else {
                 cfg.range_region_m = as_pairs(v, k);
             }
         }},
        {"sample_rate_hz", [&](const json& v, const std::string& k) { cfg.sample_rate_hz = as_number(v, k); }},
        {"max_lag", [&](const json& v, const std::string& k) { cfg.max_lag = as_int(v, k); }},
        {"correlation",
         [&](const json& v, const std::string& k) {
             const std::string s = v.is_string() ? v.get<std::string>() : "";
             if (s == "aperiodic") cfg.correlation = CorrelationMode::aperiodic;
             else if (s == "periodic") cfg.correlation = CorrelationMode::periodic;
             else bad(k, "expected \"aperiodic\" or \"periodic\"");
         }},
        {"cross_block_threshold",
         [&](const json& v, const std::string& k) { cfg.cross_block_threshold = as_number(v, k); }},
        {"max_velocity_mps", [&](const json& v, const std::string& k) { cfg.max_velocity_mps = as_number(v, k); }},
    };
    std::map<std::string, Handler> waveform{
        {"roots",
         [&](const json& v, const std::string& k) {
             if (!v.is_array()) bad(k, "expected an array of integers");
             cfg.zc_roots.clear();
             for (const auto& x : v) cfg.zc_roots.push_back(as_int(x, k));
         }},
        {"length", [&](const json& v, const std::string& k) { cfg.zc_length = as_int(v, k); }},
        {"files",
         [&](const json& v, const std::string& k) {
             if (!v.is_array()) bad(k, "expected an array of paths");
             cfg.waveform_files.clear();
             for (const auto& x : v) {
                 if (!x.is_string()) bad(k, "expected an array of paths");
                 cfg.waveform_files.push_back(x.get<std::string>());
             }
         }},
    };
    std::map<std::string, Handler> solver{
        {"eps", [&](const json& v, const std::string& k) { cfg.solver_eps = as_number(v, k); }},
        {"randomizations", [&](const json& v, const std::string& k) { cfg.randomizations = as_int(v, k); }},
        {"rank_one_threshold",
         [&](const json& v, const std::string& k) { cfg.rank_one_threshold = as_number(v, k); }},
        {"threads", [&](const json& v, const std::string& k) { cfg.threads = as_int(v, k); }},
    };
    std::map<std::string, Handler> baselines{
        {"mainlobe_width_deg", [&](const json& v, const std::string& k) { cfg.mainlobe_width_deg = as_number(v, k); }},
        {"grid_step_deg", [&](const json& v, const std::string& k) { cfg.pattern_step_deg = as_number(v, k); }},
    };
    std::map<std::string, Handler> evaluation{
        {"include_receive_factor",
         [&](const json& v, const std::string& k) { cfg.include_receive_factor = as_bool(v, k); }},
        {"heatmap_step_deg", [&](const json& v, const std::string& k) { cfg.heatmap_step_deg = as_number(v, k); }},
        {"cut_step_deg", [&](const json& v, const std::string& k) { cfg.cut_step_deg = as_number(v, k); }},
        {"beampattern_step_deg",
         [&](const json& v, const std::string& k) { cfg.beampattern_step_deg = as_number(v, k); }},
        {"export_af_heatmaps", [&](const json& v, const std::string& k) { cfg.export_af_heatmaps = as_bool(v, k); }},
    };
    std::map<std::string, Handler> sweep{
        {"gamma_c_db", [&](const json& v, const std::string& k) { cfg.sweep_gamma_c_db = as_numbers(v, k); }},
        {"gamma_s_db", [&](const json& v, const std::string& k) { cfg.sweep_gamma_s_db = as_numbers(v, k); }},
        {"seeds", [&](const json& v, const std::string& k) { cfg.sweep_seeds = as_int(v, k); }},
    };
    auto section = [](std::map<std::string, Handler>& h) {
        return [&h](const json& v, const std::string& k) { walk(v, k, h); };
    };
    std::map<std::string, Handler> top{
        {"array", section(array)},
        {"users", section(users)},
        {"constraints", section(constraints)},
        {"sensing", section(sensing)},
        {"waveform", section(waveform)},
        {"solver", section(solver)},
        {"baselines", section(baselines)},
        {"evaluation", section(evaluation)},
        {"sweep", section(sweep)},
        {"seed",
         [&](const json& v, const std::string& k) {
             if (!v.is_number_unsigned()) bad(k, "expected a non-negative integer");
             cfg.seed = v.get<std::uint64_t>();
         }},
        {"designs",
         [&](const json& v, const std::string& k) {
             if (v.is_string()) {
                 cfg.designs = parse_design_list(v.get<std::string>(), k);
                 return;
             }
             if (!v.is_array()) bad(k, "expected a list of design names");
             std::vector<std::string> names;
             for (const auto& x : v) {
                 if (!x.is_string()) bad(k, "expected design names");
                 names.push_back(x.get<std::string>());
             }
             cfg.designs = parse_design_list(names, k);
         }},
        {"output_dir",
         [&](const json& v, const std::string& k) {
             if (!v.is_string()) bad(k, "expected a path");
             cfg.output_dir = v.get<std::string>();
         }},
    };
    try {
        walk(doc, "", top);
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string config_to_json(const ExperimentConfig& c)
{
    auto pairs = [](const auto& v) {
        json a = json::array();
        for (const auto& [lo, hi] : v) a.push_back({lo, hi});
        return a;
    };
    json designs = json::array();
    for (DesignKind d : c.designs) designs.push_back(to_string(d));
    json doc = {
        {"array",
         {{"num_antennas", c.num_antennas},
          {"carrier_freq_hz", c.carrier_freq_hz},
          {"element_spacing_wavelengths", c.element_spacing_wavelengths}}},
        {"users",
         {{"num_users", c.num_users},
          {"los_dods_deg", c.los_dods_deg},
          {"paths_per_user", c.paths_per_user},
          {"los_fraction", c.los_fraction},
          {"path_loss_db", c.path_loss_db}}},
        {"constraints",
         {{"max_power", c.max_power_dbm},
          {"min_sinr", c.min_sinr_db},
          {"noise_power", c.noise_power_dbm},
          {"target_gain", c.target_gain_db},
          {"target_angle_deg", c.target_angle_deg}}},
        {"sensing",
         {{"omega", pairs(c.omega_deg)},
          {"omega_step_deg", c.omega_step_deg},
          {"range_region", pairs(c.range_region_m)},
          {"sample_rate_hz", c.sample_rate_hz},
          {"max_lag", c.max_lag},
          {"correlation", c.correlation == CorrelationMode::aperiodic ? "aperiodic" : "periodic"},
          {"cross_block_threshold", c.cross_block_threshold},
          {"max_velocity_mps", c.max_velocity_mps}}},
        {"waveform", {{"roots", c.zc_roots}, {"length", c.zc_length}, {"files", c.waveform_files}}},
        {"solver",
         {{"eps", c.solver_eps},
          {"randomizations", c.randomizations},
          {"rank_one_threshold", c.rank_one_threshold},
          {"threads", c.threads}}},
        {"baselines", {{"mainlobe_width_deg", c.mainlobe_width_deg}, {"grid_step_deg", c.pattern_step_deg}}},
        {"evaluation",
         {{"include_receive_factor", c.include_receive_factor},
          {"heatmap_step_deg", c.heatmap_step_deg},
          {"cut_step_deg", c.cut_step_deg},
          {"beampattern_step_deg", c.beampattern_step_deg},
          {"export_af_heatmaps", c.export_af_heatmaps}}},
        {"sweep", {{"gamma_c_db", c.sweep_gamma_c_db}, {"gamma_s_db", c.sweep_gamma_s_db}, {"seeds", c.sweep_seeds}}},
        {"seed", c.seed},
        {"designs", designs},
        {"output_dir", c.output_dir},
    };
    return doc.dump(2);
}

std::string config_hash(const ExperimentConfig& config)
{
    // output_dir does not change results
    ExperimentConfig c = config;
    c.output_dir = "-";
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : config_to_json(c)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace isac
