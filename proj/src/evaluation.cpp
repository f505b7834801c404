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

#include "isac/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace isac {

bool design_has_sinr_constraint(DesignKind kind) { return kind != DesignKind::sensing_only; }

bool design_has_gain_equality(DesignKind kind)
{
    return kind == DesignKind::proposed || kind == DesignKind::sensing_only;
}

MetricsBundle compute_metrics(DesignKind design, const CMatrix& W, const DesignContext& ctx)
{
    ctx.validate();
    MetricsBundle m;
    m.design = design;
    const double theta0 = ctx.constraints.target_angle_rad;
    m.isl = isl_direct(W, *ctx.geometry, *ctx.corr, *ctx.mask, theta0, *ctx.omega);
    m.mainlobe = mainlobe_magnitude(W, *ctx.geometry, *ctx.corr, theta0);
    m.islr_db = islr_db(m.isl, m.mainlobe);
    const RVector sinr = user_sinr(W, *ctx.channels, ctx.constraints.noise_power_mw);
    m.per_user_sinr_db.resize(sinr.size());
    for (Eigen::Index k = 0; k < sinr.size(); ++k) m.per_user_sinr_db(k) = linear_to_db(sinr(k));
    m.total_power_mw = W.squaredNorm();
    m.target_gain_mw = target_gain(W, *ctx.geometry, 0.0, theta0);
    return m;
}

VerificationReport verify_beamformer(const CMatrix& W, const ChannelSet& channels, const ArrayGeometry& geometry,
                                     const DesignConstraints& c, bool check_sinr, bool check_gain, double gain_tol,
                                     double power_tol, double sinr_slack)
{
    VerificationReport rep;
    if (W.rows() != geometry.num_antennas || W.cols() != channels.num_users()) {
        rep.passed = false;
        rep.failures.push_back("beamformer has the wrong shape");
        return rep;
    }
    auto fail = [&](const std::string& s) {
        rep.passed = false;
        rep.failures.push_back(s);
    };
    std::ostringstream os;
    os.precision(10);
    const double power = W.squaredNorm();
    if (!(power <= c.max_power_mw * (1.0 + power_tol))) {
        os.str("");
        os << "total power " << power << " mW exceeds " << c.max_power_mw << " mW";
        fail(os.str());
    }
    if (check_sinr) {
        const RVector sinr = user_sinr(W, channels, c.noise_power_mw);
        for (Eigen::Index k = 0; k < sinr.size(); ++k)
            if (!(sinr(k) >= c.min_sinr * (1.0 - sinr_slack))) {
                os.str("");
                os << "user " << k << " SINR " << linear_to_db(sinr(k)) << " dB below " << linear_to_db(c.min_sinr)
                   << " dB";
                fail(os.str());
            }
    }
    if (check_gain) {
        const double g = target_gain(W, geometry, 0.0, c.target_angle_rad);
        if (!(std::abs(g - c.target_gain_mw) <= gain_tol * c.target_gain_mw)) {
            os.str("");
            os << "target gain " << g << " mW differs from " << c.target_gain_mw << " mW";
            fail(os.str());
        }
    }
    return rep;
}

namespace {

int zero_doppler(const CorrelationMatrix& corr)
{
    const int d0 = corr.grid.doppler_index(0.0);
    if (d0 < 0) throw InvalidInputError("evaluation: correlation grid has no zero-Doppler bin");
    return d0;
}

double to_db_amplitude(double mag, double peak)
{
    if (!(peak > 0.0) || !(mag > 0.0)) return kDbFloor;
    return std::max(20.0 * std::log10(mag / peak), kDbFloor);
}

RVector normalize_db(const RVector& mag)
{
    const double peak = mag.size() ? mag.maxCoeff() : 0.0;
    RVector out(mag.size());
    for (Eigen::Index i = 0; i < mag.size(); ++i) out(i) = to_db_amplitude(mag(i), peak);
    return out;
}

Complex receive_factor(const ArrayGeometry& geometry, double theta0, double theta1, bool include)
{
    if (!include) return Complex(1.0, 0.0);
    return steering_vector(geometry, 0.0, theta0).dot(steering_vector(geometry, 0.0, theta1));
}

void put(std::ostream& os, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

void put_short(std::ostream& os, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    os << buf;
}

} // namespace

Cut range_cut(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr, double theta0,
              bool include_receive_factor)
{
    if (W.rows() != geometry.num_antennas || W.cols() != corr.num_users)
        throw DimensionError("range_cut: beamformer shape mismatch");
    const int d0 = zero_doppler(corr);
    const CVector ups = W.adjoint() * steering_vector(geometry, 0.0, theta0);
    const Complex xi = receive_factor(geometry, theta0, theta0, include_receive_factor);
    Cut cut;
    RVector mag(corr.grid.num_lags());
    for (int li = 0; li < corr.grid.num_lags(); ++li) {
        cut.axis.push_back(corr.grid.lags[static_cast<std::size_t>(li)] * corr.grid.bin_size_m());
        mag(li) = std::abs(af_at_lag(ups, ups, corr, li, d0, xi));
    }
    cut.mag_db = normalize_db(mag);
    return cut;
}

Cut angle_cut(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr, double theta0,
              const std::vector<double>& angles, bool include_receive_factor)
{
    if (W.rows() != geometry.num_antennas || W.cols() != corr.num_users)
        throw DimensionError("angle_cut: beamformer shape mismatch");
    const int d0 = zero_doppler(corr);
    const int l0 = corr.grid.lag_index(0);
    const CVector ups0 = W.adjoint() * steering_vector(geometry, 0.0, theta0);
    Cut cut;
    RVector mag(static_cast<Eigen::Index>(angles.size()));
    for (std::size_t p = 0; p < angles.size(); ++p) {
        const CVector ups1 = W.adjoint() * steering_vector(geometry, 0.0, angles[p]);
        cut.axis.push_back(rad_to_deg(angles[p]));
        mag(static_cast<Eigen::Index>(p)) = std::abs(
            af_at_lag(ups0, ups1, corr, l0, d0, receive_factor(geometry, theta0, angles[p], include_receive_factor)));
    }
    cut.mag_db = normalize_db(mag);
    return cut;
}

Heatmap heatmap(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr, double theta0,
                const std::vector<double>& angles, bool include_receive_factor)
{
    if (W.rows() != geometry.num_antennas || W.cols() != corr.num_users)
        throw DimensionError("heatmap: beamformer shape mismatch");
    const int d0 = zero_doppler(corr);
    const CVector ups0 = W.adjoint() * steering_vector(geometry, 0.0, theta0);
    Heatmap map;
    for (int lag : corr.grid.lags) map.delta_r_m.push_back(lag * corr.grid.bin_size_m());
    RMatrix mag(static_cast<Eigen::Index>(angles.size()), corr.grid.num_lags());
    for (std::size_t p = 0; p < angles.size(); ++p) {
        map.angles_deg.push_back(rad_to_deg(angles[p]));
        const CVector ups1 = W.adjoint() * steering_vector(geometry, 0.0, angles[p]);
        const Complex xi = receive_factor(geometry, theta0, angles[p], include_receive_factor);
        for (int li = 0; li < corr.grid.num_lags(); ++li)
            mag(static_cast<Eigen::Index>(p), li) = std::abs(af_at_lag(ups0, ups1, corr, li, d0, xi));
    }
    const double peak = mag.size() ? mag.maxCoeff() : 0.0;
    map.mag_db = mag.unaryExpr([peak](double v) { return to_db_amplitude(v, peak); });
    return map;
}

RVector beampattern_dbm(const CMatrix& W, const ArrayGeometry& geometry, const std::vector<double>& angles)
{
    const RVector g = beampattern(W * W.adjoint(), geometry, angles);
    return g.unaryExpr([](double v) { return linear_to_db(v); });
}

double max_sidelobe_db(const Cut& cut, const std::vector<RangeInterval>& region)
{
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cut.axis.size(); ++i) {
        const double r = cut.axis[i];
        for (const auto& [lo, hi] : region)
            if (r >= lo && r <= hi) best = std::max(best, cut.mag_db(static_cast<Eigen::Index>(i)));
    }
    if (!std::isfinite(best)) throw InvalidInputError("max_sidelobe_db: region contains no cut sample");
    return best;
}

double median(std::vector<double> values)
{
    if (values.empty()) throw InvalidInputError("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SweepResult sweep_islr(const SweepSetup& setup, const std::vector<double>& gamma_c_db,
                       const std::vector<double>& gamma_s_db, const std::vector<DesignKind>& designs)
{
    if (!setup.corr || !setup.mask || !setup.omega) throw InvalidInputError("sweep_islr: incomplete setup");
    if (setup.channel_seeds.empty()) throw InvalidInputError("sweep_islr: no channel seeds");

    struct Job {
        std::size_t c, s, seed;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < gamma_c_db.size(); ++c)
        for (std::size_t s = 0; s < gamma_s_db.size(); ++s)
            for (std::size_t n = 0; n < setup.channel_seeds.size(); ++n) jobs.push_back({c, s, n});

    // Results per job and design; NaN marks a failed run.
    const std::size_t D = designs.size();
    std::vector<double> islr(jobs.size() * D, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> reasons(jobs.size() * D);

    auto run_job = [&](std::size_t j) {
        const Job& job = jobs[j];
        ChannelConfig cc = setup.channel;
        cc.seed = setup.channel_seeds[job.seed];
        cc.noise_power_mw = setup.base.noise_power_mw;
        const ChannelSet ch = generate_channels(cc, setup.geometry);
        DesignContext ctx;
        ctx.geometry = &setup.geometry;
        ctx.channels = &ch;
        ctx.corr = setup.corr;
        ctx.mask = setup.mask;
        ctx.omega = setup.omega;
        ctx.constraints = setup.base;
        ctx.constraints.min_sinr = db_to_linear(gamma_c_db[job.c]);
        ctx.constraints.target_gain_mw = db_to_linear(gamma_s_db[job.s]);
        ctx.extraction = setup.extraction;
        ctx.extraction.threads = 1;
        ctx.solver_eps = setup.solver_eps;
        ctx.beampattern = setup.beampattern;
        for (std::size_t d = 0; d < D; ++d) {
            try {
                const DesignResult r = run_design(designs[d], ctx);
                islr[j * D + d] = compute_metrics(designs[d], r.W, ctx).islr_db;
            } catch (const Error& e) {
                std::ostringstream os;
                os << "gamma_c " << gamma_c_db[job.c] << " dB, gamma_s " << gamma_s_db[job.s] << " dB, "
                   << to_string(designs[d]) << ", seed " << setup.channel_seeds[job.seed] << ": " << e.what();
                reasons[j * D + d] = os.str();
            }
        }
    };

    int threads = setup.threads > 0 ? setup.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, static_cast<int>(jobs.size()));
    if (threads == 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
    } else {
        std::mutex mu;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t j;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= jobs.size()) return;
                        j = next++;
                    }
                    run_job(j);
                }
            });
        for (auto& th : pool) th.join();
    }

    SweepResult out;
    for (const auto& r : reasons)
        if (!r.empty()) out.skipped.push_back(r);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t S = setup.channel_seeds.size();
    for (std::size_t c = 0; c < gamma_c_db.size(); ++c)
        for (std::size_t s = 0; s < gamma_s_db.size(); ++s)
            for (std::size_t d = 0; d < D; ++d) {
                std::vector<double> vals;
                const std::size_t first = (c * gamma_s_db.size() + s) * S;
                for (std::size_t n = 0; n < S; ++n) {
                    const double v = islr[(first + n) * D + d];
                    if (!std::isnan(v)) vals.push_back(v);
                }
                if (vals.empty()) {
                    out.skipped.push_back("cell gamma_c " + std::to_string(gamma_c_db[c]) + " dB, gamma_s " +
                                          std::to_string(gamma_s_db[s]) + " dB, " + to_string(designs[d]) +
                                          ": no feasible seed, recorded as absent");
                    continue;
                }
                SweepRow row{gamma_c_db[c], gamma_s_db[s], designs[d], median(vals), static_cast<int>(vals.size())};
                if (designs[d] == DesignKind::proposed) {
                    lo = std::min(lo, row.median_islr_db);
                    hi = std::max(hi, row.median_islr_db);
                }
                out.rows.push_back(row);
            }
    out.proposed_spread_db = std::isfinite(lo) ? hi - lo : 0.0;
    return out;
}

void write_heatmap_csv(std::ostream& os, const std::string& design, const Heatmap& map, bool header)
{
    if (header) os << "design,theta_deg,delta_r_m,mag_db\n";
    for (std::size_t p = 0; p < map.angles_deg.size(); ++p)
        for (std::size_t l = 0; l < map.delta_r_m.size(); ++l) {
            os << design << ',';
            put_short(os, map.angles_deg[p]);
            os << ',';
            put_short(os, map.delta_r_m[l]);
            os << ',';
            put_short(os, map.mag_db(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(l)));
            os << '\n';
        }
}

void write_af_heatmap_csv(std::ostream& os, const Heatmap& map)
{
    os << "theta_deg,delta_r_m,magnitude_db\n";
    for (std::size_t p = 0; p < map.angles_deg.size(); ++p)
        for (std::size_t l = 0; l < map.delta_r_m.size(); ++l) {
            put_short(os, map.angles_deg[p]);
            os << ',';
            put_short(os, map.delta_r_m[l]);
            os << ',';
            put_short(os, map.mag_db(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(l)));
            os << '\n';
        }
}

void write_cut_csv(std::ostream& os, const std::string& design, const Cut& cut, bool header)
{
    if (header) os << "design,axis_value,mag_db\n";
    for (std::size_t i = 0; i < cut.axis.size(); ++i) {
        os << design << ',';
        put_short(os, cut.axis[i]);
        os << ',';
        put_short(os, cut.mag_db(static_cast<Eigen::Index>(i)));
        os << '\n';
    }
}

void write_beampattern_csv(std::ostream& os, const std::string& design, const std::vector<double>& angles,
                           const RVector& gain_dbm, bool header)
{
    if (header) os << "design,theta_deg,gain_dbm\n";
    for (std::size_t i = 0; i < angles.size(); ++i) {
        os << design << ',';
        put_short(os, rad_to_deg(angles[i]));
        os << ',';
        put_short(os, gain_dbm(static_cast<Eigen::Index>(i)));
        os << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& result)
{
    os << "gamma_c_db,gamma_s_db,design,median_islr_db,n_seeds\n";
    for (const auto& r : result.rows) {
        put_short(os, r.gamma_c_db);
        os << ',';
        put_short(os, r.gamma_s_db);
        os << ',' << to_string(r.design) << ',';
        put_short(os, r.median_islr_db);
        os << ',' << r.n_seeds << '\n';
    }
}

void write_beamformer_csv(std::ostream& os, const CMatrix& W)
{
    for (Eigen::Index m = 0; m < W.rows(); ++m) {
        for (Eigen::Index k = 0; k < W.cols(); ++k) {
            if (k) os << ',';
            put(os, W(m, k).real());
            os << ',';
            put(os, W(m, k).imag());
        }
        os << '\n';
    }
}

CMatrix read_beamformer_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInputError("read_beamformer_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw InvalidInputError("read_beamformer_csv: " + path + ":" + std::to_string(lineno) +
                                        ": not a number '" + cell + "'");
            }
        }
        if (vals.empty() || vals.size() % 2)
            throw InvalidInputError("read_beamformer_csv: " + path + ":" + std::to_string(lineno) +
                                    ": expected interleaved real/imag pairs");
        if (!rows.empty() && vals.size() != rows.front().size())
            throw InvalidInputError("read_beamformer_csv: " + path + ":" + std::to_string(lineno) +
                                    ": inconsistent column count");
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw InvalidInputError("read_beamformer_csv: " + path + " is empty");
    CMatrix W(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size() / 2));
    for (std::size_t m = 0; m < rows.size(); ++m)
        for (Eigen::Index k = 0; k < W.cols(); ++k)
            W(static_cast<Eigen::Index>(m), k) =
                Complex(rows[m][static_cast<std::size_t>(2 * k)], rows[m][static_cast<std::size_t>(2 * k + 1)]);
    return W;
}

} // namespace isac
