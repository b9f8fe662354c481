// SPDX-License-Identifier: Apache-2.0
//
// ra-toolkit: rotatable-antenna channel modelling, optimization and estimation
// Copyright (C) 2026 The ra-toolkit authors
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

#pragma once

#include "ra/estimate/beam_training.hpp"
#include "ra/estimate/ml.hpp"
#include "ra/estimate/music.hpp"
#include "ra/estimate/nmse.hpp"
#include "ra/estimate/pilots.hpp"
#include "ra/estimate/sparse.hpp"
#include "ra/harness/config.hpp"
#include "ra/optimize/isac.hpp"
#include "ra/optimize/miso.hpp"
#include "ra/optimize/multiuser.hpp"
#include "ra/optimize/wideband.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <initializer_list>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace ra
{

namespace scheme
{
inline constexpr const char *ra_optimized = "RA-optimized";
inline constexpr const char *fixed = "fixed-orientation";
inline constexpr const char *random = "random-orientation";
inline constexpr const char *array_wise = "array-wise";
inline constexpr const char *designed = "dynamic-designed";
inline constexpr const char *dynamic_random = "dynamic-random";
} // namespace scheme

struct SchemeSamples
{
    std::string scheme;
    std::string metric;
    std::vector<double> samples; // NaN marks a failed or infeasible trial
};

inline constexpr double failed_trial = std::numeric_limits<double>::quiet_NaN();

// ------------------------------------------------------------------------
// Scenario builders
// ------------------------------------------------------------------------
inline Scenario base_scenario(const ExperimentParams &p)
{
    Scenario s;
    s.carrier_frequency = p.carrier_frequency_hz;
    s.noise_power = dbm_to_watt(p.noise_power_dbm);
    s.tx_power = dbm_to_watt(p.tx_power_dbm);
    s.p_max_comm = dbm_to_watt(p.p_max_comm_dbm);
    s.p_max_sense = dbm_to_watt(p.p_max_sense_dbm);
    s.pattern = GainPattern::cosine(p.rho);
    s.constraint = RotationConstraint::continuous(p.theta_max_rad);
    return s;
}

inline double element_spacing(const ExperimentParams &p)
{
    return p.spacing_wavelengths * speed_of_light / p.carrier_frequency_hz;
}

// Single user in the horizontal plane in front of a ULA.
inline Scenario single_user_scenario(const ExperimentParams &p)
{
    Scenario s = base_scenario(p);
    s.bs = ArrayLayout::ula(static_cast<int>(p.num_antennas), element_spacing(p));
    const double az = deg_to_rad(p.user_azimuth_deg);
    s.users = {p.distance_m * Vec3(std::cos(az), std::sin(az), 0.0)};
    return s;
}

// UPA with users stratified in azimuth over [-span, span], elevation within
// +-10 deg, distances U[d_min, d_max], and scattering clusters near the users.
inline Scenario multiuser_scenario(const ExperimentParams &p, std::mt19937_64 &rng)
{
    Scenario s = base_scenario(p);
    s.bs = ArrayLayout::upa(static_cast<int>(p.array_ny), static_cast<int>(p.array_nz), element_spacing(p));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int K = static_cast<int>(p.users);
    const double span = deg_to_rad(p.user_span_deg);
    for (int k = 0; k < K; ++k)
    {
        const double az = -span + 2.0 * span * (k + U(rng)) / K;
        const double el = deg_to_rad(-10.0 + 20.0 * U(rng));
        const double d = p.distance_min_m + (p.distance_max_m - p.distance_min_m) * U(rng);
        s.users.push_back(d * Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)));
    }
    for (int q = 0; q < static_cast<int>(p.clusters) && K > 0; ++q)
    {
        const Vec3 base = s.users[static_cast<std::size_t>(q % K)];
        const Vec3 off(U(rng) * 10.0 - 5.0, U(rng) * 10.0 - 5.0, U(rng) * 4.0 - 2.0);
        s.clusters.push_back({base + off, std::polar(p.cluster_rcs, two_pi * U(rng))});
    }
    return s;
}

// ISAC geometry: users evenly spread in azimuth at a common distance, and a
// horizontal sensing disc sampled at `sensing_points` points.
inline std::pair<Scenario, SensingTask> isac_scenario(const ExperimentParams &p)
{
    Scenario s = base_scenario(p);
    s.bs = ArrayLayout::upa(static_cast<int>(p.array_ny), static_cast<int>(p.array_nz), element_spacing(p));
    const int K = static_cast<int>(p.users);
    const double span = deg_to_rad(p.user_span_deg);
    for (int k = 0; k < K; ++k)
    {
        const double az = K == 1 ? 0.0 : -span + 2.0 * span * k / (K - 1);
        s.users.push_back(p.user_distance_m * Vec3(std::cos(az), std::sin(az), 0.0));
    }
    SensingTask t = SensingTask::horizontal_disc(Vec3(p.region_x_m, p.region_y_m, p.region_z_m), p.region_radius_m,
                                                 static_cast<int>(p.sensing_points));
    t.rate_floor = p.rate_floor_bps_hz;
    t.p_max_comm = s.p_max_comm;
    t.p_max_sense = s.p_max_sense;
    return {s, t};
}

inline SolverOptions solver_options(const ExperimentParams &p)
{
    return SolverOptions{p.tol, static_cast<int>(p.max_iter)};
}

// ------------------------------------------------------------------------
// Per-point runners
// ------------------------------------------------------------------------
inline std::vector<SchemeSamples> run_fig11_point(const ExperimentParams &p, int, std::uint64_t)
{
    const Scenario s = single_user_scenario(p);
    const auto ra = optimal_pointing_miso(s, 0);
    const std::vector<Orientation> fixed(s.num_antennas(), orientation_from_pointing(e1()));
    const double fx = miso_snr(s, fixed, 0);
    return {{scheme::ra_optimized, "received_power_dBm", {watt_to_dbm(ra.snr * s.noise_power)}},
            {scheme::fixed, "received_power_dBm", {watt_to_dbm(fx * s.noise_power)}}};
}

template <class F> double guarded(F &&f)
{
    try
    {
        return f();
    }
    catch (const Error &)
    {
        return failed_trial;
    }
}

// Runs body(t) for t in [0, trials). Trials draw their own seeded streams, so
// the result does not depend on the number of worker threads.
template <class F> void for_each_trial(int trials, F &&body)
{
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = std::min<int>(static_cast<int>(hw), trials);
    if (workers <= 1)
    {
        for (int t = 0; t < trials; ++t)
            body(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try
            {
                for (int t = next++; t < trials; t = next++)
                    body(t);
            }
            catch (...)
            {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    for (auto &th : pool)
        th.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

inline std::vector<SchemeSamples> schemes(std::initializer_list<const char *> names, const char *metric, int trials)
{
    std::vector<SchemeSamples> out;
    for (const char *n : names)
        out.push_back({n, metric, std::vector<double>(static_cast<std::size_t>(trials), failed_trial)});
    return out;
}

inline std::vector<SchemeSamples> run_fig12_point(const ExperimentParams &p, int trials, std::uint64_t seed)
{
    auto out = schemes({scheme::ra_optimized, scheme::fixed, scheme::random}, "min_rate_bps_hz", trials);
    for_each_trial(trials, [&](int t) {
        const auto i = static_cast<std::size_t>(t);
        auto rng = trial_rng(seed, i, 12);
        const Scenario s = multiuser_scenario(p, rng);
        auto orng = trial_rng(seed, i, 13);
        const Cone cone = Cone::about_x(p.theta_max_rad);
        MaxMinOptions mo;
        mo.solver = solver_options(p);
        out[0].samples[i] = guarded([&] { return maxmin_sinr_ao(s, mo).objective; });
        out[1].samples[i] = guarded([&] {
            return maxmin_rate(s, std::vector<Orientation>(s.num_antennas(), orientation_from_pointing(e1())));
        });
        const auto rnd = orientations_from_pointings(random_pointings(orng, s.num_antennas(), cone));
        out[2].samples[i] = guarded([&] { return maxmin_rate(s, rnd); });
    });
    return out;
}

inline std::vector<SchemeSamples> run_fig13_point(const ExperimentParams &p, int trials, std::uint64_t seed)
{
    auto out = schemes({scheme::ra_optimized, scheme::fixed, scheme::random}, "sum_rate_bps_hz", trials);
    const WidebandConfig wb{p.bandwidth_hz, static_cast<int>(p.subcarriers), static_cast<int>(p.cp_length)};
    for_each_trial(trials, [&](int t) {
        const auto i = static_cast<std::size_t>(t);
        auto rng = trial_rng(seed, i, 12);
        const Scenario s = multiuser_scenario(p, rng);
        auto orng = trial_rng(seed, i, 13);
        const Cone cone = Cone::about_x(p.theta_max_rad);
        WidebandOptions wo;
        wo.solver = solver_options(p);
        out[0].samples[i] = guarded([&] { return wideband_sumrate_ao(s, wb, wo).objective; });
        WidebandOptions fixed;
        fixed.initial = Pointings(s.num_antennas(), e1());
        fixed.optimize_orientation = false;
        out[1].samples[i] = guarded([&] { return wideband_sumrate_ao(s, wb, fixed).objective; });
        WidebandOptions rnd = fixed;
        rnd.initial = random_pointings(orng, s.num_antennas(), cone);
        out[2].samples[i] = guarded([&] { return wideband_sumrate_ao(s, wb, rnd).objective; });
    });
    return out;
}

struct IsacComparison
{
    OptimizationResult ra, array_wise, fixed;
};

// Fixed keeps broadside; array-wise starts from broadside among its defaults;
// the per-antenna solver is additionally started from the array-wise optimum.
inline IsacComparison isac_schemes(const Scenario &s, const SensingTask &task, const SolverOptions &solver)
{
    IsacComparison c;
    const std::size_t N = s.num_antennas();
    IsacOptions fx;
    fx.solver = solver;
    fx.starts = {Pointings(N, e1())};
    fx.default_starts = false;
    fx.optimize_orientation = false;
    c.fixed = isac_minecho_bcd(s, task, fx);

    IsacOptions aw;
    aw.solver = solver;
    aw.tied = true;
    c.array_wise = isac_minecho_bcd(s, task, aw);

    IsacOptions ra;
    ra.solver = solver;
    if (c.array_wise.status != SolverStatus::Infeasible)
        ra.starts = {pointings_of(c.array_wise.orientations)};
    c.ra = isac_minecho_bcd(s, task, ra);
    // A common orientation is also a per-antenna configuration.
    if (c.array_wise.status != SolverStatus::Infeasible &&
        (c.ra.status == SolverStatus::Infeasible || c.array_wise.objective > c.ra.objective))
    {
        c.ra.objective = c.array_wise.objective;
        c.ra.orientations = c.array_wise.orientations;
        c.ra.beamformers = c.array_wise.beamformers;
        c.ra.status = c.array_wise.status;
    }
    return c;
}

inline std::vector<SchemeSamples> run_fig14_point(const ExperimentParams &p, int, std::uint64_t)
{
    const auto [s, task] = isac_scenario(p);
    const auto c = isac_schemes(s, task, solver_options(p));
    auto dbm = [](const OptimizationResult &r) {
        return r.status == SolverStatus::Infeasible || !(r.objective > 0.0) ? failed_trial : watt_to_dbm(r.objective);
    };
    return {{scheme::ra_optimized, "min_echo_power_dBm", {dbm(c.ra)}},
            {scheme::array_wise, "min_echo_power_dBm", {dbm(c.array_wise)}},
            {scheme::fixed, "min_echo_power_dBm", {dbm(c.fixed)}}};
}

// ------------------------------------------------------------------------
// Channel estimation
// ------------------------------------------------------------------------

// LoS path within +-60 deg azimuth and +-20 deg elevation; scattered paths
// anywhere in the front sector with weaker coefficients.
template <class Rng> PathParameters random_user_paths(Rng &rng, int paths)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    PathParameters p;
    for (int q = 0; q < paths; ++q)
    {
        const bool los = q == 0;
        p.zenith.push_back(deg_to_rad(los ? 70.0 + 40.0 * U(rng) : 60.0 + 60.0 * U(rng)));
        p.azimuth.push_back(deg_to_rad(los ? -60.0 + 120.0 * U(rng) : -70.0 + 140.0 * U(rng)));
        p.beta.push_back(std::polar(los ? 1.0 : 0.2 + 0.3 * U(rng), two_pi * U(rng)));
    }
    return p;
}

struct EstimationTrial
{
    ParametricModel model;
    std::vector<PathParameters> truth;
    Measurement measurement;
    std::vector<Pointings> evaluation;
};

inline ScheduleStrategy strategy_of(const std::string &name)
{
    if (name == scheme::designed)
        return ScheduleStrategy::DynamicDesigned;
    if (name == scheme::dynamic_random)
        return ScheduleStrategy::DynamicRandom;
    if (name == scheme::fixed)
        return ScheduleStrategy::Fixed;
    throw ConfigurationError("unknown training scheme '" + name + "'");
}

// One Monte Carlo draw of the uplink training experiment on a ULA. The noise
// power sets the per-antenna broadside SNR averaged over users.
inline EstimationTrial estimation_trial(const ExperimentParams &p, const PilotSchedule &schedule, std::uint64_t seed,
                                        std::uint64_t trial)
{
    const int N = static_cast<int>(p.num_antennas);
    const double lambda = speed_of_light / p.carrier_frequency_hz;
    ParametricModel model(ArrayLayout::ula(N, element_spacing(p)), GainPattern::cosine(p.rho), lambda, schedule);

    auto rng = trial_rng(seed, trial, 10);
    std::vector<PathParameters> users;
    for (int k = 0; k < static_cast<int>(p.users); ++k)
        users.push_back(random_user_paths(rng, static_cast<int>(p.clusters) + 1));

    const std::vector<Orientation> broadside(static_cast<std::size_t>(N), orientation_from_pointing(e1()));
    double signal = 0.0;
    for (const auto &u : users)
        signal += model.channel(broadside, u).squaredNorm() / (N * static_cast<double>(users.size()));
    const double noise = signal / db_to_linear(p.snr_db);

    auto nrng = trial_rng(seed, trial, 11);
    const std::vector<double> powers(users.size(), 1.0);
    Measurement meas = simulate_pilots(schedule, block_channels(model, users), powers, noise, nrng);

    auto erng = trial_rng(seed, trial, 14);
    std::vector<Pointings> eval;
    for (int e = 0; e < static_cast<int>(p.evaluation_sets); ++e)
        eval.push_back(random_pointings(erng, static_cast<std::size_t>(N), Cone::about_x(p.theta_max_rad)));
    return {std::move(model), std::move(users), std::move(meas), std::move(eval)};
}

inline EstimationTrial estimation_trial(const ExperimentParams &p, ScheduleStrategy strategy, std::uint64_t seed,
                                        std::uint64_t trial)
{
    const auto constraint = RotationConstraint::continuous(p.theta_max_rad);
    const auto schedule = schedule_orientations(constraint, static_cast<int>(p.num_antennas),
                                                static_cast<int>(p.pilot_blocks), static_cast<int>(p.pilot_slots),
                                                strategy, seed ^ (0x9e3779b97f4a7c15ULL * (trial + 1)));
    return estimation_trial(p, schedule, seed, trial);
}

inline MlOptions experiment_ml_options()
{
    MlOptions o;
    o.max_iter = 60;
    o.tol = 1e-9;
    return o;
}

inline double ml_nmse(const EstimationTrial &tr, const MlOptions &opt = experiment_ml_options())
{
    const auto dict = build_dictionary(tr.model, opt.grid);
    std::vector<PathParameters> est;
    for (std::size_t k = 0; k < tr.truth.size(); ++k)
        est.push_back(ml_estimate(tr.model, dict, decorrelate(tr.measurement, k),
                                  static_cast<int>(tr.truth[k].num_paths()), opt)
                          .params);
    return reconstruct_and_nmse(tr.model, est, tr.truth, tr.evaluation);
}

inline std::vector<SchemeSamples> run_fig10_point(const ExperimentParams &p, int trials, std::uint64_t seed)
{
    auto out = schemes({scheme::designed, scheme::dynamic_random, scheme::fixed}, "nmse_dB", trials);
    for_each_trial(trials, [&](int t) {
        for (auto &o : out)
            o.samples[static_cast<std::size_t>(t)] = guarded([&] {
                const auto tr = estimation_trial(p, strategy_of(o.scheme), seed, static_cast<std::uint64_t>(t));
                return linear_to_db(ml_nmse(tr));
            });
    });
    return out;
}

enum class EstimationMethod
{
    Ml,
    Omp,
    Music
};

inline EstimationMethod parse_estimation_method(const std::string &s)
{
    if (s == "ml")
        return EstimationMethod::Ml;
    if (s == "omp")
        return EstimationMethod::Omp;
    if (s == "music")
        return EstimationMethod::Music;
    throw ConfigurationError("unknown estimation method '" + s + "' (expected ml, omp or music)");
}

inline double angle_between(double z1, double a1, double z2, double a2)
{
    return std::acos(std::clamp(path_direction(z1, a1).dot(path_direction(z2, a2)), -1.0, 1.0));
}

// One training scheme and one estimator. ML and OMP report the channel NMSE;
// MUSIC reports the mean LoS direction error (deg) with peaks matched greedily.
inline SchemeSamples run_estimation(const ExperimentParams &p, EstimationMethod method, ScheduleStrategy strategy,
                                    int trials, std::uint64_t seed)
{
    const char *metric = method == EstimationMethod::Music ? "los_angle_error_deg" : "nmse_dB";
    auto out = schemes({""}, metric, trials).front();
    out.scheme = to_string(strategy);
    for_each_trial(trials, [&](int t) {
        out.samples[static_cast<std::size_t>(t)] = guarded([&] {
            const auto tr = estimation_trial(p, strategy, seed, static_cast<std::uint64_t>(t));
            const MlOptions opt = experiment_ml_options();
            if (method == EstimationMethod::Ml)
                return linear_to_db(ml_nmse(tr, opt));
            if (method == EstimationMethod::Omp)
            {
                const auto dict = build_dictionary(tr.model, opt.grid);
                std::vector<PathParameters> est;
                for (std::size_t k = 0; k < tr.truth.size(); ++k)
                    est.push_back(omp_estimate(tr.model, dict, decorrelate(tr.measurement, k),
                                               static_cast<int>(tr.truth[k].num_paths())));
                return linear_to_db(reconstruct_and_nmse(tr.model, est, tr.truth, tr.evaluation));
            }
            const int K = static_cast<int>(tr.truth.size());
            const auto mu = music_estimate(tr.model, tr.measurement, K, opt.grid);
            std::vector<bool> used(mu.zenith.size(), false);
            double err = 0.0;
            for (const auto &u : tr.truth)
            {
                double best = std::numeric_limits<double>::infinity();
                std::size_t arg = 0;
                for (std::size_t i = 0; i < mu.zenith.size(); ++i)
                    if (!used[i])
                        if (const double e = angle_between(mu.zenith[i], mu.azimuth[i], u.zenith[0], u.azimuth[0]);
                            e < best)
                        {
                            best = e;
                            arg = i;
                        }
                if (!std::isfinite(best))
                    return failed_trial;
                used[arg] = true;
                err += best;
            }
            return rad_to_deg(err / K);
        });
    });
    return out;
}

// ------------------------------------------------------------------------
// Beam training
// ------------------------------------------------------------------------
inline ChannelOracle farfield_oracle(const ArrayLayout &layout, const GainPattern &pattern, double wavelength,
                                     const PathParameters &paths)
{
    return [=](const Pointings &F) {
        const PilotSchedule s{1, {F}, ScheduleStrategy::Fixed};
        return ParametricModel(layout, pattern, wavelength, s).stacked_channel(paths);
    };
}

// Exhaustive and hierarchical search on a UPA for one user with `clusters`
// scattered paths. Reports the power ratio to exhaustive and the probe count.
inline std::vector<SchemeSamples> run_beam_training(const ExperimentParams &p, int trials, std::uint64_t seed)
{
    std::vector<SchemeSamples> out = schemes({"exhaustive", "hierarchical"}, "power_ratio", trials);
    auto probes = schemes({"exhaustive", "hierarchical"}, "probes", trials);
    const double lambda = speed_of_light / p.carrier_frequency_hz;
    const auto layout =
        ArrayLayout::upa(static_cast<int>(p.array_ny), static_cast<int>(p.array_nz), element_spacing(p));
    const Cone cone = Cone::about_x(p.theta_max_rad);
    const auto oc = fibonacci_orientation_codebook(16, 4, cone, static_cast<int>(layout.size()));
    const auto bc = dft_beam_codebook(layout, lambda);
    for_each_trial(trials, [&](int t) {
        const auto i = static_cast<std::size_t>(t);
        auto rng = trial_rng(seed, i, 15);
        const auto oracle =
            farfield_oracle(layout, GainPattern::cosine(p.rho), lambda, random_user_paths(rng, static_cast<int>(p.clusters) + 1));
        const auto ex = beam_train(oracle, oc, bc, BeamSearch::Exhaustive);
        const auto hi = beam_train(oracle, oc, bc, BeamSearch::Hierarchical);
        out[0].samples[i] = 1.0;
        out[1].samples[i] = ex.power > 0.0 ? hi.power / ex.power : failed_trial;
        probes[0].samples[i] = ex.probes;
        probes[1].samples[i] = hi.probes;
    });
    out.insert(out.end(), probes.begin(), probes.end());
    return out;
}

// Wraps scheme samples from a single configured point as a table.
inline ResultTable point_table(const std::string &experiment, const std::string &sweep_name, double sweep_value,
                               const std::vector<SchemeSamples> &res, std::uint64_t seed)
{
    ResultTable table;
    for (const auto &sc : res)
    {
        const auto st = summarize(sc.samples);
        table.rows.push_back(
            {experiment, sweep_name, sweep_value, sc.scheme, sc.metric, st.mean, st.median, st.stddev, st.count, seed});
    }
    table.sort();
    return table;
}

// ------------------------------------------------------------------------
// Sweeps
// ------------------------------------------------------------------------
using PointRunner = std::function<std::vector<SchemeSamples>(const ExperimentParams &, int, std::uint64_t)>;

inline PointRunner point_runner(ExperimentId base)
{
    switch (base)
    {
    case ExperimentId::Fig10:
        return run_fig10_point;
    case ExperimentId::Fig11:
        return run_fig11_point;
    case ExperimentId::Fig12:
        return run_fig12_point;
    case ExperimentId::Fig13:
        return run_fig13_point;
    case ExperimentId::Fig14:
        return run_fig14_point;
    case ExperimentId::Custom:
        break;
    }
    throw ConfigurationError("custom experiments need a base experiment");
}

// Runs every sweep point. A point whose scenario is invalid or whose solver
// fails is reported with NaN statistics and the sweep continues.
inline ResultTable run_experiment(const ExperimentConfig &cfg)
{
    cfg.validate();
    const PointRunner runner = point_runner(cfg.base);
    ResultTable table;
    for (double v : cfg.sweep_values)
    {
        ExperimentParams p = cfg.params;
        set_param(p, cfg.sweep_name, v);
        std::vector<SchemeSamples> res;
        const bool valid = invalid_params(p).empty();
        if (valid)
        {
            try
            {
                res = runner(p, cfg.trials, cfg.seed);
            }
            catch (const Error &)
            {
                res.clear();
            }
        }
        if (res.empty())
        {
            ResultRow r;
            r.experiment = to_string(cfg.id);
            r.sweep_name = cfg.sweep_name;
            r.sweep_value = v;
            r.scheme = "all";
            r.metric = "failed";
            r.mean = r.median = r.stddev = failed_trial;
            r.seed = cfg.seed;
            table.rows.push_back(r);
            continue;
        }
        for (const auto &sc : res)
        {
            const auto st = summarize(sc.samples);
            table.rows.push_back({to_string(cfg.id), cfg.sweep_name, v, sc.scheme, sc.metric, st.mean, st.median,
                                  st.stddev, st.count, cfg.seed});
        }
    }
    table.sort();
    return table;
}

} // namespace ra
