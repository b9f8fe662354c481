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

#include "ra.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

struct CommonOptions
{
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
    std::string format;
    std::string config;
    std::vector<std::string> overrides;
};

void add_common(CLI::App *cmd, CommonOptions &o)
{
    cmd->add_option("--seed", o.seed, "Master seed (falls back to RA_SEED, then the config)");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output file (default: standard output)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", o.overrides, "Scenario override key=value (repeatable)");
}

std::optional<std::uint64_t> env_seed()
{
    const char *s = std::getenv("RA_SEED");
    if (s == nullptr || *s == '\0')
        return std::nullopt;
    try
    {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != std::string(s).size())
            throw std::invalid_argument(s);
        return static_cast<std::uint64_t>(v);
    }
    catch (const std::exception &)
    {
        throw ra::ConfigurationError(std::string("RA_SEED is not a non-negative integer: '") + s + "'");
    }
}

void apply_overrides(ra::ExperimentParams &p, const std::vector<std::string> &overrides)
{
    for (const auto &kv : overrides)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ra::ConfigurationError("--set expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        double v = 0.0;
        try
        {
            std::size_t pos = 0;
            v = std::stod(value, &pos);
            if (pos != value.size())
                throw std::invalid_argument(value);
        }
        catch (const std::exception &)
        {
            throw ra::ConfigurationError("--set " + key + ": '" + value + "' is not a number");
        }
        ra::set_param(p, key, v);
    }
}

// Config file (if any) with the experiment as fallback, then flag overrides.
ra::ExperimentConfig resolve(const CommonOptions &o, std::optional<ra::ExperimentId> id)
{
    ra::ExperimentConfig c = o.config.empty() ? ra::default_config(id.value_or(ra::ExperimentId::Fig11))
                                              : ra::load_config(o.config, id);
    if (id && !o.config.empty() && c.id != *id)
        throw ra::ConfigurationError("config file names experiment '" + ra::to_string(c.id) +
                                     "' but the command asks for '" + ra::to_string(*id) + "'");
    if (o.seed)
        c.seed = *o.seed;
    else if (const auto s = env_seed())
        c.seed = *s;
    if (o.trials)
        c.trials = *o.trials;
    if (!o.out.empty())
        c.output = o.out;
    if (!o.format.empty())
        c.format = ra::parse_format(o.format);
    apply_overrides(c.params, o.overrides);
    c.validate();
    return c;
}

void emit(const ra::ResultTable &table, const ra::ExperimentConfig &c)
{
    if (c.output.empty() || c.output == "-")
    {
        std::cout << ra::render(table, c.format);
        std::cout.flush();
        if (!std::cout)
            throw ra::IoError("failed to write results to standard output");
    }
    else
        ra::emit_results(table, c.format, c.output);
}

ra::ExperimentId problem_experiment(const std::string &problem)
{
    if (problem == "miso")
        return ra::ExperimentId::Fig11;
    if (problem == "maxmin")
        return ra::ExperimentId::Fig12;
    if (problem == "wideband")
        return ra::ExperimentId::Fig13;
    return ra::ExperimentId::Fig14;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Rotatable-antenna channel simulation, optimization and estimation"};
    app.require_subcommand(1);

    CommonOptions reproduce_o, simulate_o, optimize_o, estimate_o, beam_o;

    std::string figure;
    auto *reproduce = app.add_subcommand("reproduce", "Run a figure experiment sweep");
    reproduce->add_option("figure", figure, "fig10 | fig11 | fig12 | fig13 | fig14 | custom")
        ->check(CLI::IsMember({"fig10", "fig11", "fig12", "fig13", "fig14", "custom"}));
    add_common(reproduce, reproduce_o);

    auto *simulate = app.add_subcommand("simulate", "Single-user link budget for fixed and rotatable antennas");
    add_common(simulate, simulate_o);

    std::string problem = "isac";
    auto *optimize = app.add_subcommand("optimize", "Run one solver with its baselines at the configured point");
    optimize->add_option("--problem", problem, "miso | maxmin | wideband | isac")
        ->check(CLI::IsMember({"miso", "maxmin", "wideband", "isac"}));
    add_common(optimize, optimize_o);

    std::string method = "ml";
    std::string schedule = "dynamic-designed";
    auto *estimate = app.add_subcommand("estimate", "Uplink channel estimation from pilot measurements");
    estimate->add_option("--method", method, "ml | omp | music")->check(CLI::IsMember({"ml", "omp", "music"}));
    estimate->add_option("--schedule", schedule, "Orientation schedule during training")
        ->check(CLI::IsMember({"fixed", "dynamic-designed", "dynamic-random"}));
    add_common(estimate, estimate_o);

    auto *beamtrain = app.add_subcommand("beamtrain", "Joint orientation and beam codebook search");
    add_common(beamtrain, beam_o);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    ra::ExperimentConfig cfg;
    try
    {
        if (*reproduce)
        {
            std::optional<ra::ExperimentId> id;
            if (!figure.empty())
                id = ra::parse_experiment_id(figure);
            else if (reproduce_o.config.empty())
                throw ra::ConfigurationError("reproduce needs a figure id or --config");
            cfg = resolve(reproduce_o, id);
        }
        else if (*simulate)
            cfg = resolve(simulate_o, ra::ExperimentId::Fig11);
        else if (*optimize)
            cfg = resolve(optimize_o, problem_experiment(problem));
        else if (*estimate)
            cfg = resolve(estimate_o, ra::ExperimentId::Fig10);
        else
            cfg = resolve(beam_o, ra::ExperimentId::Fig12);
    }
    catch (const ra::ConfigurationError &e)
    {
        std::cerr << "ra: config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const ra::ValidationError &e)
    {
        std::cerr << "ra: config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const ra::Error &e)
    {
        std::cerr << "ra: config error: " << e.what() << "\n";
        return exit_config;
    }

    try
    {
        ra::ResultTable table;
        const auto &p = cfg.params;
        if (*reproduce)
            table = ra::run_experiment(cfg);
        else if (*simulate)
        {
            auto res = ra::run_fig11_point(p, 1, cfg.seed);
            const auto s = ra::single_user_scenario(p);
            ra::SchemeSamples rnd{ra::scheme::random, "received_power_dBm", {}};
            for (int t = 0; t < cfg.trials; ++t)
            {
                auto rng = ra::trial_rng(cfg.seed, static_cast<std::uint64_t>(t), 13);
                const auto F = ra::random_pointings(rng, s.num_antennas(), ra::Cone::about_x(p.theta_max_rad));
                rnd.samples.push_back(
                    ra::watt_to_dbm(ra::miso_snr(s, ra::orientations_from_pointings(F), 0) * s.noise_power));
            }
            res.push_back(rnd);
            table = ra::point_table("simulate", "num_antennas", p.num_antennas, res, cfg.seed);
        }
        else if (*optimize)
        {
            const auto id = problem_experiment(problem);
            const auto res = ra::point_runner(id)(p, cfg.trials, cfg.seed);
            const std::string sweep = id == ra::ExperimentId::Fig14 ? "rate_floor_bps_hz" : "num_antennas";
            table = ra::point_table("optimize-" + problem, sweep, ra::get_param(p, sweep), res, cfg.seed);
        }
        else if (*estimate)
        {
            const auto strategy = ra::strategy_of(schedule);
            const auto res = ra::run_estimation(p, ra::parse_estimation_method(method), strategy, cfg.trials, cfg.seed);
            table = ra::point_table("estimate-" + method, "num_antennas", p.num_antennas, {res}, cfg.seed);
        }
        else
        {
            const auto res = ra::run_beam_training(p, cfg.trials, cfg.seed);
            table = ra::point_table("beamtrain", "num_antennas", p.array_ny * p.array_nz, res, cfg.seed);
        }
        emit(table, cfg);
    }
    catch (const ra::ConfigurationError &e)
    {
        std::cerr << "ra: config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "ra: error: " << e.what() << "\n";
        return exit_runtime;
    }
    return 0;
}
