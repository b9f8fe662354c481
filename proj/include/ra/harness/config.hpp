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

#include "ra/harness/params.hpp"
#include "ra/harness/results.hpp"

#include <json.hpp>

#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

namespace ra
{

struct ExperimentConfig
{
    ExperimentId id = ExperimentId::Fig11;
    ExperimentId base = ExperimentId::Fig11; // runner used by custom experiments
    ExperimentParams params{};
    std::string sweep_name;
    std::vector<double> sweep_values;
    int trials = 1;
    std::uint64_t seed = 1;
    std::string output;
    OutputFormat format = OutputFormat::Csv;

    void validate() const
    {
        std::vector<std::string> bad = invalid_params(params);
        if (sweep_values.empty())
            bad.emplace_back("sweep.values");
        if (!find_param(sweep_name))
            bad.emplace_back("sweep.name");
        if (trials < 1)
            bad.emplace_back("trials");
        if (id == ExperimentId::Custom && base == ExperimentId::Custom)
            bad.emplace_back("base");
        if (!bad.empty())
        {
            std::string msg = "invalid configuration fields:";
            for (const auto &b : bad)
                msg += " " + b;
            throw ValidationError(msg);
        }
    }
};

// Paper-parameter defaults for each experiment.
inline ExperimentConfig default_config(ExperimentId id, ExperimentId base = ExperimentId::Fig11)
{
    ExperimentConfig c;
    c.id = id;
    c.base = id == ExperimentId::Custom ? base : id;
    auto &p = c.params;
    switch (c.base)
    {
    case ExperimentId::Fig11:
        c.sweep_name = "num_antennas";
        for (int n = 1; n <= 4096; n *= 2)
            c.sweep_values.push_back(n);
        c.trials = 1;
        break;
    case ExperimentId::Fig12:
        c.sweep_name = "rho";
        c.sweep_values = {0.5, 1.0, 2.0, 4.0};
        c.trials = 100;
        break;
    case ExperimentId::Fig13:
        p.rho = 2.0;
        c.sweep_name = "subcarriers";
        c.sweep_values = {16, 32, 64, 128};
        c.trials = 10;
        break;
    case ExperimentId::Fig14:
        p.users = 3;
        p.rho = 1.0;
        p.user_span_deg = 60.0;
        p.noise_power_dbm = -63.0;
        c.sweep_name = "rate_floor_bps_hz";
        c.sweep_values = {2, 4, 6, 8};
        c.trials = 1;
        break;
    case ExperimentId::Fig10:
        p.users = 3;
        p.clusters = 3;
        p.rho = 2.0;
        c.sweep_name = "num_antennas";
        c.sweep_values = {8, 16, 32};
        c.trials = 20;
        break;
    case ExperimentId::Custom:
        break;
    }
    return c;
}

namespace detail
{

inline std::pair<std::size_t, std::size_t> line_column(const std::string &text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
            ++col;
    }
    return {line, col};
}

inline double number_field(const nlohmann::json &v, const std::string &field)
{
    if (!v.is_number())
        throw ValidationError("field '" + field + "' must be a number");
    return v.get<double>();
}

inline void reject_unknown(const nlohmann::json &obj, std::initializer_list<std::string_view> allowed,
                           const std::string &prefix)
{
    for (auto it = obj.begin(); it != obj.end(); ++it)
    {
        bool ok = false;
        for (auto a : allowed)
            ok = ok || it.key() == a;
        if (!ok)
            throw ValidationError("unknown field '" + prefix + it.key() + "'");
    }
}

} // namespace detail

// Parses a JSON configuration. `fallback_id` names the experiment when the
// document does not (e.g. an empty file passed with `reproduce fig11`).
inline ExperimentConfig parse_config(const std::string &text, std::optional<ExperimentId> fallback_id = {},
                                     const std::string &origin = "config")
{
    nlohmann::json j;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        j = nlohmann::json::object();
    else
    {
        try
        {
            j = nlohmann::json::parse(text);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
            throw ConfigurationError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                     ": parse error: " + e.what());
        }
    }
    if (!j.is_object())
        throw ConfigurationError(origin + ": top level must be an object");
    detail::reject_unknown(j, {"experiment", "base", "seed", "trials", "output", "format", "sweep", "scenario"}, "");

    std::optional<ExperimentId> id = fallback_id;
    if (j.contains("experiment"))
    {
        if (!j["experiment"].is_string())
            throw ValidationError("field 'experiment' must be a string");
        id = parse_experiment_id(j["experiment"].get<std::string>());
    }
    if (!id)
        throw ValidationError("missing field 'experiment'");
    ExperimentId base = ExperimentId::Custom;
    if (j.contains("base"))
    {
        if (!j["base"].is_string())
            throw ValidationError("field 'base' must be a string");
        base = parse_experiment_id(j["base"].get<std::string>());
    }
    else if (*id != ExperimentId::Custom)
        base = *id;
    if (*id == ExperimentId::Custom && base == ExperimentId::Custom)
        throw ValidationError("custom experiments need a 'base' field naming fig10..fig14");
    if (*id != ExperimentId::Custom && base != *id)
        throw ValidationError("field 'base' is only allowed for custom experiments");

    ExperimentConfig c = default_config(*id, base);
    if (j.contains("seed"))
    {
        if (!j["seed"].is_number_unsigned())
            throw ValidationError("field 'seed' must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("trials"))
    {
        if (!j["trials"].is_number_integer())
            throw ValidationError("field 'trials' must be an integer");
        c.trials = j["trials"].get<int>();
    }
    if (j.contains("output"))
    {
        if (!j["output"].is_string())
            throw ValidationError("field 'output' must be a string");
        c.output = j["output"].get<std::string>();
    }
    if (j.contains("format"))
    {
        if (!j["format"].is_string())
            throw ValidationError("field 'format' must be a string");
        c.format = parse_format(j["format"].get<std::string>());
    }
    if (j.contains("sweep"))
    {
        const auto &s = j["sweep"];
        if (!s.is_object())
            throw ValidationError("field 'sweep' must be an object");
        detail::reject_unknown(s, {"name", "values"}, "sweep.");
        if (s.contains("name"))
        {
            if (!s["name"].is_string())
                throw ValidationError("field 'sweep.name' must be a string");
            c.sweep_name = s["name"].get<std::string>();
            if (!find_param(c.sweep_name))
                throw ValidationError("field 'sweep.name' names unknown scenario field '" + c.sweep_name + "'");
        }
        if (s.contains("values"))
        {
            if (!s["values"].is_array())
                throw ValidationError("field 'sweep.values' must be an array");
            c.sweep_values.clear();
            for (const auto &v : s["values"])
                c.sweep_values.push_back(detail::number_field(v, "sweep.values"));
        }
    }
    if (j.contains("scenario"))
    {
        const auto &s = j["scenario"];
        if (!s.is_object())
            throw ValidationError("field 'scenario' must be an object");
        for (auto it = s.begin(); it != s.end(); ++it)
        {
            if (!find_param(it.key()))
                throw ValidationError("unknown field 'scenario." + it.key() + "'");
            set_param(c.params, it.key(), detail::number_field(it.value(), "scenario." + it.key()));
        }
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string &path, std::optional<ExperimentId> fallback_id = {})
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigurationError("cannot read config file '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, fallback_id, path);
}

} // namespace ra
