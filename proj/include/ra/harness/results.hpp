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

#include "ra/core.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace ra
{

struct ResultRow
{
    std::string experiment;
    std::string sweep_name;
    double sweep_value = 0.0;
    std::string scheme;
    std::string metric; // name carries the unit, e.g. received_power_dBm
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    int trials = 0;     // trials that produced a value
    std::uint64_t seed = 0;

    bool operator==(const ResultRow &o) const
    {
        auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
        return experiment == o.experiment && sweep_name == o.sweep_name && same(sweep_value, o.sweep_value) &&
               scheme == o.scheme && metric == o.metric && same(mean, o.mean) && same(median, o.median) &&
               same(stddev, o.stddev) && trials == o.trials && seed == o.seed;
    }
};

struct ResultTable
{
    std::vector<ResultRow> rows;

    void sort()
    {
        std::stable_sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
            return std::tie(a.experiment, a.sweep_name, a.sweep_value, a.scheme, a.metric) <
                   std::tie(b.experiment, b.sweep_name, b.sweep_value, b.scheme, b.metric);
        });
    }

    const ResultRow *find(double sweep_value, const std::string &scheme, const std::string &metric) const
    {
        for (const auto &r : rows)
            if (r.sweep_value == sweep_value && r.scheme == scheme && r.metric == metric)
                return &r;
        return nullptr;
    }

    bool operator==(const ResultTable &o) const { return rows == o.rows; }
};

enum class OutputFormat
{
    Csv,
    Json
};

inline OutputFormat parse_format(const std::string &s)
{
    if (s == "csv")
        return OutputFormat::Csv;
    if (s == "json")
        return OutputFormat::Json;
    throw ConfigurationError("unknown output format '" + s + "' (expected csv or json)");
}

struct SampleStats
{
    double mean = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double stddev = std::numeric_limits<double>::quiet_NaN();
    int count = 0;
};

// Statistics over the finite samples; non-finite entries mark failed trials.
inline SampleStats summarize(const std::vector<double> &samples)
{
    std::vector<double> v;
    for (double s : samples)
        if (std::isfinite(s))
            v.push_back(s);
    SampleStats st;
    st.count = static_cast<int>(v.size());
    if (v.empty())
        return st;
    double sum = 0.0;
    for (double x : v)
        sum += x;
    st.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - st.mean) * (x - st.mean);
    st.stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    st.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    return st;
}

inline const char *csv_header() { return "experiment,sweep_name,sweep_value,scheme,metric,mean,median,stddev,trials,seed"; }

inline std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline std::string to_csv(const ResultTable &table)
{
    std::ostringstream os;
    os << csv_header() << '\n';
    for (const auto &r : table.rows)
        os << r.experiment << ',' << r.sweep_name << ',' << format_number(r.sweep_value) << ',' << r.scheme << ','
           << r.metric << ',' << format_number(r.mean) << ',' << format_number(r.median) << ','
           << format_number(r.stddev) << ',' << r.trials << ',' << r.seed << '\n';
    return os.str();
}

inline nlohmann::ordered_json to_json(const ResultTable &table)
{
    auto num = [](double x) { return std::isnan(x) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(x); };
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &r : table.rows)
        rows.push_back({{"experiment", r.experiment},
                        {"sweep_name", r.sweep_name},
                        {"sweep_value", num(r.sweep_value)},
                        {"scheme", r.scheme},
                        {"metric", r.metric},
                        {"mean", num(r.mean)},
                        {"median", num(r.median)},
                        {"stddev", num(r.stddev)},
                        {"trials", r.trials},
                        {"seed", r.seed}});
    return {{"rows", rows}};
}

inline ResultTable table_from_json(const nlohmann::json &j)
{
    auto num = [](const nlohmann::json &v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    ResultTable t;
    try
    {
        for (const auto &r : j.at("rows"))
            t.rows.push_back({r.at("experiment").get<std::string>(), r.at("sweep_name").get<std::string>(),
                              num(r.at("sweep_value")), r.at("scheme").get<std::string>(),
                              r.at("metric").get<std::string>(), num(r.at("mean")), num(r.at("median")),
                              num(r.at("stddev")), r.at("trials").get<int>(), r.at("seed").get<std::uint64_t>()});
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigurationError(std::string("result table: ") + e.what());
    }
    return t;
}

inline std::string render(const ResultTable &table, OutputFormat format)
{
    return format == OutputFormat::Csv ? to_csv(table) : to_json(table).dump(2) + "\n";
}

inline void emit_results(const ResultTable &table, OutputFormat format, const std::string &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << render(table, format);
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

inline ResultTable read_results_json(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    try
    {
        return table_from_json(nlohmann::json::parse(in));
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ConfigurationError(std::string("result table: ") + e.what());
    }
}

} // namespace ra
