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

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace ra
{

enum class ExperimentId
{
    Fig10,
    Fig11,
    Fig12,
    Fig13,
    Fig14,
    Custom
};

inline std::string to_string(ExperimentId id)
{
    switch (id)
    {
    case ExperimentId::Fig10:
        return "fig10";
    case ExperimentId::Fig11:
        return "fig11";
    case ExperimentId::Fig12:
        return "fig12";
    case ExperimentId::Fig13:
        return "fig13";
    case ExperimentId::Fig14:
        return "fig14";
    case ExperimentId::Custom:
        return "custom";
    }
    return "unknown";
}

inline ExperimentId parse_experiment_id(std::string_view s)
{
    for (auto id : {ExperimentId::Fig10, ExperimentId::Fig11, ExperimentId::Fig12, ExperimentId::Fig13,
                    ExperimentId::Fig14, ExperimentId::Custom})
        if (to_string(id) == s)
            return id;
    throw ConfigurationError("unknown experiment id '" + std::string(s) +
                             "' (expected fig10, fig11, fig12, fig13, fig14 or custom)");
}

// Scenario knobs of every experiment. Powers are in dBm and angles in the
// unit named by the key; conversion happens when scenarios are built.
struct ExperimentParams
{
    double carrier_frequency_hz = 2.4e9;
    double noise_power_dbm = -80.0;
    double tx_power_dbm = 10.0;
    double spacing_wavelengths = 0.5;
    double theta_max_rad = pi / 6.0;
    double rho = 0.5;

    double num_antennas = 16;   // ULA experiments
    double array_ny = 4;        // UPA experiments
    double array_nz = 4;
    double users = 4;
    double clusters = 8;
    double cluster_rcs = 100.0;

    double distance_m = 15.0;   // single-user geometry
    double user_azimuth_deg = 75.0;
    double distance_min_m = 30.0;
    double distance_max_m = 50.0;
    double user_span_deg = 50.0; // users spread over [-span, span] in azimuth

    double bandwidth_hz = 40e6;
    double subcarriers = 64;
    double cp_length = 6;

    double p_max_comm_dbm = 30.0;
    double p_max_sense_dbm = 30.0;
    double rate_floor_bps_hz = 2.0;
    double region_x_m = 40.0 * std::sin(pi / 3.0);
    double region_y_m = 40.0 * std::cos(pi / 3.0);
    double region_z_m = -10.0;
    double region_radius_m = 5.0;
    double sensing_points = 8;
    double user_distance_m = 50.0;

    double pilot_slots = 64;
    double pilot_blocks = 8;
    double snr_db = 15.0;
    double evaluation_sets = 16;

    double max_iter = 200;
    double tol = 1e-6;
};

struct ParamKey
{
    std::string_view name;
    double ExperimentParams::*member;
    bool integer;
    bool positive;
};

inline const std::vector<ParamKey> &param_keys()
{
    using P = ExperimentParams;
    static const std::vector<ParamKey> keys{
        {"carrier_frequency_hz", &P::carrier_frequency_hz, false, true},
        {"noise_power_dbm", &P::noise_power_dbm, false, false},
        {"tx_power_dbm", &P::tx_power_dbm, false, false},
        {"spacing_wavelengths", &P::spacing_wavelengths, false, true},
        {"theta_max_rad", &P::theta_max_rad, false, false},
        {"rho", &P::rho, false, false},
        {"num_antennas", &P::num_antennas, true, true},
        {"array_ny", &P::array_ny, true, true},
        {"array_nz", &P::array_nz, true, true},
        {"users", &P::users, true, false},
        {"clusters", &P::clusters, true, false},
        {"cluster_rcs", &P::cluster_rcs, false, false},
        {"distance_m", &P::distance_m, false, true},
        {"user_azimuth_deg", &P::user_azimuth_deg, false, false},
        {"distance_min_m", &P::distance_min_m, false, true},
        {"distance_max_m", &P::distance_max_m, false, true},
        {"user_span_deg", &P::user_span_deg, false, false},
        {"bandwidth_hz", &P::bandwidth_hz, false, true},
        {"subcarriers", &P::subcarriers, true, true},
        {"cp_length", &P::cp_length, true, false},
        {"p_max_comm_dbm", &P::p_max_comm_dbm, false, false},
        {"p_max_sense_dbm", &P::p_max_sense_dbm, false, false},
        {"rate_floor_bps_hz", &P::rate_floor_bps_hz, false, false},
        {"region_x_m", &P::region_x_m, false, false},
        {"region_y_m", &P::region_y_m, false, false},
        {"region_z_m", &P::region_z_m, false, false},
        {"region_radius_m", &P::region_radius_m, false, false},
        {"sensing_points", &P::sensing_points, true, true},
        {"user_distance_m", &P::user_distance_m, false, true},
        {"pilot_slots", &P::pilot_slots, true, true},
        {"pilot_blocks", &P::pilot_blocks, true, true},
        {"snr_db", &P::snr_db, false, false},
        {"evaluation_sets", &P::evaluation_sets, true, true},
        {"max_iter", &P::max_iter, true, true},
        {"tol", &P::tol, false, true},
    };
    return keys;
}

inline const ParamKey *find_param(std::string_view name)
{
    for (const auto &k : param_keys())
        if (k.name == name)
            return &k;
    return nullptr;
}

inline void set_param(ExperimentParams &p, std::string_view name, double value)
{
    const ParamKey *k = find_param(name);
    if (!k)
        throw ValidationError("unknown scenario field '" + std::string(name) + "'");
    p.*(k->member) = value;
}

inline double get_param(const ExperimentParams &p, std::string_view name)
{
    const ParamKey *k = find_param(name);
    if (!k)
        throw ValidationError("unknown scenario field '" + std::string(name) + "'");
    return p.*(k->member);
}

// Returns the names of fields violating their range, empty when valid.
inline std::vector<std::string> invalid_params(const ExperimentParams &p)
{
    std::vector<std::string> bad;
    for (const auto &k : param_keys())
    {
        const double v = p.*(k.member);
        if (!std::isfinite(v) || (k.positive && !(v > 0.0)) || (k.integer && (v != std::floor(v) || v < 0.0)))
            bad.emplace_back(k.name);
    }
    if (!(p.theta_max_rad >= 0.0 && p.theta_max_rad <= pi / 2.0))
        bad.emplace_back("theta_max_rad");
    if (!(p.rho >= 0.0))
        bad.emplace_back("rho");
    if (p.distance_max_m < p.distance_min_m)
        bad.emplace_back("distance_max_m");
    if (!(p.region_radius_m >= 0.0))
        bad.emplace_back("region_radius_m");
    if (p.pilot_blocks > p.pilot_slots)
        bad.emplace_back("pilot_blocks");
    return bad;
}

} // namespace ra
