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
#include "ra/geometry.hpp"
#include "ra/radiation.hpp"

#include <vector>

namespace ra
{

struct Cluster
{
    Vec3 position = Vec3::Zero();
    cdouble rcs{1.0, 0.0};
};

// Geometry and RF constants of one deployment. Powers in watts.
struct Scenario
{
    double carrier_frequency = 2.4e9;
    ArrayLayout bs;
    std::vector<Vec3> users;
    std::vector<Cluster> clusters;
    double noise_power = dbm_to_watt(-80.0);
    double tx_power = dbm_to_watt(10.0);
    std::vector<double> user_powers;      // uplink P_k (empty: tx_power for everyone)
    double p_max_comm = dbm_to_watt(30.0);
    double p_max_sense = dbm_to_watt(30.0);
    GainPattern pattern = GainPattern::cosine(0.5);
    RotationConstraint constraint = RotationConstraint::continuous(pi / 6.0);
    bool los_blocked = false;

    // Receive array for point-to-point MIMO links (unused otherwise).
    ArrayLayout rx_array;
    GainPattern rx_pattern = GainPattern::cosine(0.5);

    double wavelength() const { return speed_of_light / carrier_frequency; }
    double beta0() const
    {
        const double r = wavelength() / (4.0 * pi);
        return r * r;
    }
    std::size_t num_antennas() const { return bs.size(); }
    std::size_t num_users() const { return users.size(); }
    double user_power(std::size_t k) const { return user_powers.empty() ? tx_power : user_powers.at(k); }

    void validate() const
    {
        if (!(carrier_frequency > 0.0) || !std::isfinite(carrier_frequency))
            throw InvalidParameter("Scenario: carrier frequency must be positive");
        if (!(noise_power > 0.0) || !(tx_power > 0.0) || !(p_max_comm > 0.0) || !(p_max_sense > 0.0))
            throw InvalidParameter("Scenario: powers must be positive");
        for (double p : user_powers)
            if (!(p > 0.0))
                throw InvalidParameter("Scenario: user powers must be positive");
        if (!user_powers.empty() && user_powers.size() != users.size())
            throw ConfigurationError("Scenario: one uplink power per user expected");
        bs.validate();
        for (const auto &q : bs.positions)
        {
            for (const auto &u : users)
                if ((u - q).norm() < 1e-12)
                    throw DegenerateGeometry("Scenario: user coincides with a BS antenna");
            for (const auto &c : clusters)
                if ((c.position - q).norm() < 1e-12)
                    throw DegenerateGeometry("Scenario: cluster coincides with a BS antenna");
        }
    }
};

struct WidebandConfig
{
    double bandwidth = 40e6;
    int subcarriers = 64;
    int cp_length = 6;

    double spacing() const { return bandwidth / subcarriers; }
    double subcarrier_frequency(int l) const { return l * spacing(); } // zero-based l

    void validate() const
    {
        if (subcarriers < 1)
            throw InvalidParameter("WidebandConfig: at least one subcarrier required");
        if (cp_length < 0)
            throw InvalidParameter("WidebandConfig: CP length must be non-negative");
        if (!(bandwidth > 0.0))
            throw InvalidParameter("WidebandConfig: bandwidth must be positive");
    }
};

// ------------------------------------------------------------------------
// Path decomposition. The channel of antenna n towards user k is
//   h = sum_p coef_p * sqrt(g(direction_p; f_n)) * exp(-j 2 pi f delay_p)
// where f is the baseband subcarrier offset. Optimizers work on this form.
// ------------------------------------------------------------------------
struct ChannelPath
{
    Vec3 direction; // unit vector leaving the antenna
    cdouble coef;   // includes the carrier phase exp(-j 2 pi d / lambda)
    double delay;   // seconds
};

enum class PathSet
{
    LoS,
    NLoS,
    Total
};

using AntennaPaths = std::vector<ChannelPath>;

inline std::vector<AntennaPaths> channel_paths(const Scenario &scn, std::size_t k, PathSet set = PathSet::Total)
{
    if (k >= scn.users.size())
        throw InvalidParameter("channel_paths: user index out of range");
    const double lambda = scn.wavelength();
    const double beta0 = scn.beta0();
    const Vec3 &qu = scn.users[k];
    std::vector<AntennaPaths> out(scn.bs.size());
    for (std::size_t n = 0; n < scn.bs.size(); ++n)
    {
        const Vec3 &qb = scn.bs.positions[n];
        if (set != PathSet::NLoS && !scn.los_blocked)
        {
            const Vec3 diff = qu - qb;
            const double d = diff.norm();
            if (!(d > 1e-12))
                throw DegenerateGeometry("channel: user coincides with an antenna");
            const cdouble coef = std::sqrt(beta0) / d * std::exp(-j_unit * (two_pi * d / lambda));
            out[n].push_back({diff / d, coef, d / speed_of_light});
        }
        if (set != PathSet::LoS)
            for (const auto &c : scn.clusters)
            {
                const Vec3 diff = c.position - qb;
                const double dt = diff.norm();
                const double db = (c.position - qu).norm();
                if (!(dt > 1e-12) || !(db > 1e-12))
                    throw DegenerateGeometry("channel: cluster coincides with an antenna or user");
                const cdouble coef = c.rcs * beta0 / (dt * db) * std::exp(-j_unit * (two_pi * (dt + db) / lambda));
                out[n].push_back({diff / dt, coef, (dt + db) / speed_of_light});
            }
    }
    return out;
}

inline double amplitude_gain(const GainPattern &pattern, const Orientation &o, const Vec3 &direction)
{
    if (pattern.kind() == GainPattern::Kind::Cosine)
        return std::sqrt(pattern.cosine_gain(direction.dot(o.pointing)));
    const auto a = incident_angles(o, direction);
    return std::sqrt(pattern.gain(a.eps, a.phi));
}

inline CVec evaluate_paths(const std::vector<AntennaPaths> &paths, const GainPattern &pattern,
                           const std::vector<Orientation> &orientations, double frequency_offset = 0.0)
{
    if (orientations.size() != paths.size())
        throw ConfigurationError("channel: one orientation per antenna expected");
    CVec h = CVec::Zero(static_cast<Eigen::Index>(paths.size()));
    for (std::size_t n = 0; n < paths.size(); ++n)
        for (const auto &p : paths[n])
        {
            const double a = amplitude_gain(pattern, orientations[n], p.direction);
            if (a == 0.0)
                continue;
            cdouble term = p.coef * a;
            if (frequency_offset != 0.0)
                term *= std::exp(-j_unit * (two_pi * frequency_offset * p.delay));
            h[static_cast<Eigen::Index>(n)] += term;
        }
    return h;
}

inline CVec nearfield_los(const Scenario &scn, const std::vector<Orientation> &orientations, std::size_t k)
{
    Scenario los = scn;
    los.los_blocked = false;
    return evaluate_paths(channel_paths(los, k, PathSet::LoS), scn.pattern, orientations);
}

inline CVec nlos_multipath(const Scenario &scn, const std::vector<Orientation> &orientations, std::size_t k)
{
    return evaluate_paths(channel_paths(scn, k, PathSet::NLoS), scn.pattern, orientations);
}

inline CVec total_channel(const Scenario &scn, const std::vector<Orientation> &orientations, std::size_t k)
{
    CVec h = nlos_multipath(scn, orientations, k);
    if (!scn.los_blocked)
        h += nearfield_los(scn, orientations, k);
    return h;
}

// Plane-wave approximation with antenna 1 as the phase and distance reference.
inline CVec farfield_channel(const Scenario &scn, const std::vector<Orientation> &orientations, std::size_t k)
{
    if (orientations.size() != scn.bs.size())
        throw ConfigurationError("farfield_channel: one orientation per antenna expected");
    const double lambda = scn.wavelength();
    const Vec3 &q1 = scn.bs.positions.front();
    const Vec3 diff = scn.users.at(k) - q1;
    const double d1 = diff.norm();
    if (!(d1 > 1e-12))
        throw DegenerateGeometry("farfield_channel: user coincides with the reference antenna");
    const Vec3 qhat = diff / d1;
    const cdouble ref = std::sqrt(scn.beta0()) / d1 * std::exp(-j_unit * (two_pi * d1 / lambda));
    CVec h(static_cast<Eigen::Index>(scn.bs.size()));
    for (std::size_t n = 0; n < scn.bs.size(); ++n)
    {
        const double phase = two_pi / lambda * (scn.bs.positions[n] - q1).dot(qhat);
        h[static_cast<Eigen::Index>(n)] =
            ref * amplitude_gain(scn.pattern, orientations[n], qhat) * std::exp(j_unit * phase);
    }
    return h;
}

// Column l holds the response at f_l = l * B / L (zero-based l).
inline CMat wideband_response(const Scenario &scn, const WidebandConfig &wb,
                              const std::vector<Orientation> &orientations, std::size_t k)
{
    wb.validate();
    const auto paths = channel_paths(scn, k, PathSet::Total);
    CMat H(static_cast<Eigen::Index>(scn.bs.size()), wb.subcarriers);
    for (int l = 0; l < wb.subcarriers; ++l)
        H.col(l) = evaluate_paths(paths, scn.pattern, orientations, wb.subcarrier_frequency(l));
    return H;
}

inline CVec polarized_channel(const Scenario &scn, const std::vector<Orientation> &orientations,
                              const Vec3 &receive_polarization, std::size_t k)
{
    CVec h = nearfield_los(scn, orientations, k);
    const Vec3 &qu = scn.users.at(k);
    for (std::size_t n = 0; n < scn.bs.size(); ++n)
    {
        const Vec3 q = (qu - scn.bs.positions[n]).normalized();
        h[static_cast<Eigen::Index>(n)] *= polarization_gain(orientations[n], q, receive_polarization);
    }
    return h;
}

// Point-to-point LoS link between two RA arrays.
struct MimoLink
{
    ArrayLayout tx;
    ArrayLayout rx;
    GainPattern tx_pattern = GainPattern::cosine(0.5);
    GainPattern rx_pattern = GainPattern::cosine(0.5);
    double wavelength = speed_of_light / 2.4e9;

    double beta0() const
    {
        const double r = wavelength / (4.0 * pi);
        return r * r;
    }

    // Gain-free coefficient sqrt(beta0)/d exp(-j 2 pi d / lambda) and unit
    // direction tx -> rx of pair (r, t).
    std::pair<cdouble, Vec3> pair_term(std::size_t r, std::size_t t) const
    {
        const Vec3 diff = rx.positions[r] - tx.positions[t];
        const double d = diff.norm();
        if (!(d > 1e-12))
            throw DegenerateGeometry("mimo_channel: transmit and receive antennas overlap");
        return {std::sqrt(beta0()) / d * std::exp(-j_unit * (two_pi * d / wavelength)), diff / d};
    }

    static MimoLink from_scenario(const Scenario &scn)
    {
        return {scn.bs, scn.rx_array, scn.pattern, scn.rx_pattern, scn.wavelength()};
    }
};

inline CMat mimo_channel(const MimoLink &link, const std::vector<Orientation> &tx_orientations,
                         const std::vector<Orientation> &rx_orientations)
{
    if (tx_orientations.size() != link.tx.size() || rx_orientations.size() != link.rx.size())
        throw ConfigurationError("mimo_channel: one orientation per antenna expected");
    CMat H(static_cast<Eigen::Index>(link.rx.size()), static_cast<Eigen::Index>(link.tx.size()));
    for (std::size_t r = 0; r < link.rx.size(); ++r)
        for (std::size_t t = 0; t < link.tx.size(); ++t)
        {
            const auto [coef, u] = link.pair_term(r, t);
            const double at = amplitude_gain(link.tx_pattern, tx_orientations[t], u);
            const double ar = amplitude_gain(link.rx_pattern, rx_orientations[r], -u);
            H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) = coef * at * ar;
        }
    return H;
}

inline CMat mimo_channel(const Scenario &scn, const std::vector<Orientation> &tx_orientations,
                         const std::vector<Orientation> &rx_orientations)
{
    return mimo_channel(MimoLink::from_scenario(scn), tx_orientations, rx_orientations);
}

} // namespace ra
