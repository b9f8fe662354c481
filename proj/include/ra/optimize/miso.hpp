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

#include "ra/optimize/common.hpp"

namespace ra
{

struct MisoSolution
{
    std::vector<Orientation> orientations;
    CVec beamformer; // MRT, ||w||^2 = P
    CVec channel;
    double snr = 0.0;
};

// Every antenna points at the user (clamped to its rotation cone); MRT on the
// resulting line-of-sight channel.
inline MisoSolution optimal_pointing_miso(const Scenario &scn, std::size_t k = 0)
{
    if (scn.pattern.kind() != GainPattern::Kind::Cosine)
        throw InvalidParameter("optimal_pointing_miso: cosine pattern required");
    if (k >= scn.users.size())
        throw InvalidParameter("optimal_pointing_miso: user index out of range");
    const Cone cone = Cone::about_x(scn.constraint.theta_max);
    MisoSolution s;
    for (const auto &q : scn.bs.positions)
    {
        Orientation o = orientation_from_pointing(cone.project(scn.users[k] - q));
        if (scn.constraint.is_discrete())
            o = quantize_orientation(o, scn.constraint);
        s.orientations.push_back(o);
    }
    s.channel = nearfield_los(scn, s.orientations, k);
    const double hn = s.channel.norm();
    s.beamformer = hn > 0.0 ? CVec(std::sqrt(scn.tx_power) * s.channel.conjugate() / hn)
                            : CVec::Zero(s.channel.size());
    s.snr = scn.tx_power * s.channel.squaredNorm() / scn.noise_power;
    return s;
}

// SNR of the same link with MRT at arbitrary orientations.
inline double miso_snr(const Scenario &scn, const std::vector<Orientation> &orientations, std::size_t k = 0)
{
    return scn.tx_power * nearfield_los(scn, orientations, k).squaredNorm() / scn.noise_power;
}

// Closed-form ULA model for a broadside user with rho = 1/2.
struct UlaSnrModel
{
    double zeta;      // spacing / distance
    double theta_max; // rotation cone half-angle
    double power;     // W
    double noise;     // W

    void validate() const
    {
        if (!(zeta > 0.0) || !std::isfinite(zeta))
            throw InvalidParameter("ula_snr_closed_form: zeta must be positive");
        if (!(theta_max >= 0.0) || theta_max > pi / 2.0)
            throw InvalidParameter("ula_snr_closed_form: theta_max outside [0, pi/2]");
        if (!(power > 0.0) || !(noise > 0.0))
            throw InvalidParameter("ula_snr_closed_form: powers must be positive");
    }

    double span_angle(double n) const { return std::atan(n * zeta / 2.0); }
    long n_bar() const { return 2 * static_cast<long>(std::floor(std::tan(theta_max) / zeta)) + 1; }
    double scale() const { return 2.0 * zeta * power / (pi * pi * noise); }
    double asymptote() const { return scale() * (theta_max + std::cos(theta_max)); }

    double snr(long n) const
    {
        if (n < 1)
            throw InvalidParameter("ula_snr_closed_form: N must be positive");
        const double s = span_angle(static_cast<double>(n));
        return n <= n_bar() ? scale() * s : scale() * (theta_max + std::sin(s - theta_max));
    }
};

inline double ula_snr_closed_form(long n, double zeta, double theta_max, double power, double noise)
{
    const UlaSnrModel m{zeta, theta_max, power, noise};
    m.validate();
    return m.snr(n);
}

inline double ula_snr_asymptote(double zeta, double theta_max, double power, double noise)
{
    const UlaSnrModel m{zeta, theta_max, power, noise};
    m.validate();
    return m.asymptote();
}

} // namespace ra
