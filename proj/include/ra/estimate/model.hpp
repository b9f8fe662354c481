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

#include "ra/channel.hpp"
#include "ra/estimate/schedule.hpp"

#include <vector>

namespace ra
{

// Unit vector for zenith angle theta (from +z) and azimuth xi (from +x in the x-y plane).
inline Vec3 path_direction(double theta, double xi)
{
    return {std::sin(theta) * std::cos(xi), std::sin(theta) * std::sin(xi), std::cos(theta)};
}

inline std::pair<double, double> path_angles(const Vec3 &u)
{
    const Vec3 v = u.normalized();
    return {std::acos(std::clamp(v.z(), -1.0, 1.0)), std::atan2(v.y(), v.x())};
}

// Far-field multipath parameters of one user: path q arrives from
// (zenith[q], azimuth[q]) with complex coefficient beta[q]; q = 0 is the LoS path.
struct PathParameters
{
    std::vector<cdouble> beta;
    std::vector<double> zenith;
    std::vector<double> azimuth;

    std::size_t num_paths() const { return beta.size(); }
    Vec3 direction(std::size_t q) const { return path_direction(zenith.at(q), azimuth.at(q)); }

    void validate() const
    {
        if (beta.empty())
            throw InvalidParameter("PathParameters: at least one path required");
        if (zenith.size() != beta.size() || azimuth.size() != beta.size())
            throw ConfigurationError("PathParameters: one angle pair per coefficient expected");
        for (std::size_t q = 0; q < beta.size(); ++q)
            if (!std::isfinite(zenith[q]) || !std::isfinite(azimuth[q]) || !std::isfinite(std::abs(beta[q])))
                throw InvalidParameter("PathParameters: non-finite entry");
    }
};

// Search region for angle estimators.
struct AngleGrid
{
    double zenith_min = deg_to_rad(45.0);
    double zenith_max = deg_to_rad(135.0);
    double azimuth_min = deg_to_rad(-75.0);
    double azimuth_max = deg_to_rad(75.0);
    double step = deg_to_rad(1.0);

    int zenith_count() const { return static_cast<int>(std::floor((zenith_max - zenith_min) / step + 1e-9)) + 1; }
    int azimuth_count() const { return static_cast<int>(std::floor((azimuth_max - azimuth_min) / step + 1e-9)) + 1; }
    std::size_t size() const { return static_cast<std::size_t>(zenith_count()) * azimuth_count(); }
    double zenith(int i) const { return zenith_min + i * step; }
    double azimuth(int j) const { return azimuth_min + j * step; }

    void validate() const
    {
        if (!(step > 0.0) || !(zenith_max >= zenith_min) || !(azimuth_max >= azimuth_min))
            throw InvalidParameter("AngleGrid: empty or inverted search range");
        if (zenith_min < 0.0 || zenith_max > pi)
            throw InvalidAngle("AngleGrid: zenith range must lie in [0, pi]");
    }
};

// Observation model for a block schedule: block m, antenna n sees path (theta, xi) through
//   b_{mN+n} = sqrt(G(f_n^(m), u)) exp(j 2 pi / lambda (q_n - c)^T u)
// with c the array centre.
class ParametricModel
{
  public:
    ParametricModel(ArrayLayout layout, GainPattern pattern, double wavelength, PilotSchedule schedule)
        : layout_(std::move(layout)), pattern_(std::move(pattern)), wavelength_(wavelength),
          schedule_(std::move(schedule))
    {
        if (!(wavelength_ > 0.0))
            throw InvalidParameter("ParametricModel: wavelength must be positive");
        if (schedule_.num_antennas() != layout_.size())
            throw ConfigurationError("ParametricModel: schedule and array sizes differ");
        for (const auto &b : schedule_.blocks)
            orientations_.push_back(orientations_from_pointings(b));
    }

    const ArrayLayout &layout() const { return layout_; }
    const GainPattern &pattern() const { return pattern_; }
    const PilotSchedule &schedule() const { return schedule_; }
    double wavelength() const { return wavelength_; }
    Eigen::Index rows() const { return static_cast<Eigen::Index>(layout_.size() * schedule_.blocks.size()); }

    // Response of one set of orientations to a unit-amplitude path.
    CVec response(const std::vector<Orientation> &orientations, double theta, double xi) const
    {
        const Vec3 u = path_direction(theta, xi);
        CVec b(static_cast<Eigen::Index>(layout_.size()));
        for (std::size_t n = 0; n < layout_.size(); ++n)
        {
            const double phase = two_pi / wavelength_ * (layout_.positions[n] - layout_.center).dot(u);
            b[static_cast<Eigen::Index>(n)] =
                amplitude_gain(pattern_, orientations[n], u) * std::exp(j_unit * phase);
        }
        return b;
    }

    CVec block_response(std::size_t m, double theta, double xi) const
    {
        return response(orientations_.at(m), theta, xi);
    }

    // Stacked response over all blocks.
    CVec stacked(double theta, double xi) const
    {
        const auto N = static_cast<Eigen::Index>(layout_.size());
        CVec b(rows());
        for (std::size_t m = 0; m < orientations_.size(); ++m)
            b.segment(static_cast<Eigen::Index>(m) * N, N) = block_response(m, theta, xi);
        return b;
    }

    CMat stacked_matrix(const std::vector<double> &zenith, const std::vector<double> &azimuth) const
    {
        CMat S(rows(), static_cast<Eigen::Index>(zenith.size()));
        for (std::size_t q = 0; q < zenith.size(); ++q)
            S.col(static_cast<Eigen::Index>(q)) = stacked(zenith[q], azimuth[q]);
        return S;
    }

    CVec stacked_channel(const PathParameters &p) const
    {
        CVec h = CVec::Zero(rows());
        for (std::size_t q = 0; q < p.num_paths(); ++q)
            h += p.beta[q] * stacked(p.zenith[q], p.azimuth[q]);
        return h;
    }

    // Channel for an arbitrary orientation set (used for reconstruction).
    CVec channel(const std::vector<Orientation> &orientations, const PathParameters &p) const
    {
        if (orientations.size() != layout_.size())
            throw ConfigurationError("ParametricModel: one orientation per antenna expected");
        CVec h = CVec::Zero(static_cast<Eigen::Index>(layout_.size()));
        for (std::size_t q = 0; q < p.num_paths(); ++q)
            h += p.beta[q] * response(orientations, p.zenith[q], p.azimuth[q]);
        return h;
    }

  private:
    ArrayLayout layout_;
    GainPattern pattern_;
    double wavelength_;
    PilotSchedule schedule_;
    std::vector<std::vector<Orientation>> orientations_;
};

} // namespace ra
