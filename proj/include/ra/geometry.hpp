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

#include <algorithm>
#include <array>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace ra
{

// ------------------------------------------------------------------------
// Euler angles (roll about x, pitch about y, yaw about z), canonicalized into
// [0, 2*pi) on construction.
// ------------------------------------------------------------------------
class RotationAngles
{
  public:
    RotationAngles() = default;

    RotationAngles(double roll, double pitch, double yaw)
    {
        if (!std::isfinite(roll) || !std::isfinite(pitch) || !std::isfinite(yaw))
            throw InvalidAngle("RotationAngles: angles must be finite");
        roll_ = wrap_two_pi(roll);
        pitch_ = wrap_two_pi(pitch);
        yaw_ = wrap_two_pi(yaw);
    }

    double roll() const { return roll_; }
    double pitch() const { return pitch_; }
    double yaw() const { return yaw_; }

    bool operator==(const RotationAngles &) const = default;

  private:
    double roll_ = 0.0;
    double pitch_ = 0.0;
    double yaw_ = 0.0;
};

// Pointing (boresight) and reference unit vectors of one antenna.
struct Orientation
{
    Vec3 pointing = Vec3::UnitX();
    Vec3 reference = Vec3::UnitZ();

    // Rotated local y-axis. R e2 = R (e3 x e1) = f_par x f_perp for any rotation R.
    Vec3 lateral() const { return reference.cross(pointing); }

    static Orientation boresight() { return {}; }
};

enum class RotationMode
{
    Full3D,
    Planar2D, // roll ignored
    RollOnly,
    PitchOnly,
    YawOnly
};

// R_z(yaw) R_y(pitch) R_x(roll): extrinsic x-y-z sequence, right-hand rule.
inline Mat3 rotation_matrix(const RotationAngles &angles)
{
    const double cf = std::cos(angles.roll()), sf = std::sin(angles.roll());
    const double ct = std::cos(angles.pitch()), st = std::sin(angles.pitch());
    const double cp = std::cos(angles.yaw()), sp = std::sin(angles.yaw());

    Mat3 R;
    R << ct * cp, sf * st * cp - cf * sp, cf * st * cp + sf * sp,
        ct * sp, sf * st * sp + cf * cp, cf * st * sp - sf * cp,
        -st, sf * ct, cf * ct;
    return R;
}

inline Orientation orientation_from_matrix(const Mat3 &R)
{
    return {R.col(0), R.col(2)};
}

inline Orientation orient_antenna(const RotationAngles &angles, RotationMode mode = RotationMode::Full3D)
{
    RotationAngles effective = angles;
    switch (mode)
    {
    case RotationMode::Full3D:
        break;
    case RotationMode::Planar2D:
        effective = RotationAngles(0.0, angles.pitch(), angles.yaw());
        break;
    case RotationMode::RollOnly:
        effective = RotationAngles(angles.roll(), 0.0, 0.0);
        break;
    case RotationMode::PitchOnly:
        effective = RotationAngles(0.0, angles.pitch(), 0.0);
        break;
    case RotationMode::YawOnly:
        effective = RotationAngles(0.0, 0.0, angles.yaw());
        break;
    }
    return orientation_from_matrix(rotation_matrix(effective));
}

namespace detail
{
inline Orientation zenith_azimuth_orientation(double zenith, double azimuth)
{
    const double cz = std::cos(zenith), sz = std::sin(zenith);
    const double ca = std::cos(azimuth), sa = std::sin(azimuth);
    return {Vec3(cz, sz * ca, sz * sa), Vec3(-sz, cz * ca, cz * sa)};
}
} // namespace detail

// Zenith measured from +x, azimuth of the y-z projection measured from +y.
inline Orientation orient_from_zenith_azimuth(double zenith, double azimuth)
{
    if (!std::isfinite(zenith) || !std::isfinite(azimuth))
        throw InvalidAngle("orient_from_zenith_azimuth: non-finite angle");
    if (zenith < 0.0 || zenith > pi)
        throw InvalidAngle("orient_from_zenith_azimuth: zenith outside [0, pi]");
    if (azimuth < 0.0 || azimuth >= two_pi)
        throw InvalidAngle("orient_from_zenith_azimuth: azimuth outside [0, 2pi)");
    return detail::zenith_azimuth_orientation(zenith, azimuth);
}

// ------------------------------------------------------------------------
// Boresight cone: the set of pointing vectors within theta_max of an axis.
// The (zenith, azimuth) chart is measured from `axis` with azimuth origin `u`;
// for axis = e1 it is exactly the zenith/azimuth parameterization above.
// ------------------------------------------------------------------------
struct Cone
{
    Vec3 axis = Vec3::UnitX();
    Vec3 u = Vec3::UnitY();
    Vec3 v = Vec3::UnitZ();
    double theta_max = pi / 6.0;

    static Cone about_x(double theta_max) { return {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(), theta_max}; }
    static Cone about_minus_x(double theta_max) { return {-Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitZ(), theta_max}; }

    Vec3 direction(double zenith, double azimuth) const
    {
        return std::cos(zenith) * axis + std::sin(zenith) * (std::cos(azimuth) * u + std::sin(azimuth) * v);
    }

    // d direction / d zenith and d direction / d azimuth
    std::pair<Vec3, Vec3> tangents(double zenith, double azimuth) const
    {
        const double cz = std::cos(zenith), sz = std::sin(zenith);
        const double ca = std::cos(azimuth), sa = std::sin(azimuth);
        return {-sz * axis + cz * (ca * u + sa * v), sz * (-sa * u + ca * v)};
    }

    std::pair<double, double> zenith_azimuth(const Vec3 &dir) const
    {
        const Vec3 d = dir.normalized();
        const double zenith = std::acos(std::clamp(d.dot(axis), -1.0, 1.0));
        const double azimuth = std::atan2(d.dot(v), d.dot(u));
        return {zenith, azimuth};
    }

    bool contains(const Vec3 &dir, double tol = 1e-12) const
    {
        return angle_between(dir.normalized(), axis) <= theta_max + tol;
    }

    // Closest feasible unit vector: zenith clamped to theta_max, azimuth kept.
    Vec3 project(const Vec3 &target) const
    {
        const double n = target.norm();
        if (!(n > 1e-300) || !std::isfinite(n))
            throw InvalidDirection("Cone::project: zero or non-finite target direction");
        const Vec3 t = target / n;
        const double zenith = std::acos(std::clamp(t.dot(axis), -1.0, 1.0));
        if (zenith <= theta_max)
            return t;
        const double azimuth = std::atan2(t.dot(v), t.dot(u));
        return direction(theta_max, azimuth);
    }
};

// Feasible pointing closest to `target` inside the cone of half-angle theta_max about e1.
inline Vec3 project_to_cone(const Vec3 &target, double theta_max)
{
    return Cone::about_x(theta_max).project(target);
}

// ------------------------------------------------------------------------
// Rotation constraints
// ------------------------------------------------------------------------
struct AxisRange
{
    double lower = 0.0;
    double upper = two_pi;
};

struct RotationConstraint
{
    double theta_max = pi / 6.0;
    std::array<AxisRange, 3> bounds{}; // roll, pitch, yaw
    std::array<int, 3> levels{0, 0, 0}; // roll, pitch, yaw; 0 means continuous

    bool is_discrete() const { return levels[0] > 0 && levels[1] > 0 && levels[2] > 0; }

    void validate() const
    {
        if (!(theta_max >= 0.0 && theta_max <= pi / 2.0 + 1e-15))
            throw InvalidParameter("RotationConstraint: theta_max must lie in [0, pi/2]");
        for (const auto &b : bounds)
            if (!(b.lower <= b.upper))
                throw InvalidParameter("RotationConstraint: lower bound exceeds upper bound");
        for (int l : levels)
            if (l < 0)
                throw InvalidParameter("RotationConstraint: level counts must be >= 1 (or 0 for continuous)");
    }

    static RotationConstraint continuous(double theta_max)
    {
        RotationConstraint c;
        c.theta_max = theta_max;
        return c;
    }

    // Uniform grid of one axis (0 = roll, 1 = pitch, 2 = yaw). A full-turn range
    // wraps, so its last level stops one step short of 2*pi.
    std::vector<double> grid(int axis) const
    {
        const int count = levels[axis];
        const AxisRange r = bounds[axis];
        std::vector<double> g;
        if (count <= 0)
            return g;
        g.reserve(count);
        const double span = r.upper - r.lower;
        const double step = count == 1              ? 0.0
                            : span >= two_pi - 1e-12 ? two_pi / count
                                                     : span / (count - 1);
        for (int i = 0; i < count; ++i)
            g.push_back(r.lower + i * step);
        return g;
    }
};

// Nearest feasible codeword of the discrete codebook F_yaw x F_pitch x F_roll,
// measured by the angle between pointing vectors. Ties go to the lowest index.
inline Orientation quantize_orientation(const Orientation &target, const RotationConstraint &constraint)
{
    constraint.validate();
    if (!constraint.is_discrete())
        throw InvalidParameter("quantize_orientation: every axis needs a finite level count");

    const auto rolls = constraint.grid(0);
    const auto pitches = constraint.grid(1);
    const auto yaws = constraint.grid(2);
    const Cone cone = Cone::about_x(constraint.theta_max);

    bool found = false;
    double best_error = std::numeric_limits<double>::infinity();
    Orientation best;
    for (double yaw : yaws)
        for (double pitch : pitches)
            for (double roll : rolls)
            {
                const Orientation o = orient_antenna(RotationAngles(roll, pitch, yaw));
                if (!cone.contains(o.pointing))
                    continue;
                const double err = angle_between(o.pointing, target.pointing.normalized());
                if (!found || err < best_error - 1e-12)
                {
                    best = o;
                    best_error = err;
                    found = true;
                }
            }
    if (!found)
        throw InfeasibleError("quantize_orientation: no codeword satisfies the boresight cone");
    return best;
}

// ------------------------------------------------------------------------
// Array layouts
// ------------------------------------------------------------------------
enum class Topology
{
    Ula,
    Upa,
    Arbitrary
};

struct ArrayLayout
{
    std::vector<Vec3> positions;
    Vec3 center = Vec3::Zero();
    double spacing = 0.0;
    Topology topology = Topology::Arbitrary;
    int ny = 0; // UPA columns along y (ULA: N)
    int nz = 0; // UPA rows along z (ULA: 1)

    std::size_t size() const { return positions.size(); }

    // Linear array along y, centered at `center`.
    static ArrayLayout ula(int n, double spacing, const Vec3 &center = Vec3::Zero())
    {
        return upa(n, 1, spacing, center, Topology::Ula);
    }

    // Planar array in the y-z plane; element (iy, iz) has index iy * nz + iz,
    // matching a_y (x) a_z in the far-field steering vector.
    static ArrayLayout upa(int ny, int nz, double spacing, const Vec3 &center = Vec3::Zero(),
                           Topology tag = Topology::Upa)
    {
        if (ny < 1 || nz < 1)
            throw InvalidParameter("ArrayLayout: antenna counts must be positive");
        if (!(spacing > 0.0))
            throw InvalidParameter("ArrayLayout: spacing must be positive");
        ArrayLayout a;
        a.center = center;
        a.spacing = spacing;
        a.topology = tag;
        a.ny = ny;
        a.nz = nz;
        a.positions.reserve(static_cast<std::size_t>(ny) * nz);
        for (int iy = 0; iy < ny; ++iy)
            for (int iz = 0; iz < nz; ++iz)
                a.positions.push_back(center + Vec3(0.0, (iy - 0.5 * (ny - 1)) * spacing,
                                                    (iz - 0.5 * (nz - 1)) * spacing));
        return a;
    }

    static ArrayLayout arbitrary(std::vector<Vec3> positions, const Vec3 &center = Vec3::Zero())
    {
        ArrayLayout a;
        a.positions = std::move(positions);
        a.center = center;
        a.validate();
        return a;
    }

    void validate() const
    {
        if (positions.empty())
            throw InvalidParameter("ArrayLayout: no antennas");
        for (std::size_t i = 0; i < positions.size(); ++i)
            for (std::size_t k = i + 1; k < positions.size(); ++k)
                if ((positions[i] - positions[k]).norm() < 1e-12)
                    throw InvalidParameter("ArrayLayout: antenna positions must be pairwise distinct");
    }
};

struct RotatedArray
{
    std::vector<Vec3> positions;
    std::vector<Orientation> orientations;
};

// Rotates the whole array about its center; per-antenna rotations (if given)
// are applied in each antenna's local frame before the array rotation.
inline RotatedArray rotate_array(const ArrayLayout &layout, const RotationAngles &array_angles,
                                 std::span<const RotationAngles> per_antenna = {})
{
    if (!per_antenna.empty() && per_antenna.size() != layout.size())
        throw ConfigurationError("rotate_array: per-antenna angle list length does not match the array");

    const Mat3 Ra = rotation_matrix(array_angles);
    RotatedArray out;
    out.positions.reserve(layout.size());
    out.orientations.reserve(layout.size());
    for (std::size_t n = 0; n < layout.size(); ++n)
    {
        out.positions.push_back(Ra * (layout.positions[n] - layout.center) + layout.center);
        const Mat3 R = per_antenna.empty() ? Ra : Mat3(Ra * rotation_matrix(per_antenna[n]));
        out.orientations.push_back(orientation_from_matrix(R));
    }
    return out;
}

} // namespace ra
