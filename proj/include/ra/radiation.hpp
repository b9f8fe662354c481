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

#include <algorithm>
#include <array>

namespace ra
{

struct ThreeGppElement
{
    double g_max_dbi = 8.0;
    double a_max_db = 30.0;
    double a_side_db = 30.0;
    double phi_3db = 65.0 * pi / 180.0;
    double eps_3db = 65.0 * pi / 180.0;
};

// Directional element gain. Cosine: G_max cos^{2 rho}(eps) on the front
// hemisphere with G_max = 2(2 rho + 1). ThreeGPP: element envelope in dB.
class GainPattern
{
  public:
    enum class Kind
    {
        Cosine,
        ThreeGPP
    };

    using ThreeGppParams = ThreeGppElement;

    GainPattern() : GainPattern(cosine(0.5)) {}

    static GainPattern cosine(double rho)
    {
        if (!std::isfinite(rho) || rho < 0.0)
            throw InvalidParameter("GainPattern: directivity rho must be finite and >= 0");
        GainPattern p(Kind::Cosine);
        p.rho_ = rho;
        return p;
    }

    static GainPattern three_gpp(const ThreeGppParams &params = {})
    {
        if (!(params.phi_3db > 0.0) || !(params.eps_3db > 0.0))
            throw InvalidParameter("GainPattern: 3 dB beamwidths must be positive");
        if (!(params.a_max_db >= 0.0) || !(params.a_side_db >= 0.0))
            throw InvalidParameter("GainPattern: attenuation limits must be non-negative");
        GainPattern p(Kind::ThreeGPP);
        p.tgpp_ = params;
        return p;
    }

    Kind kind() const { return kind_; }
    double rho() const { return rho_; }
    const ThreeGppParams &three_gpp_params() const { return tgpp_; }

    // Peak linear gain.
    double g_max() const
    {
        return kind_ == Kind::Cosine ? 2.0 * (2.0 * rho_ + 1.0) : db_to_linear(tgpp_.g_max_dbi);
    }

    // Cosine gain as a function of c = cos(eps).
    double cosine_gain(double c) const
    {
        return c > 0.0 ? g_max() * std::pow(c, 2.0 * rho_) : 0.0;
    }

    double gain(double eps, double phi) const
    {
        if (kind_ == Kind::Cosine)
            return eps < pi / 2.0 ? cosine_gain(std::cos(eps)) : 0.0;
        const auto &t = tgpp_;
        const double gh = -std::min(12.0 * (phi / t.phi_3db) * (phi / t.phi_3db), t.a_max_db);
        const double gv = -std::min(12.0 * (eps / t.eps_3db) * (eps / t.eps_3db), t.a_side_db);
        return db_to_linear(t.g_max_dbi - std::min(-(gh + gv), t.a_max_db));
    }

  private:
    explicit GainPattern(Kind k) : kind_(k) {}

    Kind kind_;
    double rho_ = 0.5;
    ThreeGppParams tgpp_{};
};

struct IncidentAngles
{
    double eps; // off-boresight angle in [0, pi]
    double phi; // azimuth about boresight in (-pi, pi]
};

inline IncidentAngles incident_angles(const Orientation &orientation, const Vec3 &direction)
{
    if (!direction.allFinite() || !is_unit(direction))
        throw InvalidDirection("incident_angles: direction must be a unit vector");
    const double eps = std::acos(std::clamp(direction.dot(orientation.pointing), -1.0, 1.0));
    const double phi = std::atan2(direction.dot(orientation.reference), direction.dot(orientation.lateral()));
    return {eps, phi};
}

inline double gain(const GainPattern &pattern, double eps, double phi)
{
    return pattern.gain(eps, phi);
}

inline double directional_gain(const GainPattern &pattern, const Orientation &orientation, const Vec3 &source,
                               const Vec3 &target)
{
    const Vec3 diff = target - source;
    const double d = diff.norm();
    if (!(d > 1e-12))
        throw DegenerateGeometry("directional_gain: source and target coincide");
    const Vec3 q = diff / d;
    if (pattern.kind() == GainPattern::Kind::Cosine)
        return pattern.cosine_gain(q.dot(orientation.pointing));
    const auto a = incident_angles(orientation, q);
    return pattern.gain(a.eps, a.phi);
}

namespace detail
{
// Composite 4-point Gauss-Legendre over [0, pi] in eps (panel edge at pi/2)
// and the periodic trapezoid rule in phi.
inline double sphere_quadrature(const GainPattern &pattern, int eps_panels, int phi_nodes)
{
    static constexpr std::array<double, 4> x{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                             0.8611363115940526};
    static constexpr std::array<double, 4> w{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                             0.3478548451374538};
    const double h = pi / eps_panels;
    const double dphi = two_pi / phi_nodes;
    const bool symmetric = pattern.kind() == GainPattern::Kind::Cosine;
    double total = 0.0;
    for (int p = 0; p < eps_panels; ++p)
    {
        const double mid = (p + 0.5) * h;
        for (int i = 0; i < 4; ++i)
        {
            const double eps = mid + 0.5 * h * x[i];
            double ring = 0.0;
            if (symmetric)
                ring = two_pi * pattern.gain(eps, 0.0);
            else
                for (int k = 0; k < phi_nodes; ++k)
                    ring += pattern.gain(eps, -pi + (k + 0.5) * dphi) * dphi;
            total += 0.5 * h * w[i] * ring * std::sin(eps);
        }
    }
    return total;
}
} // namespace detail

// Integral of G(eps, phi) sin(eps) over the sphere. Equals 4 pi for any cosine pattern.
inline double pattern_power_integral(const GainPattern &pattern)
{
    const double coarse = detail::sphere_quadrature(pattern, 180, 360);
    const double fine = detail::sphere_quadrature(pattern, 360, 720);
    if (!std::isfinite(fine) || std::abs(fine - coarse) > 1e-5 * std::abs(fine))
        throw NumericError("pattern_power_integral: quadrature did not converge");
    return fine;
}

// Polarization matching factor between the projected transmit field and p_r.
inline double polarization_gain(const Orientation &orientation, const Vec3 &direction, const Vec3 &p_r)
{
    const Vec3 &f = orientation.reference;
    const Vec3 p_t = f - f.dot(direction) * direction;
    return p_t.dot(p_r);
}

} // namespace ra
