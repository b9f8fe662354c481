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

#include "ra/channel.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace ra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
Scenario single_antenna(double wavelength, const Vec3 &user, double rho = 0.5)
{
    Scenario s;
    s.carrier_frequency = speed_of_light / wavelength;
    s.bs = ArrayLayout::arbitrary({Vec3::Zero()});
    s.users = {user};
    s.pattern = GainPattern::cosine(rho);
    return s;
}

std::vector<Orientation> facing(const Scenario &s, const Vec3 &target)
{
    std::vector<Orientation> out;
    for (const auto &q : s.bs.positions)
    {
        const Vec3 u = (target - q).normalized();
        const auto [z, a] = Cone::about_x(pi).zenith_azimuth(u);
        out.push_back(detail::zenith_azimuth_orientation(z, a));
    }
    return out;
}

double wrap_pi(double x) { return std::remainder(x, two_pi); }
} // namespace

TEST_CASE("nearfield_los examples", "[channel]")
{
    auto s = single_antenna(0.125, Vec3(1, 0, 0));
    const double sqrt_beta0 = 0.125 / (4 * pi);
    std::vector<Orientation> o{Orientation::boresight()};
    CHECK_THAT(std::abs(nearfield_los(s, o, 0)[0]), WithinRel(sqrt_beta0 * 2.0, 1e-12));

    std::vector<Orientation> away{orient_antenna(RotationAngles(0, 0, pi))};
    CHECK(nearfield_los(s, away, 0)[0] == cdouble(0.0, 0.0));

    s.users = {Vec3(15, 0, 0)};
    const cdouble h = nearfield_los(s, o, 0)[0];
    CHECK_THAT(std::abs(h), WithinRel(sqrt_beta0 / 15 * 2, 1e-12));
    CHECK_THAT(std::abs(h), WithinAbs(1.3263e-3, 1e-7));
    CHECK_THAT(wrap_pi(std::arg(h)), WithinAbs(0.0, 1e-9));

    s.users = {Vec3::Zero()};
    CHECK_THROWS_AS(nearfield_los(s, o, 0), DegenerateGeometry);
}

TEST_CASE("farfield_channel examples", "[channel]")
{
    const double lambda = 0.125;
    auto one = single_antenna(lambda, Vec3(40, 7, -3), 1.0);
    const auto o1 = facing(one, Vec3(30, 10, 0));
    const cdouble nf = nearfield_los(one, o1, 0)[0], ff = farfield_channel(one, o1, 0)[0];
    CHECK(std::abs(nf - ff) <= 1e-15 * std::abs(nf));

    Scenario s;
    s.carrier_frequency = speed_of_light / lambda;
    s.bs = ArrayLayout::ula(4, lambda / 2);
    s.users = {s.bs.positions[0] + 1e4 * Vec3(std::sqrt(0.75), 0.5, 0.0)};
    std::vector<Orientation> bore(4, Orientation::boresight());
    const CVec h = farfield_channel(s, bore, 0);
    for (int n = 0; n < 4; ++n)
    {
        CHECK_THAT(std::abs(h[n]), WithinRel(std::abs(h[0]), 1e-12));
        CHECK_THAT(wrap_pi(std::arg(h[n] / h[0]) - n * pi / 2), WithinAbs(0.0, 1e-9));
    }

    s.users = {s.bs.positions[0] + Vec3(500, 0, 0)};
    const CVec hb = farfield_channel(s, bore, 0);
    CHECK(((hb / hb[0]).array() - cdouble(1, 0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("UPA far-field steering is the Kronecker product of the axis responses", "[channel]")
{
    const double lambda = 0.125, dd = lambda / 2;
    Scenario s;
    s.carrier_frequency = speed_of_light / lambda;
    s.bs = ArrayLayout::upa(3, 4, dd);
    const Vec3 qhat = Vec3(0.8, 0.36, 0.48).normalized();
    s.users = {s.bs.positions[0] + 1e5 * qhat};
    std::vector<Orientation> bore(s.bs.size(), Orientation::boresight());
    const CVec h = farfield_channel(s, bore, 0);
    CVec ay(3), az(4);
    for (int i = 0; i < 3; ++i)
        ay[i] = std::exp(j_unit * (two_pi * dd / lambda * i * qhat.y()));
    for (int i = 0; i < 4; ++i)
        az[i] = std::exp(j_unit * (two_pi * dd / lambda * i * qhat.z()));
    CVec a(12);
    for (int iy = 0; iy < 3; ++iy)
        for (int iz = 0; iz < 4; ++iz)
            a[iy * 4 + iz] = ay[iy] * az[iz];
    const CVec ratio = h.cwiseQuotient(a) / (h[0] / a[0]);
    CHECK((ratio.array() - cdouble(1, 0)).abs().maxCoeff() < 1e-9);
}

TEST_CASE("far-field model converges to the near-field model", "[channel][property]")
{
    const double lambda = 0.125;
    Scenario s;
    s.carrier_frequency = speed_of_light / lambda;
    s.bs = ArrayLayout::ula(4, lambda / 16);
    s.pattern = GainPattern::cosine(1.0);
    const double aperture = 3 * lambda / 16;
    std::vector<Orientation> o(4, orient_from_zenith_azimuth(0.2, 0.5));
    const Vec3 dir = Vec3(0.9, 0.3, 0.2).normalized();
    double prev = 1e9;
    for (double mult : {10.0, 100.0, 1000.0})
    {
        s.users = {mult * aperture * dir};
        const CVec nf = nearfield_los(s, o, 0), ff = farfield_channel(s, o, 0);
        const double r = (nf - ff).norm() / nf.norm();
        CHECK(r < prev);
        prev = r;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("nlos_multipath examples", "[channel]")
{
    auto s = single_antenna(0.125, Vec3(10, 5, 0));
    std::vector<Orientation> o{Orientation::boresight()};
    CHECK(nlos_multipath(s, o, 0).norm() == 0.0);

    s.clusters = {{Vec3(10, 0, 0), cdouble(1, 0)}};
    CHECK_THAT(std::abs(nlos_multipath(s, o, 0)[0]), WithinRel(s.beta0() * 2.0 / 50.0, 1e-12));

    // Second cluster further along the boresight: path longer by lambda/2,
    // RCS chosen so both terms have equal magnitude.
    const double target = 15.0 + 0.0625;
    double lo = 10.0, hi = 12.0;
    for (int i = 0; i < 200; ++i)
    {
        const double x = 0.5 * (lo + hi);
        (x + std::hypot(x - 10.0, 5.0) < target ? lo : hi) = x;
    }
    const double x = 0.5 * (lo + hi);
    const double dbar = std::hypot(x - 10.0, 5.0);
    s.clusters.push_back({Vec3(x, 0, 0), cdouble(x * dbar / 50.0, 0)});
    CHECK(std::abs(nlos_multipath(s, o, 0)[0]) <= 1e-12 * s.beta0() * 2.0 / 50.0 * 1e3);

    s.clusters = {{Vec3(0, 0, 0), cdouble(1, 0)}};
    CHECK_THROWS_AS(nlos_multipath(s, o, 0), DegenerateGeometry);
    s.clusters = {{Vec3(10, 5, 0), cdouble(1, 0)}};
    CHECK_THROWS_AS(nlos_multipath(s, o, 0), DegenerateGeometry);
}

TEST_CASE("total_channel superposition", "[channel]")
{
    Scenario s;
    s.bs = ArrayLayout::upa(2, 2, s.wavelength() / 2);
    s.users = {Vec3(20, 5, 2)};
    std::vector<Orientation> o(4, orient_from_zenith_azimuth(0.3, 1.0));
    CHECK((total_channel(s, o, 0) - nearfield_los(s, o, 0)).norm() == 0.0);

    s.clusters = {{Vec3(10, -4, 1), cdouble(0.5, 0.2)}, {Vec3(12, 6, -2), cdouble(-0.3, 0.9)}};
    const CVec los = nearfield_los(s, o, 0), nlos = nlos_multipath(s, o, 0);
    CHECK((total_channel(s, o, 0) - (los + nlos)).cwiseAbs().maxCoeff() == 0.0);

    s.los_blocked = true;
    CHECK((total_channel(s, o, 0) - nlos).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("LoS channel power falls as 1/d^2", "[channel][property]")
{
    Scenario s;
    s.bs = ArrayLayout::upa(3, 2, s.wavelength() / 2);
    s.users = {Vec3(12, -3, 4)};
    std::vector<Orientation> o(6, orient_from_zenith_azimuth(0.25, 2.0));
    const double p1 = nearfield_los(s, o, 0).squaredNorm();
    for (auto &q : s.bs.positions)
        q *= 2.0;
    s.users[0] *= 2.0;
    CHECK_THAT(nearfield_los(s, o, 0).squaredNorm(), WithinRel(p1 / 4.0, 1e-9));
}

TEST_CASE("wideband_response examples", "[channel]")
{
    Scenario s;
    s.bs = ArrayLayout::upa(2, 2, s.wavelength() / 2);
    s.users = {Vec3(20, 5, 2)};
    s.clusters = {{Vec3(10, -4, 1), cdouble(0.5, 0.2)}, {Vec3(12, 6, -2), cdouble(-0.3, 0.9)}};
    std::vector<Orientation> o(4, orient_from_zenith_azimuth(0.3, 1.0));

    WidebandConfig one{40e6, 1, 0};
    CHECK((wideband_response(s, one, o, 0).col(0) - total_channel(s, o, 0)).cwiseAbs().maxCoeff() <= 1e-12 * total_channel(s, o, 0).norm());

    Scenario los = s;
    los.clusters.clear();
    WidebandConfig wb{40e6, 64, 6};
    const CMat H = wideband_response(los, wb, o, 0);
    const double tau = (los.users[0] - los.bs.positions[2]).norm() / speed_of_light;
    for (int l = 1; l < 64; ++l)
    {
        CHECK_THAT(std::abs(H(2, l)), WithinRel(std::abs(H(2, 0)), 1e-12));
        CHECK_THAT(wrap_pi(std::arg(H(2, l) / H(2, l - 1)) + two_pi * wb.spacing() * tau), WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("wideband response matches a direct two-tap transform", "[channel]")
{
    const double fc = 2.4e9;
    Scenario s;
    s.carrier_frequency = fc;
    s.bs = ArrayLayout::arbitrary({Vec3::Zero()});
    s.users = {Vec3(30, 0, 0)};
    // Cluster on the ellipse with foci at antenna and user, 100 ns of excess delay.
    const double a = 0.5 * (30.0 + speed_of_light * 100e-9), c = 15.0, b = std::sqrt(a * a - c * c);
    const Vec3 cl(15.0 + 0.0, b, 0.0);
    s.clusters = {{cl, cdouble(2000.0, 0.0)}};
    std::vector<Orientation> o{Orientation::boresight()};
    WidebandConfig wb{40e6, 64, 6};
    REQUIRE_THAT(wb.spacing(), WithinRel(625e3, 1e-12));
    const CMat H = wideband_response(s, wb, o, 0);

    const double lambda = speed_of_light / fc, beta0 = std::pow(lambda / (4 * pi), 2);
    const double d0 = 30.0, dt = cl.norm(), db = (cl - s.users[0]).norm();
    REQUIRE_THAT((dt + db - d0) / speed_of_light, WithinRel(100e-9, 1e-9));
    const double g0 = 4.0, g1 = 4.0 * cl.normalized().x();
    const cdouble G0 = std::sqrt(beta0) / d0 * std::sqrt(g0);
    const cdouble G1 = 2000.0 * beta0 / (dt * db) * std::sqrt(g1);
    double min_mag = 1e9, max_mag = 0.0;
    for (int l = 0; l < 64; ++l)
    {
        const double f = l * 625e3;
        const cdouble ref = G0 * std::exp(-j_unit * two_pi * (fc + f) * (d0 / speed_of_light)) +
                            G1 * std::exp(-j_unit * two_pi * (fc + f) * ((dt + db) / speed_of_light));
        REQUIRE(std::abs(H(0, l) - ref) <= 1e-9 * std::abs(G0));
        min_mag = std::min(min_mag, std::abs(H(0, l)));
        max_mag = std::max(max_mag, std::abs(H(0, l)));
    }
    CHECK(max_mag > 1.5 * min_mag);
}

TEST_CASE("polarized_channel examples", "[channel]")
{
    auto s = single_antenna(0.125, Vec3(10, 0, 0));
    std::vector<Orientation> o{Orientation::boresight()};
    const CVec los = nearfield_los(s, o, 0);
    CHECK((polarized_channel(s, o, e3(), 0) - los).norm() <= 1e-15 * los.norm());
    CHECK(polarized_channel(s, o, e2(), 0).norm() <= 1e-15 * los.norm());

    const Vec3 q = (e1() + e3()).normalized();
    s.users = {10.0 * q};
    const CVec los45 = nearfield_los(s, o, 0);
    CHECK_THAT(std::abs(polarized_channel(s, o, e3(), 0)[0]), WithinRel(0.5 * std::abs(los45[0]), 1e-12));
}

TEST_CASE("polarized channel never exceeds the LoS amplitude", "[channel][property]")
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> N01;
    std::uniform_real_distribution<double> U(0.0, two_pi);
    Scenario s;
    s.bs = ArrayLayout::upa(2, 2, s.wavelength() / 2);
    for (int i = 0; i < 200; ++i)
    {
        s.users = {20.0 * Vec3(N01(rng), N01(rng), N01(rng)).normalized()};
        std::vector<Orientation> o;
        for (int n = 0; n < 4; ++n)
            o.push_back(orient_antenna(RotationAngles(U(rng), U(rng), U(rng))));
        const Vec3 pr = Vec3(N01(rng), N01(rng), N01(rng)).normalized();
        const CVec hp = polarized_channel(s, o, pr, 0), hl = nearfield_los(s, o, 0);
        for (int n = 0; n < 4; ++n)
            REQUIRE(std::abs(hp[n]) <= std::abs(hl[n]) * (1 + 1e-12));
    }
}

TEST_CASE("mimo_channel examples", "[channel]")
{
    MimoLink link;
    link.wavelength = 0.125;
    link.tx_pattern = GainPattern::cosine(1.0);
    link.rx_pattern = GainPattern::cosine(2.0);
    link.tx = ArrayLayout::arbitrary({Vec3::Zero()});
    link.rx = ArrayLayout::arbitrary({Vec3(8, 0, 0)});
    const std::vector<Orientation> tx{Orientation::boresight()};
    const std::vector<Orientation> rx{orient_antenna(RotationAngles(0, 0, pi))};
    const CMat H = mimo_channel(link, tx, rx);
    CHECK_THAT(std::abs(H(0, 0)), WithinRel(std::sqrt(link.beta0()) / 8.0 * std::sqrt(6.0 * 10.0), 1e-12));

    link.rx = ArrayLayout::arbitrary({Vec3(8, 0, 0), Vec3(-8, 0, 0)});
    const CMat H2 = mimo_channel(link, tx, {rx[0], Orientation::boresight()});
    CHECK(H2.row(1).norm() == 0.0);

    link.rx = ArrayLayout::arbitrary({Vec3::Zero()});
    CHECK_THROWS_AS(mimo_channel(link, tx, rx), DegenerateGeometry);
}

TEST_CASE("2x2 MIMO entries match per-pair near-field calls", "[channel]")
{
    MimoLink link;
    link.tx = ArrayLayout::ula(2, link.wavelength / 2);
    link.rx = ArrayLayout::ula(2, link.wavelength / 2, Vec3(10, 0, 0));
    const std::vector<Orientation> tx{orient_from_zenith_azimuth(0.1, 0.2), orient_from_zenith_azimuth(0.3, 4.0)};
    const std::vector<Orientation> rx{orient_antenna(RotationAngles(0, 0.1, pi)),
                                      orient_antenna(RotationAngles(0, -0.2, pi + 0.1))};
    const CMat H = mimo_channel(link, tx, rx);
    for (int r = 0; r < 2; ++r)
        for (int t = 0; t < 2; ++t)
        {
            Scenario s;
            s.carrier_frequency = speed_of_light / link.wavelength;
            s.bs = ArrayLayout::arbitrary({link.tx.positions[t]});
            s.users = {link.rx.positions[r]};
            const cdouble h = nearfield_los(s, {tx[t]}, 0)[0];
            const double grx = directional_gain(link.rx_pattern, rx[r], link.rx.positions[r], link.tx.positions[t]);
            REQUIRE(std::abs(H(r, t) - h * std::sqrt(grx)) <= 1e-14 * std::abs(h));
        }
}

TEST_CASE("MIMO link reciprocity with isotropic ends", "[channel][property]")
{
    MimoLink fwd;
    fwd.tx_pattern = fwd.rx_pattern = GainPattern::cosine(0.0);
    fwd.tx = ArrayLayout::upa(2, 2, fwd.wavelength / 2);
    fwd.rx = ArrayLayout::ula(3, fwd.wavelength / 2, Vec3(5, 1, 1));
    MimoLink rev = fwd;
    std::swap(rev.tx, rev.rx);
    const std::vector<Orientation> a(4, Orientation::boresight());
    const std::vector<Orientation> b(3, orient_antenna(RotationAngles(0, 0, pi)));
    const CMat H = mimo_channel(fwd, a, b);
    const CMat G = mimo_channel(rev, b, a);
    CHECK((H - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
}
