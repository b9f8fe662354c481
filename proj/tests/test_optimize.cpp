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

#include "ra/optimize/isac.hpp"
#include "ra/optimize/mimo.hpp"
#include "ra/optimize/miso.hpp"
#include "ra/optimize/multiuser.hpp"
#include "ra/optimize/waterfill.hpp"
#include "ra/optimize/wideband.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace ra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
constexpr double kLambda = speed_of_light / 2.4e9;

Scenario ula_scenario(int n, const Vec3 &user, double rho = 0.5)
{
    Scenario s;
    s.bs = ArrayLayout::ula(n, kLambda / 2);
    s.users = {user};
    s.pattern = GainPattern::cosine(rho);
    return s;
}

Scenario multiuser_scenario(std::mt19937_64 &rng, int ny, int nz, int users, int clusters, double rho)
{
    Scenario s;
    s.bs = ArrayLayout::upa(ny, nz, kLambda / 2);
    s.pattern = GainPattern::cosine(rho);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < users; ++k)
    {
        const double az = deg_to_rad(-50.0 + 100.0 * (k + U(rng)) / users);
        const double el = deg_to_rad(-10.0 + 20.0 * U(rng));
        const double d = 30.0 + 20.0 * U(rng);
        s.users.push_back(d * Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)));
    }
    for (int q = 0; q < clusters; ++q)
    {
        const Vec3 base = s.users[static_cast<std::size_t>(q % users)];
        const Vec3 off(U(rng) * 10 - 5, U(rng) * 10 - 5, U(rng) * 4 - 2);
        s.clusters.push_back({base + off, std::polar(100.0, two_pi * U(rng))});
    }
    return s;
}

Pointings random_feasible(std::mt19937_64 &rng, std::size_t n, double tm)
{
    return random_pointings(rng, n, Cone::about_x(tm));
}

double fd(const std::function<double(const Pointings &)> &f, Pointings F, std::size_t n, int axis, double h = 1e-6)
{
    Pointings a = F, b = F;
    a[n][axis] += h;
    b[n][axis] -= h;
    return (f(a) - f(b)) / (2 * h);
}

// Pointing in the x-y plane at angle t from +x (or from -x for receivers).
Vec3 planar(double t, bool receiver) { return receiver ? Vec3(-std::cos(t), std::sin(t), 0) : Vec3(std::cos(t), std::sin(t), 0); }
} // namespace

// ---------------------------------------------------------------- projection

TEST_CASE("ball-cone projection satisfies the variational inequality", "[optimize]")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double tm : {0.0, pi / 6, pi / 3, pi / 2})
    {
        const Cone cone = Cone::about_x(tm);
        for (int i = 0; i < 200; ++i)
        {
            const Vec3 x(2 * g(rng), 2 * g(rng), 2 * g(rng));
            const Vec3 p = project_ball_cone(x, cone);
            REQUIRE(p.norm() <= 1 + 1e-12);
            if (p.norm() > 1e-12)
                REQUIRE(angle_between(p, cone.axis) <= tm + 1e-9);
            // (x - P x) . (y - P x) <= 0 for feasible y
            for (int j = 0; j < 50; ++j)
            {
                std::uniform_real_distribution<double> U(0.0, 1.0);
                const Vec3 y = random_cap_direction(rng, cone) * U(rng);
                REQUIRE((x - p).dot(y - p) <= 1e-9);
            }
        }
    }
}

// ---------------------------------------------------------------- MISO

TEST_CASE("optimal_pointing_miso: interior and boundary branches", "[optimize][miso]")
{
    auto s = ula_scenario(8, Vec3(20, 1, 0.5));
    const auto sol = optimal_pointing_miso(s);
    for (std::size_t n = 0; n < 8; ++n)
    {
        const Vec3 u = (s.users[0] - s.bs.positions[n]).normalized();
        CHECK((sol.orientations[n].pointing - u).norm() < 1e-12);
    }
    CHECK_THAT(sol.beamformer.squaredNorm(), WithinRel(s.tx_power, 1e-12));
    CHECK_THAT(sol.snr, WithinRel(s.tx_power * sol.channel.squaredNorm() / s.noise_power, 1e-12));

    auto b = ula_scenario(4, Vec3(0, 30, 0));
    const auto sb = optimal_pointing_miso(b);
    for (const auto &o : sb.orientations)
        CHECK_THAT(angle_between(o.pointing, e1()), WithinAbs(pi / 6, 1e-12));
}

TEST_CASE("optimal_pointing_miso matches a per-antenna 0.5 degree grid search", "[optimize][miso]")
{
    auto s = ula_scenario(64, Vec3(15, 0, 0));
    const auto sol = optimal_pointing_miso(s);
    std::vector<Orientation> grid;
    for (const auto &q : s.bs.positions)
    {
        const Vec3 u = (s.users[0] - q).normalized();
        double best = -1;
        Orientation bo;
        for (int iz = 0; iz <= 60; ++iz)
            for (int ia = 0; ia < 720; ++ia)
            {
                const auto o = orient_from_zenith_azimuth(deg_to_rad(0.5 * iz), deg_to_rad(0.5 * ia));
                const double c = o.pointing.dot(u);
                if (c > best)
                {
                    best = c;
                    bo = o;
                }
            }
        grid.push_back(bo);
    }
    const double grid_snr = miso_snr(s, grid);
    CHECK(grid_snr <= sol.snr * (1 + 1e-12));
    CHECK(std::abs(linear_to_db(sol.snr) - linear_to_db(grid_snr)) < 0.01);
}

TEST_CASE("optimal_pointing_miso dominates random feasible orientations", "[optimize][miso]")
{
    std::mt19937_64 rng(5);
    auto s = ula_scenario(8, Vec3(6, -4, 2), 1.0);
    const double best = optimal_pointing_miso(s).snr;
    for (int i = 0; i < 10000; ++i)
    {
        const auto F = random_feasible(rng, 8, pi / 6);
        REQUIRE(miso_snr(s, orientations_from_pointings(F)) <= best * (1 + 1e-12));
    }
}

TEST_CASE("ula_snr_closed_form examples", "[optimize][miso]")
{
    const double zeta = 0.0625 / 15.0;
    CHECK_THAT(zeta, WithinRel(1.0 / 240.0, 1e-12));
    const UlaSnrModel m{zeta, pi / 6, 1.0, 1.0};
    CHECK(m.n_bar() == 277);
    // pi/6 + cos(pi/6) = 1.3896242...; the commonly quoted 1.389667 agrees to 5e-5
    CHECK_THAT(m.asymptote() / m.scale(), WithinAbs(0.5235987755982988 + 0.8660254037844386, 1e-15));
    CHECK_THAT(m.asymptote() / m.scale(), WithinAbs(1.389667, 5e-5));
    const UlaSnrModel z{zeta, 0.0, 1.0, 1.0};
    CHECK_THAT(z.asymptote() / z.scale(), WithinAbs(1.0, 1e-15));
    CHECK_THROWS_AS(ula_snr_closed_form(8, 0.0, pi / 6, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(ula_snr_closed_form(8, -1.0, pi / 6, 1, 1), InvalidParameter);
    // continuity at N = N_bar is not required, but the large-N branch tends to the asymptote
    CHECK_THAT(m.snr(100000000) / m.asymptote(), WithinRel(1.0, 1e-4));
}

TEST_CASE("ula_snr_closed_form tracks the aligned-gain sum", "[optimize][miso]")
{
    const double P = dbm_to_watt(10), s2 = dbm_to_watt(-80), d = 15.0, tm = pi / 6;
    const double spacing = kLambda / 2;
    const double beta0 = std::pow(kLambda / (4 * pi), 2);
    for (long N : {8L, 64L, 277L, 2048L})
    {
        // Independent sum: every antenna points at the user up to the cone edge.
        double sum = 0.0;
        for (long n = 0; n < N; ++n)
        {
            const double y = (n - (N - 1) / 2.0) * spacing;
            const double dn = std::hypot(d, y);
            const double zen = std::atan2(std::abs(y), d);
            sum += std::cos(zen - std::min(zen, tm)) / (dn * dn);
        }
        const double brute = P / s2 * beta0 * 4.0 * sum;
        const double cf = ula_snr_closed_form(N, spacing / d, tm, P, s2);
        CHECK_THAT(cf, WithinRel(brute, 0.02));
        // and the full solver agrees with the brute-force sum
        auto s = ula_scenario(static_cast<int>(N), Vec3(d, 0, 0));
        CHECK_THAT(optimal_pointing_miso(s).snr, WithinRel(brute, 1e-9));
    }
}

// ---------------------------------------------------------------- water-filling

TEST_CASE("waterfill: equal gains split equally and budget binds", "[optimize][waterfill]")
{
    const RVec p = waterfill(RVec::Constant(4, 2.0), 3.0, 0.5);
    for (int i = 0; i < 4; ++i)
        CHECK_THAT(p[i], WithinRel(0.75, 1e-12));
    CHECK(waterfill(RVec::Zero(3), 1.0).isZero());
}

TEST_CASE("waterfill KKT conditions on random instances", "[optimize][waterfill]")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 500; ++t)
    {
        const int n = 1 + static_cast<int>(U(rng) * 12);
        RVec g(n);
        for (int i = 0; i < n; ++i)
            g[i] = std::pow(10.0, 4 * U(rng) - 2);
        const double P = std::pow(10.0, 3 * U(rng) - 1.5), s2 = 0.1 + U(rng);
        const RVec p = waterfill(g, P, s2);
        REQUIRE_THAT(p.sum(), WithinRel(P, 1e-9));
        double mu = -1;
        for (int i = 0; i < n; ++i)
            if (p[i] > 1e-12 * P)
            {
                if (mu < 0)
                    mu = p[i] + s2 / g[i];
                REQUIRE_THAT(p[i] + s2 / g[i], WithinRel(mu, 1e-9));
            }
        for (int i = 0; i < n; ++i)
            if (p[i] <= 1e-12 * P)
                REQUIRE(s2 / g[i] >= mu * (1 - 1e-9));
    }
}

// ---------------------------------------------------------------- MIMO

TEST_CASE("mimo_capacity_bcd: single antennas reduce to aligned MISO", "[optimize][mimo]")
{
    MimoLink link;
    link.tx = ArrayLayout::arbitrary({Vec3::Zero()});
    link.rx = ArrayLayout::arbitrary({Vec3(10, 3, 0)});
    link.wavelength = kLambda;
    const double P = dbm_to_watt(10), s2 = dbm_to_watt(-80);
    const auto res = mimo_capacity_bcd(link, {e1()}, {-e1()}, P, s2, pi / 6);
    const double d = std::hypot(10.0, 3.0);
    const double snr = P * link.beta0() * 4.0 * 4.0 / (d * d) / s2;
    CHECK_THAT(res.objective, WithinRel(std::log2(1 + snr), 1e-6));
    CHECK(res.trace_monotone());
}

TEST_CASE("waterfill_covariance splits power equally over equal singular values", "[optimize][mimo]")
{
    const CMat H = 3.0 * CMat::Identity(3, 3);
    const CMat Q = waterfill_covariance(H, 1.5, 0.1);
    CHECK((Q - 0.5 * CMat::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("mimo_capacity_bcd gradients match finite differences", "[optimize][mimo]")
{
    MimoLink link;
    link.tx = ArrayLayout::arbitrary({Vec3(0, -0.5, 0.1), Vec3(0, 0.6, 0)});
    link.rx = ArrayLayout::arbitrary({Vec3(8, -1, 0), Vec3(8, 1.5, 0.3)});
    link.wavelength = kLambda;
    link.tx_pattern = link.rx_pattern = GainPattern::cosine(1.5);
    const MimoCapacitySolver S{link, 1.0, 1e-6, Cone::about_x(pi / 6), Cone::about_minus_x(pi / 6)};
    std::mt19937_64 rng(2);
    const Pointings Ft = random_pointings(rng, 2, S.tx_cone), Fr = random_pointings(rng, 2, S.rx_cone);
    const CMat Q = waterfill_covariance(S.channel(Ft, Fr), 1.0, 1e-6);
    const auto gt = S.tx_gradient(Ft, Fr, Q);
    const auto gr = S.rx_gradient(Ft, Fr, Q);
    for (std::size_t n = 0; n < 2; ++n)
        for (int a = 0; a < 3; ++a)
        {
            CHECK_THAT(gt[n][a], WithinAbs(fd([&](const Pointings &X) { return S.capacity(X, Fr, Q); }, Ft, n, a),
                                           1e-5 * (1 + std::abs(gt[n][a]))));
            CHECK_THAT(gr[n][a], WithinAbs(fd([&](const Pointings &X) { return S.capacity(Ft, X, Q); }, Fr, n, a),
                                           1e-5 * (1 + std::abs(gr[n][a]))));
        }
}

TEST_CASE("mimo_capacity_bcd matches a 2 degree exhaustive search on a 2x2 link", "[optimize][mimo]")
{
    MimoLink link;
    link.tx = ArrayLayout::arbitrary({Vec3(0, -2, 0), Vec3(0, 2, 0)});
    link.rx = ArrayLayout::arbitrary({Vec3(12, -1, 0), Vec3(12, 5, 0)});
    link.wavelength = kLambda;
    link.tx_pattern = link.rx_pattern = GainPattern::cosine(2.0);
    const double P = dbm_to_watt(10), s2 = dbm_to_watt(-80);
    const MimoCapacitySolver S{link, P, s2, Cone::about_x(pi / 6), Cone::about_minus_x(pi / 6)};

    const Pointings t0{e1(), e1()}, r0{-e1(), -e1()};
    const double initial = S.optimal_capacity(t0, r0);
    const auto res = mimo_capacity_bcd(link, t0, r0, P, s2, pi / 6);
    CHECK(res.objective >= initial);
    CHECK(res.trace_monotone());

    double best = 0.0;
    std::vector<double> grid;
    for (int i = -15; i <= 15; ++i)
        grid.push_back(deg_to_rad(2.0 * i));
    for (double a : grid)
        for (double b : grid)
            for (double c : grid)
                for (double d : grid)
                    best = std::max(best, S.optimal_capacity({planar(a, false), planar(b, false)},
                                                             {planar(c, true), planar(d, true)}));
    CHECK(res.objective >= 0.98 * best);
}

// ---------------------------------------------------------------- multi-user

TEST_CASE("SINR gradients match finite differences", "[optimize][multiuser]")
{
    std::mt19937_64 rng(17);
    auto s = multiuser_scenario(rng, 2, 2, 3, 3, 1.5);
    const PathField field = PathField::users(s);
    const RVec P = uplink_powers(s);
    const Pointings F = random_feasible(rng, 4, pi / 6);
    for (auto type : {ReceiverType::MMSE, ReceiverType::ZF})
    {
        const auto lin = log_sinr_pieces(field, F, P, s.noise_power, type);
        for (std::size_t k = 0; k < 3; ++k)
        {
            auto f = [&](const Pointings &X) {
                return std::log(evaluate_sinr(field.channel_matrix(X), P, s.noise_power, type, false)
                                    .sinr[static_cast<Eigen::Index>(k)]);
            };
            CHECK_THAT(lin.values[k], WithinRel(f(F), 1e-12));
            for (std::size_t n = 0; n < 4; ++n)
                for (int a = 0; a < 3; ++a)
                    CHECK_THAT(lin.gradients[k][n][a],
                               WithinAbs(fd(f, F, n, a), 1e-5 * (1 + std::abs(lin.gradients[k][n][a]))));
        }
    }
}

TEST_CASE("MMSE SINR formula equals the explicit receiver", "[optimize][multiuser]")
{
    std::mt19937_64 rng(4);
    auto s = multiuser_scenario(rng, 2, 2, 3, 2, 1.0);
    const PathField field = PathField::users(s);
    const RVec P = uplink_powers(s);
    const CMat H = field.channel_matrix(random_feasible(rng, 4, pi / 6));
    const RVec a = evaluate_sinr(H, P, s.noise_power, ReceiverType::MMSE, false).sinr;
    const RVec b = receiver_sinr(H, mmse_receivers(H, P, s.noise_power), P, s.noise_power);
    for (int k = 0; k < 3; ++k)
        CHECK_THAT(a[k], WithinRel(b[k], 1e-9));
    const RVec z = evaluate_sinr(H, P, s.noise_power, ReceiverType::ZF, false).sinr;
    const RVec zb = receiver_sinr(H, zf_receivers(H), P, s.noise_power);
    for (int k = 0; k < 3; ++k)
        CHECK_THAT(z[k], WithinRel(zb[k], 1e-9));
}

TEST_CASE("ZF receivers null interference", "[optimize][multiuser]")
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t)
    {
        auto s = multiuser_scenario(rng, 4, 4, 4, 8, 2.0);
        const CMat H = PathField::users(s).channel_matrix(random_feasible(rng, 16, pi / 6));
        const CMat W = zf_receivers(H);
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j)
                if (j != k)
                    REQUIRE(std::abs(W.col(k).cwiseProduct(H.col(j)).sum()) <= 1e-9 * H.col(j).norm());
    }
}

TEST_CASE("maxmin_sinr_ao: ZF with more users than antennas is infeasible", "[optimize][multiuser]")
{
    std::mt19937_64 rng(1);
    auto s = multiuser_scenario(rng, 1, 2, 3, 0, 1.0);
    MaxMinOptions o;
    o.receiver = ReceiverType::ZF;
    CHECK_THROWS_AS(maxmin_sinr_ao(s, o), InfeasibleError);
    CHECK_THROWS_AS(zf_receivers(CMat::Ones(2, 3)), InfeasibleError);
}

TEST_CASE("maxmin_sinr_ao: single user reaches the MISO optimum", "[optimize][multiuser]")
{
    auto s = ula_scenario(8, Vec3(25, 9, -3), 1.0);
    const auto miso = optimal_pointing_miso(s);
    for (auto type : {ReceiverType::MMSE, ReceiverType::ZF})
    {
        MaxMinOptions o;
        o.receiver = type;
        o.initial = Pointings(8, e1());
        const auto res = maxmin_sinr_ao(s, o);
        CHECK(res.trace_monotone());
        CHECK_THAT(res.objective, WithinRel(std::log2(1 + miso.snr), 1e-4));
    }
}

TEST_CASE("maxmin_sinr_ao: mirrored users give mirrored orientations and equal SINRs", "[optimize][multiuser]")
{
    Scenario s;
    s.bs = ArrayLayout::ula(4, kLambda / 2);
    s.pattern = GainPattern::cosine(2.0);
    s.users = {Vec3(30, 25, 0), Vec3(30, -25, 0)};
    const auto res = maxmin_sinr_ao(s);
    CHECK(res.trace_monotone());
    const auto F = pointings_of(res.orientations);
    for (std::size_t n = 0; n < 4; ++n)
    {
        const Vec3 m = F[3 - n];
        CHECK((F[n] - Vec3(m.x(), -m.y(), m.z())).norm() < 1e-6);
    }
    const RVec sinr = evaluate_sinr(PathField::users(s).channel_matrix(F), uplink_powers(s), s.noise_power,
                                    ReceiverType::MMSE, false)
                          .sinr;
    CHECK_THAT(sinr[0], WithinRel(sinr[1], 1e-6));
    // the optimized design must beat broadside pointing
    CHECK(res.objective > maxmin_rate(s, std::vector<Orientation>(4, Orientation::boresight())));
}

TEST_CASE("maxmin_sinr_ao improves on fixed orientations on random instances", "[optimize][multiuser]")
{
    std::mt19937_64 rng(99);
    int wins = 0;
    for (int t = 0; t < 10; ++t)
    {
        auto s = multiuser_scenario(rng, 4, 4, 4, 8, 2.0);
        const auto res = maxmin_sinr_ao(s);
        REQUIRE(res.trace_monotone());
        wins += res.objective > maxmin_rate(s, std::vector<Orientation>(16, Orientation::boresight()));
    }
    CHECK(wins >= 9);
}

// ---------------------------------------------------------------- wideband

TEST_CASE("allocate_subcarriers: single user takes everything", "[optimize][wideband]")
{
    RMat g(1, 8);
    g << 1, 2, 3, 4, 5, 6, 7, 8;
    const auto a = allocate_subcarriers(g, RVec::Constant(1, 2.0));
    for (int o : a.owner)
        CHECK(o == 0);
    CHECK_THAT(a.power.sum(), WithinRel(2.0, 1e-12));
}

TEST_CASE("allocate_subcarriers: greedy result is a local optimum", "[optimize][wideband]")
{
    std::mt19937_64 rng(6);
    std::exponential_distribution<double> E(1.0);
    RMat g(3, 24);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 24; ++l)
            g(k, l) = 10 * E(rng);
    const RVec B = RVec::Constant(3, 1.0);
    const auto a = allocate_subcarriers(g, B);
    double total = 0;
    for (int k = 0; k < 3; ++k)
        total += detail::user_rate(g, k, a.owner, 1.0);
    CHECK_THAT(a.rate, WithinRel(total, 1e-12));
    for (int l = 0; l < 24; ++l)
        for (int k = 0; k < 3; ++k)
        {
            auto o = a.owner;
            o[static_cast<std::size_t>(l)] = k;
            double v = 0;
            for (int j = 0; j < 3; ++j)
                v += detail::user_rate(g, j, o, 1.0);
            REQUIRE(v <= a.rate * (1 + 1e-9));
        }
    for (int k = 0; k < 3; ++k)
        CHECK_THAT(a.power.row(k).sum(), WithinRel(1.0, 1e-9));
}

TEST_CASE("wideband: flat line-of-sight channel gives equal powers and rates", "[optimize][wideband]")
{
    // Single antenna, LoS only: every subcarrier sees the same |h|.
    Scenario s;
    s.bs = ArrayLayout::arbitrary({Vec3::Zero()});
    s.users = {Vec3(20, 2, 0)};
    WidebandConfig wb{40e6, 16, 4};
    const WidebandSumRate m(s, wb);
    const RMat g = m.gains({e1()});
    CHECK((g.array() - g(0, 0)).abs().maxCoeff() < 1e-9 * g(0, 0));
    const auto a = allocate_subcarriers(g, m.budgets());
    for (int l = 0; l < 16; ++l)
        CHECK_THAT(a.power(0, l), WithinRel(s.tx_power / 16, 1e-9));
}

TEST_CASE("wideband gradient matches finite differences", "[optimize][wideband]")
{
    std::mt19937_64 rng(21);
    auto s = multiuser_scenario(rng, 2, 2, 2, 4, 1.0);
    WidebandConfig wb{40e6, 16, 6};
    const WidebandSumRate m(s, wb);
    const Pointings F = random_feasible(rng, 4, pi / 6);
    const auto a = allocate_subcarriers(m.gains(F), m.budgets());
    const auto g = m.gradient(F, a);
    // fixed powers: the envelope gradient equals the partial derivative
    auto f = [&](const Pointings &X) {
        const RMat G = m.gains(X);
        double r = 0;
        for (int l = 0; l < 16; ++l)
        {
            const int k = a.owner[static_cast<std::size_t>(l)];
            r += std::log2(1 + a.power(k, l) * G(k, l));
        }
        return r * m.normalization();
    };
    for (std::size_t n = 0; n < 4; ++n)
        for (int ax = 0; ax < 3; ++ax)
            CHECK_THAT(g[n][ax], WithinAbs(fd(f, F, n, ax), 1e-6 * (1 + std::abs(g[n][ax]))));
}

TEST_CASE("wideband_sumrate_ao: monotone trace and gains over fixed pointing", "[optimize][wideband]")
{
    std::mt19937_64 rng(31);
    auto s = multiuser_scenario(rng, 2, 2, 2, 4, 2.0);
    WidebandConfig wb{40e6, 16, 6};
    const auto res = wideband_sumrate_ao(s, wb);
    CHECK(res.trace_monotone());
    WidebandOptions fixed;
    fixed.initial = Pointings(4, e1());
    fixed.optimize_orientation = false;
    CHECK(res.objective >= wideband_sumrate_ao(s, wb, fixed).objective);
    for (int o : res.assignment)
        CHECK((o == 0 || o == 1));
}

// ---------------------------------------------------------------- ISAC

TEST_CASE("isotropic probing echo power", "[optimize][isac]")
{
    EchoModel m;
    m.rcs2 = 2.5;
    m.channels = {CVec::Random(6)};
    const double P = 3.0;
    const double h2 = m.channels[0].squaredNorm();
    CHECK_THAT(m.echo(0, P / 6 * CMat::Identity(6, 6)), WithinRel(2.5 * h2 * h2 * P / 6, 1e-12));
}

TEST_CASE("probing covariance reaches the dual bound", "[optimize][isac]")
{
    std::mt19937_64 rng(13);
    for (int t = 0; t < 5; ++t)
    {
        EchoModel m;
        for (int i = 0; i < 6; ++i)
        {
            CVec h(8);
            std::normal_distribution<double> g(0, 1);
            for (int n = 0; n < 8; ++n)
                h[n] = cdouble(g(rng), g(rng));
            m.channels.push_back(h);
        }
        const CMat S = optimize_probing_covariance(m, 1.0, CMat(), 600);
        const Eigen::SelfAdjointEigenSolver<CMat> es(S);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        CHECK(S.trace().real() <= 1.0 + 1e-9);
        const double ub = probing_dual_bound(m, 1.0, 4000);
        CHECK(m.min_echo(S) <= ub * (1 + 1e-9));
        CHECK(m.min_echo(S) >= 0.99 * ub);
    }
}

TEST_CASE("min_power_downlink meets targets with equality", "[optimize][isac]")
{
    std::mt19937_64 rng(9);
    auto s = multiuser_scenario(rng, 4, 4, 3, 0, 1.0);
    const CMat H = PathField::users(s).channel_matrix(Pointings(16, e1()));
    const RVec noise = RVec::Constant(3, s.noise_power);
    const RVec gam = RVec::Constant(3, 100.0);
    const auto bf = min_power_downlink(H, gam, noise, 1.0);
    REQUIRE(bf.feasible);
    const RVec sinr = downlink_sinr(H, bf.W, noise);
    for (int k = 0; k < 3; ++k)
        CHECK_THAT(sinr[k], WithinRel(100.0, 1e-6));
    CHECK_THAT(bf.W.squaredNorm(), WithinRel(bf.power, 1e-9));
    // the minimum power is below any feasible alternative such as scaled ZF
    const CMat Z = zf_receivers(H.conjugate()).conjugate(); // w_k with h_j^T w_k = 0
    double pz = 0;
    for (int k = 0; k < 3; ++k)
        pz += gam[k] * noise[k] / std::norm(H.col(k).cwiseProduct(Z.col(k)).sum());
    CHECK(bf.power <= pz * (1 + 1e-9));
    CHECK_FALSE(min_power_downlink(H, gam, noise, bf.power * 0.5).feasible);
}

TEST_CASE("isac_minecho_bcd: single point without users points at it", "[optimize][isac]")
{
    Scenario s;
    s.bs = ArrayLayout::upa(2, 2, kLambda / 2);
    const Vec3 q(30, 6, -3);
    SensingTask task = SensingTask::horizontal_disc(q, 0.0, 1);
    const auto res = isac_minecho_bcd(s, task);
    CHECK(res.trace_monotone());
    const auto F = pointings_of(res.orientations);
    std::vector<Orientation> aligned;
    for (std::size_t n = 0; n < 4; ++n)
    {
        const Vec3 u = (q - s.bs.positions[n]).normalized();
        CHECK(angle_between(F[n], u) < 1e-3);
        aligned.push_back(orientation_from_pointing(u));
    }
    Scenario t = s;
    t.users = {q};
    const CVec h = nearfield_los(t, aligned, 0);
    const double best = h.squaredNorm() * h.squaredNorm() * task.p_max_sense;
    CHECK_THAT(res.objective, WithinRel(best, 1e-5));
}

TEST_CASE("ISAC linearization matches finite differences", "[optimize][isac]")
{
    std::mt19937_64 rng(77);
    auto s = multiuser_scenario(rng, 2, 2, 2, 0, 1.5);
    SensingTask task = SensingTask::horizontal_disc(Vec3(30, 10, -5), 3.0, 3);
    task.rate_floor = 2.0;
    const IsacProblem prob(s, task);
    const Pointings F = random_feasible(rng, 4, pi / 6);
    const CMat S = optimize_probing_covariance(prob.echo_model(F), 1.0, CMat());
    const CMat W = prob.beamforming(F).W;
    Linearization o, c;
    prob.linearize(F, S, W, o, c);
    REQUIRE(o.values.size() == 3);
    REQUIRE(c.values.size() == 2);
    for (std::size_t m = 0; m < 3; ++m)
    {
        auto f = [&](const Pointings &X) { return std::log(prob.echo_model(X).echo(m, S)); };
        CHECK_THAT(o.values[m], WithinRel(f(F), 1e-12));
        for (std::size_t n = 0; n < 4; ++n)
            for (int a = 0; a < 3; ++a)
                CHECK_THAT(o.gradients[m][n][a], WithinAbs(fd(f, F, n, a), 1e-5 * (1 + std::abs(o.gradients[m][n][a]))));
    }
    for (std::size_t k = 0; k < 2; ++k)
    {
        auto f = [&](const Pointings &X) { return std::log(prob.sinr(X, W)[static_cast<Eigen::Index>(k)]); };
        for (std::size_t n = 0; n < 4; ++n)
            for (int a = 0; a < 3; ++a)
                CHECK_THAT(c.gradients[k][n][a], WithinAbs(fd(f, F, n, a), 1e-5 * (1 + std::abs(c.gradients[k][n][a]))));
    }
}

TEST_CASE("isac_minecho_bcd respects rate floors and reports infeasibility", "[optimize][isac]")
{
    std::mt19937_64 rng(41);
    auto s = multiuser_scenario(rng, 2, 2, 2, 0, 1.0);
    SensingTask task = SensingTask::horizontal_disc(Vec3(30, 15, -5), 3.0, 4);
    task.rate_floor = 4.0;
    const auto res = isac_minecho_bcd(s, task);
    REQUIRE(res.status != SolverStatus::Infeasible);
    CHECK(res.trace_monotone());
    const IsacProblem prob(s, task);
    const RVec sinr = prob.sinr(pointings_of(res.orientations), res.beamformers[0]);
    for (int k = 0; k < 2; ++k)
        CHECK(std::log2(1 + sinr[k]) >= 4.0 - 1e-6);
    CHECK(res.beamformers[0].squaredNorm() <= task.p_max_comm * (1 + 1e-9));

    task.rate_floor = 60.0;
    CHECK(isac_minecho_bcd(s, task).status == SolverStatus::Infeasible);
}

TEST_CASE("SensingTask validation", "[optimize][isac]")
{
    CHECK_THROWS_AS(SensingTask::horizontal_disc(Vec3::Zero(), 1.0, 0), InvalidParameter);
    auto t = SensingTask::horizontal_disc(Vec3(10, 0, 0), 2.0, 8);
    CHECK_NOTHROW(t.validate());
    for (const auto &p : t.points)
        CHECK((p - t.center).norm() <= 2.0 + 1e-12);
    t.points.push_back(Vec3(20, 0, 0));
    CHECK_THROWS_AS(t.validate(), InvalidParameter);
}
