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
#include "ra/optimize/waterfill.hpp"

namespace ra
{

namespace detail
{
struct CosineAmp
{
    double sqrt_gmax;
    double rho;

    explicit CosineAmp(const GainPattern &p)
    {
        if (p.kind() != GainPattern::Kind::Cosine)
            throw InvalidParameter("mimo_capacity_bcd: cosine patterns required");
        sqrt_gmax = std::sqrt(p.g_max());
        rho = p.rho();
    }
    double value(double c) const { return c > 0.0 ? sqrt_gmax * std::pow(c, rho) : 0.0; }
    double derivative(double c) const
    {
        return c > 0.0 && rho != 0.0 ? sqrt_gmax * rho * std::pow(std::max(c, 1e-6), rho - 1.0) : 0.0;
    }
};

// log2 det(I + H Q H^H / noise)
inline double log2det_capacity(const CMat &H, const CMat &Q, double noise)
{
    const Eigen::Index nr = H.rows();
    const CMat M = CMat::Identity(nr, nr) + H * Q * H.adjoint() / noise;
    const Eigen::LDLT<CMat> ldlt(M);
    double s = 0.0;
    for (Eigen::Index i = 0; i < nr; ++i)
        s += std::log2(std::max(ldlt.vectorD()[i].real(), 1e-300));
    return s;
}
} // namespace detail

// Capacity-achieving covariance for a fixed channel.
inline CMat waterfill_covariance(const CMat &H, double power, double noise)
{
    const Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinV);
    const RVec s2 = svd.singularValues().array().square();
    const RVec p = waterfill(s2, power, noise);
    const CMat &V = svd.matrixV();
    return V * p.cast<cdouble>().asDiagonal() * V.adjoint();
}

struct MimoCapacitySolver
{
    MimoLink link;
    double power;
    double noise;
    Cone tx_cone;
    Cone rx_cone;

    CMat channel(const Pointings &Ft, const Pointings &Fr) const
    {
        const detail::CosineAmp at(link.tx_pattern), ar(link.rx_pattern);
        CMat H(static_cast<Eigen::Index>(Fr.size()), static_cast<Eigen::Index>(Ft.size()));
        for (std::size_t r = 0; r < Fr.size(); ++r)
            for (std::size_t t = 0; t < Ft.size(); ++t)
            {
                const auto [c, u] = link.pair_term(r, t);
                H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) =
                    c * at.value(u.dot(Ft[t])) * ar.value(-u.dot(Fr[r]));
            }
        return H;
    }

    // Wirtinger coefficient of log2det with respect to H_rt (entry-wise).
    CMat coefficient(const CMat &H, const CMat &Q) const
    {
        const Eigen::Index nr = H.rows();
        const CMat M = noise * CMat::Identity(nr, nr) + H * Q * H.adjoint();
        return (M.ldlt().solve(H * Q) / std::log(2.0)).conjugate();
    }

    std::vector<Vec3> tx_gradient(const Pointings &Ft, const Pointings &Fr, const CMat &Q) const
    {
        const detail::CosineAmp at(link.tx_pattern), ar(link.rx_pattern);
        const CMat D = coefficient(channel(Ft, Fr), Q);
        std::vector<Vec3> g(Ft.size(), Vec3::Zero());
        for (std::size_t r = 0; r < Fr.size(); ++r)
            for (std::size_t t = 0; t < Ft.size(); ++t)
            {
                const auto [c, u] = link.pair_term(r, t);
                const cdouble w = D(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) * c *
                                  at.derivative(u.dot(Ft[t])) * ar.value(-u.dot(Fr[r]));
                g[t] += 2.0 * w.real() * u;
            }
        return g;
    }

    std::vector<Vec3> rx_gradient(const Pointings &Ft, const Pointings &Fr, const CMat &Q) const
    {
        const detail::CosineAmp at(link.tx_pattern), ar(link.rx_pattern);
        const CMat D = coefficient(channel(Ft, Fr), Q);
        std::vector<Vec3> g(Fr.size(), Vec3::Zero());
        for (std::size_t r = 0; r < Fr.size(); ++r)
            for (std::size_t t = 0; t < Ft.size(); ++t)
            {
                const auto [c, u] = link.pair_term(r, t);
                const cdouble w = D(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) * c *
                                  at.value(u.dot(Ft[t])) * ar.derivative(-u.dot(Fr[r]));
                g[r] -= 2.0 * w.real() * u;
            }
        return g;
    }

    double capacity(const Pointings &Ft, const Pointings &Fr, const CMat &Q) const
    {
        return detail::log2det_capacity(channel(Ft, Fr), Q, noise);
    }

    double optimal_capacity(const Pointings &Ft, const Pointings &Fr) const
    {
        const CMat H = channel(Ft, Fr);
        return detail::log2det_capacity(H, waterfill_covariance(H, power, noise), noise);
    }
};

inline OptimizationResult mimo_capacity_bcd(const MimoLink &link, Pointings tx, Pointings rx, double power,
                                           double noise, double theta_max, const SolverOptions &opt = {})
{
    if (tx.size() != link.tx.size() || rx.size() != link.rx.size())
        throw ConfigurationError("mimo_capacity_bcd: one initial orientation per antenna expected");
    if (!(power > 0.0) || !(noise > 0.0))
        throw InvalidParameter("mimo_capacity_bcd: powers must be positive");
    const MimoCapacitySolver S{link, power, noise, Cone::about_x(theta_max), Cone::about_minus_x(theta_max)};
    for (auto &f : tx)
        f = S.tx_cone.project(f);
    for (auto &f : rx)
        f = S.rx_cone.project(f);

    CMat Q = waterfill_covariance(S.channel(tx, rx), power, noise);
    double value = S.capacity(tx, rx, Q);

    OptimizationResult res;
    res.trace.push_back({0, value});
    ScaState tx_state, rx_state;
    SolverOptions inner{1e-9, 3};

    for (int it = 1; it <= opt.max_iter; ++it)
    {
        const double before = value;

        ScaProblem ptx;
        ptx.objective = [&](const Pointings &F) { return S.capacity(F, rx, Q); };
        ptx.linearize = [&](const Pointings &F, Linearization &o, Linearization &) {
            o.add(S.capacity(F, rx, Q), S.tx_gradient(F, rx, Q));
        };
        sca_ascent(ptx, S.tx_cone, tx, value, tx_state, inner);

        ScaProblem prx;
        prx.objective = [&](const Pointings &F) { return S.capacity(tx, F, Q); };
        prx.linearize = [&](const Pointings &F, Linearization &o, Linearization &) {
            o.add(S.capacity(tx, F, Q), S.rx_gradient(tx, F, Q));
        };
        sca_ascent(prx, S.rx_cone, rx, value, rx_state, inner);

        const CMat Qn = waterfill_covariance(S.channel(tx, rx), power, noise);
        const double vn = S.capacity(tx, rx, Qn);
        if (vn >= value)
        {
            Q = Qn;
            value = vn;
        }
        res.trace.push_back({it, value});
        if (value - before <= opt.tol * std::max(std::abs(before), 1e-12))
        {
            res.status = SolverStatus::Converged;
            break;
        }
    }
    res.orientations = orientations_from_pointings(tx);
    res.rx_orientations = orientations_from_pointings(rx);
    res.beamformers = {Q};
    res.objective = value;
    return res;
}

inline OptimizationResult mimo_capacity_bcd(const Scenario &scn, const std::vector<Orientation> &tx_init,
                                           const std::vector<Orientation> &rx_init, const SolverOptions &opt = {})
{
    return mimo_capacity_bcd(MimoLink::from_scenario(scn), pointings_of(tx_init), pointings_of(rx_init),
                             scn.tx_power, scn.noise_power, scn.constraint.theta_max, opt);
}

} // namespace ra
