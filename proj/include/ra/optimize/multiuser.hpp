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

// SINRs of all users for the given receiver rule, optionally with the Wirtinger
// coefficients D(j, n) = d gamma_k / d h_{j,n} for every user k.
struct SinrEvaluation
{
    RVec sinr;
    std::vector<CMat> coefficients; // [k] is K x N
};

inline SinrEvaluation evaluate_sinr(const CMat &H, const RVec &P, double noise, ReceiverType type,
                                    bool with_gradient)
{
    const Eigen::Index N = H.rows(), K = H.cols();
    SinrEvaluation ev;
    ev.sinr.resize(K);
    if (type == ReceiverType::ZF)
    {
        if (K > N)
            throw InfeasibleError("maxmin_sinr_ao: ZF needs K <= N");
        const CMat A = H.adjoint() * H;
        const Eigen::LDLT<CMat> ldlt(A);
        if (ldlt.info() != Eigen::Success)
            throw InfeasibleError("maxmin_sinr_ao: rank-deficient channel for ZF");
        const CMat Ainv = ldlt.solve(CMat::Identity(K, K));
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double akk = Ainv(k, k).real();
            if (!(akk > 0.0) || !std::isfinite(akk))
                throw InfeasibleError("maxmin_sinr_ao: rank-deficient channel for ZF");
            ev.sinr[k] = P[k] / (noise * akk);
            if (with_gradient)
            {
                const CVec a = Ainv.col(k);
                const CVec Ha = H * a;
                CMat D(K, N);
                for (Eigen::Index j = 0; j < K; ++j)
                    for (Eigen::Index n = 0; n < N; ++n)
                        D(j, n) = ev.sinr[k] / akk * std::conj(Ha[n]) * a[j];
                ev.coefficients.push_back(std::move(D));
            }
        }
        return ev;
    }
    if (type == ReceiverType::MRC)
    {
        const CMat W = mrc_receivers(H);
        ev.sinr = receiver_sinr(H, W, P, noise);
        if (with_gradient)
            throw InvalidParameter("evaluate_sinr: gradients are available for ZF and MMSE only");
        return ev;
    }
    for (Eigen::Index k = 0; k < K; ++k)
    {
        CMat R = noise * CMat::Identity(N, N);
        for (Eigen::Index j = 0; j < K; ++j)
            if (j != k)
                R += P[j] * H.col(j) * H.col(j).adjoint();
        const CVec v = R.llt().solve(H.col(k));
        ev.sinr[k] = P[k] * H.col(k).dot(v).real();
        if (with_gradient)
        {
            CMat D(K, N);
            for (Eigen::Index j = 0; j < K; ++j)
            {
                const cdouble scale = j == k ? cdouble(P[k]) : -P[k] * P[j] * H.col(j).dot(v);
                for (Eigen::Index n = 0; n < N; ++n)
                    D(j, n) = scale * std::conj(v[n]);
            }
            ev.coefficients.push_back(std::move(D));
        }
    }
    return ev;
}

struct MaxMinOptions
{
    ReceiverType receiver = ReceiverType::MMSE;
    SolverOptions solver{};
    Pointings initial; // empty: point every antenna at the user centroid
    bool tied = false; // one common pointing for all antennas
};

inline RVec uplink_powers(const Scenario &scn)
{
    RVec P(static_cast<Eigen::Index>(scn.users.size()));
    for (std::size_t k = 0; k < scn.users.size(); ++k)
        P[static_cast<Eigen::Index>(k)] = scn.user_power(k);
    return P;
}

inline Vec3 centroid(const std::vector<Vec3> &pts)
{
    Vec3 c = Vec3::Zero();
    for (const auto &p : pts)
        c += p;
    return c / static_cast<double>(pts.size());
}

// min_k SINR at given pointings.
inline double min_sinr(const PathField &field, const Pointings &F, const RVec &P, double noise, ReceiverType type)
{
    return evaluate_sinr(field.channel_matrix(F), P, noise, type, false).sinr.minCoeff();
}

// log SINR_k and its gradient with respect to every pointing vector.
inline Linearization log_sinr_pieces(const PathField &field, const Pointings &X, const RVec &P, double noise,
                                     ReceiverType type)
{
    const std::size_t K = field.num_targets(), N = X.size();
    const CMat H = field.channel_matrix(X);
    const auto ev = evaluate_sinr(H, P, noise, type, true);
    Linearization o;
    for (std::size_t k = 0; k < K; ++k)
    {
        std::vector<Vec3> g(N, Vec3::Zero());
        const CMat &D = ev.coefficients[k];
        for (std::size_t j = 0; j < K; ++j)
            field.accumulate_gradient(j, X, D.row(static_cast<Eigen::Index>(j)).transpose(), g);
        const double s = ev.sinr[static_cast<Eigen::Index>(k)];
        for (auto &v : g)
            v /= s;
        o.add(std::log(s), std::move(g));
    }
    return o;
}

// Objective trace and objective are the max-min rate log2(1 + min_k SINR_k).
inline OptimizationResult maxmin_sinr_ao(const Scenario &scn, const MaxMinOptions &mo = {})
{
    scn.validate();
    const std::size_t K = scn.users.size();
    const std::size_t N = scn.num_antennas();
    if (K == 0)
        throw InvalidParameter("maxmin_sinr_ao: at least one user required");
    if (mo.receiver == ReceiverType::ZF && K > N)
        throw InfeasibleError("maxmin_sinr_ao: ZF needs K <= N");
    const PathField field = PathField::users(scn);
    const RVec P = uplink_powers(scn);
    const Cone cone = Cone::about_x(scn.constraint.theta_max);
    const ReceiverType rx = mo.receiver == ReceiverType::MRC ? ReceiverType::MMSE : mo.receiver;

    std::vector<Pointings> starts;
    if (!mo.initial.empty())
        starts.push_back(mo.initial);
    else
    {
        starts.push_back(point_toward(scn.bs.positions, centroid(scn.users), cone));
        starts.push_back(Pointings(N, cone.axis));
        if (K > 1 && !mo.tied)
        {
            Pointings split(N);
            for (std::size_t n = 0; n < N; ++n)
                split[n] = cone.project(scn.users[n % K] - scn.bs.positions[n]);
            starts.push_back(split);
        }
    }

    // Pieces are log-SINRs; min_k log SINR_k is the surrogate objective.
    auto objective = [&](const Pointings &X) {
        const double s = min_sinr(field, X, P, scn.noise_power, rx);
        return s > 0.0 ? std::log(s) : -std::numeric_limits<double>::infinity();
    };
    ScaProblem prob;
    prob.objective = objective;
    prob.linearize = [&](const Pointings &X, Linearization &o, Linearization &) {
        o = log_sinr_pieces(field, X, P, scn.noise_power, rx);
    };
    auto rate = [](double log_sinr) { return std::log2(1.0 + std::exp(log_sinr)); };

    OptimizationResult res;
    Pointings best_F;
    double best = -std::numeric_limits<double>::infinity();
    for (auto F : starts)
    {
        if (F.size() != N)
            throw ConfigurationError("maxmin_sinr_ao: one initial pointing per antenna expected");
        for (auto &f : F)
            f = cone.project(f);
        if (mo.tied)
            std::fill(F.begin(), F.end(), F.front());
        double value = objective(F);
        if (!std::isfinite(value))
            continue;
        std::vector<TracePoint> trace{{0, rate(value)}};
        ScaState state;
        state.tied = mo.tied;
        const auto rep = sca_ascent(prob, cone, F, value, state, mo.solver,
                                    [&](int it, double v) { trace.push_back({it, rate(v)}); });
        if (value > best)
        {
            best = value;
            best_F = F;
            res.trace = std::move(trace);
            res.status = rep.converged ? SolverStatus::Converged : SolverStatus::IterationLimit;
        }
    }
    if (best_F.empty())
        throw InfeasibleError("maxmin_sinr_ao: a user has zero SINR at every initial orientation");
    res.orientations = orientations_from_pointings(best_F);
    const CMat H = field.channel_matrix(best_F);
    res.beamformers = {receivers(rx, H, P, scn.noise_power)};
    res.objective = rate(best);
    return res;
}

inline double maxmin_rate(const Scenario &scn, const std::vector<Orientation> &orientations,
                          ReceiverType type = ReceiverType::MMSE)
{
    const PathField field = PathField::users(scn);
    const double s = min_sinr(field, pointings_of(orientations), uplink_powers(scn), scn.noise_power, type);
    return std::log2(1.0 + s);
}

} // namespace ra
