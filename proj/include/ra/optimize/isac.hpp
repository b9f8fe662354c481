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
#include "ra/optimize/multiuser.hpp"

#include <Eigen/Eigenvalues>

namespace ra
{

struct SensingTask
{
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    std::vector<Vec3> points;     // sample points q_T,m
    cdouble target_rcs{1.0, 0.0}; // sigma_T
    double rate_floor = 0.0;      // bps/Hz, per user
    double p_max_comm = dbm_to_watt(30.0);
    double p_max_sense = dbm_to_watt(30.0);

    std::size_t num_samples() const { return points.size(); }

    // Sunflower layout of m points on the horizontal disc around `center`.
    static SensingTask horizontal_disc(const Vec3 &center, double radius, int m)
    {
        if (m < 1)
            throw InvalidParameter("SensingTask: at least one sample point required");
        if (!(radius >= 0.0))
            throw InvalidParameter("SensingTask: radius must be non-negative");
        SensingTask t;
        t.center = center;
        t.radius = radius;
        const double golden = pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < m; ++i)
        {
            const double r = m == 1 ? 0.0 : radius * std::sqrt((i + 0.5) / m);
            const double a = golden * i;
            t.points.push_back(center + Vec3(r * std::cos(a), r * std::sin(a), 0.0));
        }
        return t;
    }

    void validate() const
    {
        if (points.empty())
            throw InvalidParameter("SensingTask: at least one sample point required");
        for (const auto &p : points)
            if ((p - center).norm() > radius * (1.0 + 1e-12) + 1e-12)
                throw InvalidParameter("SensingTask: sample point outside the region");
        if (!(p_max_comm > 0.0) || !(p_max_sense > 0.0))
            throw InvalidParameter("SensingTask: power budgets must be positive");
        if (!(rate_floor >= 0.0))
            throw InvalidParameter("SensingTask: rate floor must be non-negative");
    }
};

// ------------------------------------------------------------------------
// Downlink beamforming with per-user SINR targets at minimum total power,
// through the uplink dual fixed point. Channels as columns of H; user k sees
// h_k^T w_k.
// ------------------------------------------------------------------------
struct DownlinkBeamforming
{
    CMat W; // N x K, columns w_k
    double power = std::numeric_limits<double>::infinity();
    bool feasible = false;
};

inline DownlinkBeamforming min_power_downlink(const CMat &H, const RVec &targets, const RVec &noise,
                                              double budget, int max_iter = 500)
{
    const Eigen::Index N = H.rows(), K = H.cols();
    DownlinkBeamforming out;
    if (K == 0)
    {
        out.W = CMat::Zero(N, 0);
        out.power = 0.0;
        out.feasible = true;
        return out;
    }
    CMat G(N, K); // normalized conj channels: |h_k^T w|^2 / s_k = |g_k^H w|^2
    for (Eigen::Index k = 0; k < K; ++k)
        G.col(k) = H.col(k).conjugate() / std::sqrt(noise[k]);

    auto receivers_for = [&](const RVec &lam) {
        CMat R = CMat::Identity(N, N);
        for (Eigen::Index j = 0; j < K; ++j)
            R += lam[j] * G.col(j) * G.col(j).adjoint();
        const Eigen::LLT<CMat> llt(R);
        CMat U(N, K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const CVec u = llt.solve(G.col(k));
            U.col(k) = u / u.norm();
        }
        return U;
    };
    // Powers meeting every target with equality for fixed unit filters U.
    // Uplink: rows are receivers; downlink: the transposed coupling.
    auto equality_powers = [&](const CMat &U, bool downlink) {
        RMat M(K, K);
        for (Eigen::Index k = 0; k < K; ++k)
            for (Eigen::Index j = 0; j < K; ++j)
            {
                const double c = downlink ? std::norm(G.col(k).dot(U.col(j))) : std::norm(U.col(k).dot(G.col(j)));
                M(k, j) = j == k ? c / targets[k] : -c;
            }
        RVec p = M.partialPivLu().solve(RVec::Ones(K));
        const bool ok = p.allFinite() && (p.array() >= 0.0).all();
        return std::make_pair(ok, p);
    };

    // Joint power / filter iteration: each equality-power solve for MMSE
    // filters is an upper bound on the optimum; the interference-function
    // iteration from zero is a lower bound and certifies infeasibility.
    RVec lam = RVec::Zero(K);
    bool have_upper = false;
    CMat U_best;
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it)
    {
        const CMat U = receivers_for(lam);
        const auto [ok, mu] = equality_powers(U, false);
        if (ok)
        {
            if (mu.sum() < best)
            {
                best = mu.sum();
                U_best = U;
            }
            const bool done = have_upper && std::abs(mu.sum() - lam.sum()) <= 1e-12 * mu.sum();
            have_upper = true;
            lam = mu;
            if (done)
                break;
            continue;
        }
        if (have_upper)
            break;
        CMat R = CMat::Identity(N, N);
        for (Eigen::Index j = 0; j < K; ++j)
            R += lam[j] * G.col(j) * G.col(j).adjoint();
        const Eigen::LLT<CMat> llt(R);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double q = G.col(k).dot(llt.solve(G.col(k))).real();
            lam[k] = targets[k] / ((1.0 + targets[k]) * std::max(q, 1e-300));
        }
        if (!(lam.sum() <= budget * (1.0 + 1e-9)))
            return out;
    }
    if (U_best.size() == 0)
        return out;
    const auto [ok, p] = equality_powers(U_best, true);
    if (!ok)
        return out;
    out.W.resize(N, K);
    for (Eigen::Index k = 0; k < K; ++k)
        out.W.col(k) = std::sqrt(p[k]) * U_best.col(k);
    out.power = p.sum();
    out.feasible = out.power <= budget * (1.0 + 1e-9);
    return out;
}

inline RVec downlink_sinr(const CMat &H, const CMat &W, const RVec &noise)
{
    const Eigen::Index K = H.cols();
    const CMat S = H.transpose() * W; // S(k, j) = h_k^T w_j
    RVec s(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        double interf = noise[k];
        for (Eigen::Index j = 0; j < K; ++j)
            if (j != k)
                interf += std::norm(S(k, j));
        s[k] = std::norm(S(k, k)) / interf;
    }
    return s;
}

// ------------------------------------------------------------------------
// Probing covariance: maximize min_m h_m^T S h_m^* scaled per point, over
// S >= 0, Tr(S) <= budget.
// ------------------------------------------------------------------------
inline CMat project_psd_trace(const CMat &S, double budget)
{
    const CMat Hs = 0.5 * (S + S.adjoint());
    const Eigen::SelfAdjointEigenSolver<CMat> es(Hs);
    RVec ev = es.eigenvalues().cwiseMax(0.0);
    if (ev.sum() > budget)
    {
        std::vector<double> v(ev.data(), ev.data() + ev.size());
        for (auto &x : v)
            x /= budget;
        v = detail::project_simplex(v);
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            ev[i] = v[static_cast<std::size_t>(i)] * budget;
    }
    return es.eigenvectors() * ev.cast<cdouble>().asDiagonal() * es.eigenvectors().adjoint();
}

struct EchoModel
{
    std::vector<CVec> channels; // h(F, q_m)
    double rcs2 = 1.0;          // |sigma_T|^2

    double echo(std::size_t m, const CMat &S) const
    {
        const CVec &h = channels[m];
        return rcs2 * h.squaredNorm() * h.dot(S.transpose() * h).real();
    }
    // h^T S h^* = conj(h)^H ... written with explicit sums below for clarity.
    double min_echo(const CMat &S) const
    {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < channels.size(); ++i)
            m = std::min(m, echo(i, S));
        return m;
    }
    CMat weight(std::size_t m) const // A_m with echo_m = Re tr(A_m^H S)
    {
        const CVec &h = channels[m];
        return rcs2 * h.squaredNorm() * (h.conjugate() * h.transpose()).adjoint();
    }
};

inline CMat optimize_probing_covariance(const EchoModel &model, double budget, const CMat &warm, int iters = 600)
{
    const auto N = static_cast<Eigen::Index>(model.channels.front().size());
    const std::size_t M = model.channels.size();
    std::vector<CMat> A(M);
    for (std::size_t m = 0; m < M; ++m)
        A[m] = model.weight(m);

    std::vector<CMat> starts{budget / static_cast<double>(N) * CMat::Identity(N, N)};
    {
        CMat avg = CMat::Zero(N, N);
        for (const auto &a : A)
            avg += a / a.trace().real();
        const Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (avg + avg.adjoint()));
        const CVec v = es.eigenvectors().col(N - 1);
        starts.push_back(budget * v * v.adjoint());
    }
    if (warm.rows() == N)
        starts.push_back(warm);
    CMat S = starts.front();
    double val = model.min_echo(S);
    for (const auto &s : starts)
        if (const double v = model.min_echo(s); v > val)
        {
            S = s;
            val = v;
        }

    // Projected gradient ascent on the soft-min
    //   phi(S) = -(1/kappa) log sum_m exp(-kappa e_m(S) / e_ref)
    // over a sequence of increasing kappa, keeping the best true minimum.
    const double ref = val;
    auto smooth = [&](const CMat &X, double kappa, std::vector<double> *w) {
        std::vector<double> e(M);
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < M; ++m)
            lo = std::min(lo, e[m] = model.echo(m, X) / ref);
        double z = 0.0;
        for (std::size_t m = 0; m < M; ++m)
        {
            e[m] = std::exp(-kappa * (e[m] - lo));
            z += e[m];
        }
        if (w)
            for (std::size_t m = 0; m < M; ++m)
                (*w)[m] = e[m] / z;
        return lo - std::log(z) / kappa;
    };
    const double kappas[] = {10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0};
    const int per_stage = std::max(1, iters / 6);
    CMat X = S;
    for (const double kappa : kappas)
    {
        double step = 1.0;
        for (int it = 0; it < per_stage; ++it)
        {
            std::vector<double> w(M);
            const double phi = smooth(X, kappa, &w);
            CMat G = CMat::Zero(N, N);
            for (std::size_t m = 0; m < M; ++m)
                G += (w[m] / ref) * A[m];
            G = 0.5 * (G + G.adjoint());
            const double gn = G.norm();
            if (!(gn > 0.0))
                break;
            bool moved = false;
            for (int ls = 0; ls < 40; ++ls)
            {
                const CMat T = project_psd_trace(X + (step * budget / gn) * G, budget);
                const double pt = smooth(T, kappa, nullptr);
                const double lin = ((T - X).adjoint() * G).trace().real();
                if (pt >= phi + 1e-4 * lin && pt > phi)
                {
                    X = T;
                    moved = true;
                    step = std::min(step * 2.0, 1.0);
                    break;
                }
                step *= 0.5;
            }
            if (const double v = model.min_echo(X); v > val)
            {
                val = v;
                S = X;
            }
            if (!moved)
                break;
        }
    }
    return S;
}

// Upper bound on max min_m echo via the Lagrange dual
//   min_{lambda in simplex} budget * lambda_max(sum lambda_m A_m),
// evaluated by projected subgradient; used to certify the primal solver.
inline double probing_dual_bound(const EchoModel &model, double budget, int iters = 2000)
{
    const std::size_t M = model.channels.size();
    std::vector<CMat> A(M);
    for (std::size_t m = 0; m < M; ++m)
        A[m] = model.weight(m);
    std::vector<double> lam(M, 1.0 / static_cast<double>(M));
    double best = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (const auto &a : A)
        scale = std::max(scale, a.trace().real());
    for (int it = 0; it < iters; ++it)
    {
        CMat B = CMat::Zero(A[0].rows(), A[0].cols());
        for (std::size_t m = 0; m < M; ++m)
            B += lam[m] * A[m];
        const Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (B + B.adjoint()));
        const auto n = es.eigenvalues().size();
        best = std::min(best, budget * es.eigenvalues()[n - 1]);
        const CVec v = es.eigenvectors().col(n - 1);
        std::vector<double> g(M);
        for (std::size_t m = 0; m < M; ++m)
            g[m] = lam[m] - 0.5 / std::sqrt(it + 1.0) * (v.dot(A[m] * v)).real() / scale;
        lam = detail::project_simplex(g);
    }
    return best;
}

// ------------------------------------------------------------------------
// Joint orientation / beamforming / probing design.
// ------------------------------------------------------------------------
struct IsacOptions
{
    SolverOptions solver{};
    std::vector<Pointings> starts; // extra initial points, tried alongside the defaults
    bool tied = false;             // array-wise rotation baseline (one common pointing)
    bool optimize_orientation = true;
    bool default_starts = true; // false: only `starts` are tried
};

class IsacProblem
{
  public:
    IsacProblem(const Scenario &scn, const SensingTask &task)
        : task_(task), users_(PathField::users(scn)), targets_(PathField::points(scn, task.points)),
          noise_(RVec::Constant(static_cast<Eigen::Index>(scn.users.size()), scn.noise_power))
    {
        task.validate();
        const double g = std::pow(2.0, task.rate_floor) - 1.0;
        gamma_ = RVec::Constant(static_cast<Eigen::Index>(scn.users.size()), g);
    }

    const SensingTask &task() const { return task_; }
    const RVec &targets() const { return gamma_; }

    EchoModel echo_model(const Pointings &F) const
    {
        EchoModel m;
        m.rcs2 = std::norm(task_.target_rcs);
        for (std::size_t i = 0; i < targets_.num_targets(); ++i)
            m.channels.push_back(targets_.channel(i, F));
        return m;
    }

    DownlinkBeamforming beamforming(const Pointings &F) const
    {
        return min_power_downlink(users_.channel_matrix(F), gamma_, noise_, task_.p_max_comm);
    }

    bool feasible(const Pointings &F) const
    {
        if (users_.num_targets() == 0 || task_.rate_floor == 0.0)
            return true;
        return beamforming(F).feasible;
    }

    RVec sinr(const Pointings &F, const CMat &W) const { return downlink_sinr(users_.channel_matrix(F), W, noise_); }

    // log of the minimum echo power at fixed S.
    double log_min_echo(const Pointings &F, const CMat &S) const
    {
        const double e = echo_model(F).min_echo(S);
        return e > 0.0 ? std::log(e) : -std::numeric_limits<double>::infinity();
    }

    void linearize(const Pointings &F, const CMat &S, const CMat &W, Linearization &obj, Linearization &cons) const
    {
        const std::size_t N = F.size();
        for (std::size_t m = 0; m < targets_.num_targets(); ++m)
        {
            const CVec h = targets_.channel(m, F);
            const double a = h.squaredNorm();
            const CVec Sh = S * h.conjugate();
            const double b = h.dot(S.transpose() * h).real();
            if (!(a > 0.0) || !(b > 0.0))
            {
                obj.add(-std::numeric_limits<double>::infinity(), std::vector<Vec3>(N, Vec3::Zero()));
                continue;
            }
            const CVec D = h.conjugate() / a + Sh / b;
            std::vector<Vec3> g(N, Vec3::Zero());
            targets_.accumulate_gradient(m, F, D, g);
            obj.add(std::log(std::norm(task_.target_rcs) * a * b), std::move(g));
        }
        if (task_.rate_floor == 0.0)
            return;
        const CMat H = users_.channel_matrix(F);
        const CMat Sk = H.transpose() * W;
        for (Eigen::Index k = 0; k < H.cols(); ++k)
        {
            double interf = noise_[k];
            CVec Db = CVec::Zero(H.rows());
            for (Eigen::Index j = 0; j < H.cols(); ++j)
                if (j != k)
                {
                    interf += std::norm(Sk(k, j));
                    Db += std::conj(Sk(k, j)) * W.col(j);
                }
            const double sig = std::norm(Sk(k, k));
            if (!(sig > 0.0))
                continue;
            const CVec D = std::conj(Sk(k, k)) * W.col(k) / sig - Db / interf;
            std::vector<Vec3> g(N, Vec3::Zero());
            users_.accumulate_gradient(static_cast<std::size_t>(k), F, D, g);
            cons.add(std::log(sig / interf) - std::log(gamma_[k]), std::move(g));
        }
    }

  private:
    SensingTask task_;
    PathField users_;
    PathField targets_;
    RVec noise_;
    RVec gamma_;
};

// Objective: min over sample points of the echo power (W).
inline OptimizationResult isac_minecho_bcd(const Scenario &scn, const SensingTask &task, const IsacOptions &io = {})
{
    scn.validate();
    const IsacProblem prob(scn, task);
    const Cone cone = Cone::about_x(scn.constraint.theta_max);
    const std::size_t N = scn.num_antennas();

    std::vector<Pointings> starts = io.starts;
    if (io.default_starts)
    {
        starts.push_back(point_toward(scn.bs.positions, task.center, cone));
        starts.push_back(Pointings(N, cone.axis));
    }
    if (io.default_starts && !scn.users.empty())
    {
        starts.push_back(point_toward(scn.bs.positions, centroid(scn.users), cone));
        const std::size_t K = scn.users.size();
        // Antenna n serves the region when its slot in a period of `period` is
        // below `share`, and otherwise points at one user in turn.
        for (const auto &[period, share] : {std::pair<std::size_t, std::size_t>{K + 1, 1}, {4, 1}, {2, 1}, {4, 3}})
        {
            Pointings split(N);
            std::size_t u = 0;
            for (std::size_t n = 0; n < N; ++n)
                split[n] = (n % period < share) ? cone.project(task.center - scn.bs.positions[n])
                                                : cone.project(scn.users[u++ % K] - scn.bs.positions[n]);
            starts.push_back(split);
        }
    }

    OptimizationResult res;
    res.status = SolverStatus::Infeasible;
    res.objective = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (auto F : starts)
    {
        if (F.size() != N)
            throw ConfigurationError("isac_minecho_bcd: one initial pointing per antenna expected");
        for (auto &f : F)
            f = cone.project(f);
        if (io.tied)
            std::fill(F.begin(), F.end(), F.front());
        const auto bf0 = prob.beamforming(F);
        if (!bf0.feasible && task.rate_floor > 0.0 && !scn.users.empty())
            continue;
        CMat W = bf0.W;
        const auto em0 = prob.echo_model(F);
        CMat S = optimize_probing_covariance(em0, task.p_max_sense, CMat());
        double value = em0.min_echo(S);

        OptimizationResult run;
        run.status = SolverStatus::IterationLimit;
        run.trace.push_back({0, value});
        ScaState state;
        state.tied = io.tied;
        for (int it = 1; it <= io.solver.max_iter && io.optimize_orientation; ++it)
        {
            const double before = value;
            // Orientation block with S fixed and W scaled to the full budget.
            CMat Wf = W;
            if (W.size() > 0 && W.squaredNorm() > 0.0)
                Wf *= std::sqrt(task.p_max_comm / W.squaredNorm());
            ScaProblem sp;
            sp.objective = [&](const Pointings &X) { return prob.log_min_echo(X, S); };
            sp.feasible = [&](const Pointings &X) { return prob.feasible(X); };
            sp.linearize = [&](const Pointings &X, Linearization &o, Linearization &c) {
                prob.linearize(X, S, Wf, o, c);
            };
            double lv = std::log(value);
            sca_ascent(sp, cone, F, lv, state, SolverOptions{1e-9, 3});

            // Resource block.
            const auto bf = prob.beamforming(F);
            if (bf.feasible || scn.users.empty() || task.rate_floor == 0.0)
                W = bf.W;
            const auto em = prob.echo_model(F);
            const CMat Sn = optimize_probing_covariance(em, task.p_max_sense, S);
            value = std::max(em.min_echo(S), em.min_echo(Sn));
            if (em.min_echo(Sn) >= em.min_echo(S))
                S = Sn;
            run.trace.push_back({it, value});
            if (value - before <= io.solver.tol * std::abs(before))
            {
                run.status = SolverStatus::Converged;
                break;
            }
        }
        if (!io.optimize_orientation)
            run.status = SolverStatus::Converged;
        if (value > best)
        {
            best = value;
            run.orientations = orientations_from_pointings(F);
            run.beamformers = {W, S};
            run.objective = value;
            res = std::move(run);
        }
    }
    return res;
}

} // namespace ra
