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
#include "ra/core.hpp"
#include "ra/geometry.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ra
{

using Pointings = std::vector<Vec3>;
using CVec3 = Eigen::Vector3cd;

enum class SolverStatus
{
    Converged,
    IterationLimit,
    Infeasible
};

inline std::string to_string(SolverStatus s)
{
    switch (s)
    {
    case SolverStatus::Converged:
        return "converged";
    case SolverStatus::IterationLimit:
        return "iteration-limit";
    case SolverStatus::Infeasible:
        return "infeasible";
    }
    return "unknown";
}

struct TracePoint
{
    int iteration;
    double objective;
};

struct OptimizationResult
{
    std::vector<Orientation> orientations;    // BS (or transmit) side
    std::vector<Orientation> rx_orientations; // receive side for MIMO links
    std::vector<CMat> beamformers;            // solver-specific (covariance, receivers, ...)
    std::vector<int> assignment;              // discrete decisions (e.g. subcarrier owners)
    std::vector<TracePoint> trace;
    SolverStatus status = SolverStatus::IterationLimit;
    double objective = 0.0;

    bool trace_monotone(double slack = 1e-9) const
    {
        for (std::size_t i = 1; i < trace.size(); ++i)
            if (trace[i].objective < trace[i - 1].objective - slack * std::max(1.0, std::abs(trace[i - 1].objective)))
                return false;
        return true;
    }
};

struct SolverOptions
{
    double tol = 1e-6;
    int max_iter = 200;
};

// ------------------------------------------------------------------------
// Pointing helpers
// ------------------------------------------------------------------------

// Orientation whose boresight is `pointing`, with the reference vector taken
// from the zenith/azimuth frame about e1.
inline Orientation orientation_from_pointing(const Vec3 &pointing)
{
    const auto [z, a] = Cone::about_x(pi).zenith_azimuth(pointing);
    Orientation o = detail::zenith_azimuth_orientation(z, a);
    o.pointing = pointing.normalized();
    return o;
}

inline std::vector<Orientation> orientations_from_pointings(const Pointings &F)
{
    std::vector<Orientation> out;
    out.reserve(F.size());
    for (const auto &f : F)
        out.push_back(orientation_from_pointing(f));
    return out;
}

inline Pointings pointings_of(const std::vector<Orientation> &orientations)
{
    Pointings F;
    F.reserve(orientations.size());
    for (const auto &o : orientations)
        F.push_back(o.pointing);
    return F;
}

// Euclidean projection onto {f : ||f|| <= 1, angle(f, axis) <= theta_max}.
inline Vec3 project_ball_cone(const Vec3 &x, const Cone &cone)
{
    const Vec3 &a = cone.axis;
    const double t = x.dot(a);
    const Vec3 radial = x - t * a;
    const double r = radial.norm();
    Vec3 y;
    if (cone.theta_max >= pi / 2.0)
        y = t >= 0.0 ? x : Vec3(radial);
    else
    {
        const double tan_t = std::tan(cone.theta_max);
        if (r <= t * tan_t)
            y = x;
        else if (r * tan_t <= -t)
            y = Vec3::Zero();
        else
        {
            const Vec3 u = std::cos(cone.theta_max) * a + std::sin(cone.theta_max) * (radial / r);
            y = x.dot(u) * u;
        }
    }
    const double n = y.norm();
    return n > 1.0 ? Vec3(y / n) : y;
}

// Unit-norm feasible pointing nearest to the direction of x (fallback when x ~ 0).
inline Vec3 renormalize_into_cone(const Vec3 &x, const Cone &cone, const Vec3 &fallback)
{
    const double n = x.norm();
    if (!(n > 1e-12))
        return fallback;
    return cone.project(x / n);
}

// Pointing of every antenna toward `target` (as close as the cone allows).
inline Pointings point_toward(const std::vector<Vec3> &positions, const Vec3 &target, const Cone &cone)
{
    Pointings F;
    F.reserve(positions.size());
    for (const auto &q : positions)
    {
        const Vec3 d = target - q;
        F.push_back(d.norm() > 1e-12 ? cone.project(d) : cone.axis);
    }
    return F;
}

// Uniform sample of the cap {angle(f, axis) <= theta_max}.
template <class Rng> Vec3 random_cap_direction(Rng &rng, const Cone &cone)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double cz = 1.0 - U(rng) * (1.0 - std::cos(cone.theta_max));
    const double z = std::acos(std::clamp(cz, -1.0, 1.0));
    return cone.direction(z, two_pi * U(rng));
}

template <class Rng> Pointings random_pointings(Rng &rng, std::size_t n, const Cone &cone)
{
    Pointings F;
    F.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        F.push_back(random_cap_direction(rng, cone));
    return F;
}

// ------------------------------------------------------------------------
// Cosine-pattern path field: channels and their Jacobians with respect to the
// pointing vectors. Entry n of the channel towards target k is
//   h_kn = sum_p c_p exp(-j 2 pi f tau_p) sqrt(G_max) [u_p . f_n]_+^rho
// ------------------------------------------------------------------------
class PathField
{
  public:
    PathField() = default;

    PathField(std::vector<std::vector<AntennaPaths>> targets, const GainPattern &pattern)
        : targets_(std::move(targets))
    {
        if (pattern.kind() != GainPattern::Kind::Cosine)
            throw InvalidParameter("PathField: optimizers require the cosine pattern");
        sqrt_gmax_ = std::sqrt(pattern.g_max());
        rho_ = pattern.rho();
    }

    // Channels of every scenario user.
    static PathField users(const Scenario &scn, PathSet set = PathSet::Total)
    {
        std::vector<std::vector<AntennaPaths>> t;
        for (std::size_t k = 0; k < scn.users.size(); ++k)
            t.push_back(channel_paths(scn, k, set));
        return PathField(std::move(t), scn.pattern);
    }

    // LoS channels of arbitrary points (e.g. sensing samples).
    static PathField points(const Scenario &scn, const std::vector<Vec3> &pts)
    {
        Scenario s = scn;
        s.users = pts;
        s.clusters.clear();
        s.los_blocked = false;
        return users(s, PathSet::LoS);
    }

    std::size_t num_targets() const { return targets_.size(); }
    std::size_t num_antennas() const { return targets_.empty() ? 0 : targets_.front().size(); }
    double rho() const { return rho_; }

    double amplitude(double c) const
    {
        if (!(c > 0.0))
            return 0.0;
        return rho_ == 0.0 ? sqrt_gmax_ : sqrt_gmax_ * std::pow(c, rho_);
    }

    double amplitude_derivative(double c) const
    {
        if (!(c > 0.0) || rho_ == 0.0)
            return 0.0;
        return sqrt_gmax_ * rho_ * std::pow(std::max(c, 1e-6), rho_ - 1.0);
    }

    CVec channel(std::size_t k, const Pointings &F, double freq = 0.0) const
    {
        const auto &paths = targets_.at(k);
        CVec h = CVec::Zero(static_cast<Eigen::Index>(paths.size()));
        for (std::size_t n = 0; n < paths.size(); ++n)
            for (const auto &p : paths[n])
            {
                const double a = amplitude(p.direction.dot(F[n]));
                if (a != 0.0)
                    h[static_cast<Eigen::Index>(n)] += phase(p, freq) * a;
            }
        return h;
    }

    // Stacked channels as columns (N x K).
    CMat channel_matrix(const Pointings &F, double freq = 0.0) const
    {
        CMat H(static_cast<Eigen::Index>(num_antennas()), static_cast<Eigen::Index>(num_targets()));
        for (std::size_t k = 0; k < num_targets(); ++k)
            H.col(static_cast<Eigen::Index>(k)) = channel(k, F, freq);
        return H;
    }

    // d h_kn / d f_n for every antenna.
    std::vector<CVec3> jacobian(std::size_t k, const Pointings &F, double freq = 0.0) const
    {
        const auto &paths = targets_.at(k);
        std::vector<CVec3> J(paths.size(), CVec3::Zero());
        for (std::size_t n = 0; n < paths.size(); ++n)
            for (const auto &p : paths[n])
            {
                const double da = amplitude_derivative(p.direction.dot(F[n]));
                if (da != 0.0)
                    J[n] += (phase(p, freq) * da) * p.direction.cast<cdouble>();
            }
        return J;
    }

    // Real gradient of a real function U whose Wirtinger derivative with respect
    // to h_kn is D(n): grad_n = 2 Re(D(n) J_kn). Accumulates into `grad`.
    void accumulate_gradient(std::size_t k, const Pointings &F, const CVec &D, std::vector<Vec3> &grad,
                             double freq = 0.0) const
    {
        const auto J = jacobian(k, F, freq);
        for (std::size_t n = 0; n < J.size(); ++n)
            grad[n] += 2.0 * (D[static_cast<Eigen::Index>(n)] * J[n]).real();
    }

  private:
    static cdouble phase(const ChannelPath &p, double freq)
    {
        return freq == 0.0 ? p.coef : p.coef * std::exp(-j_unit * (two_pi * freq * p.delay));
    }

    std::vector<std::vector<AntennaPaths>> targets_;
    double sqrt_gmax_ = 2.0;
    double rho_ = 0.5;
};

// ------------------------------------------------------------------------
// Linear receivers (transpose convention: user k is detected as w_k^T y).
// H holds the user channels as columns; W returns unit-norm w_k as columns.
// ------------------------------------------------------------------------
enum class ReceiverType
{
    MRC,
    ZF,
    MMSE
};

inline CMat mrc_receivers(const CMat &H)
{
    CMat W = H.conjugate();
    for (Eigen::Index k = 0; k < W.cols(); ++k)
    {
        const double n = W.col(k).norm();
        if (n > 0.0)
            W.col(k) /= n;
    }
    return W;
}

inline CMat zf_receivers(const CMat &H)
{
    if (H.cols() > H.rows())
        throw InfeasibleError("zf_receivers: more users than antennas");
    const Eigen::CompleteOrthogonalDecomposition<CMat> cod(H);
    if (cod.rank() < H.cols())
        throw InfeasibleError("zf_receivers: user channels are linearly dependent");
    CMat W = cod.pseudoInverse().transpose(); // column k = row k of pinv(H)
    for (Eigen::Index k = 0; k < W.cols(); ++k)
        W.col(k) /= W.col(k).norm();
    return W;
}

inline CMat mmse_receivers(const CMat &H, const RVec &powers, double noise)
{
    const Eigen::Index N = H.rows(), K = H.cols();
    CMat R = noise * CMat::Identity(N, N);
    for (Eigen::Index j = 0; j < K; ++j)
        R += powers[j] * H.col(j) * H.col(j).adjoint();
    const Eigen::LLT<CMat> llt(R);
    CMat W(N, K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        // R^{-1} h_k is parallel to the interference-plus-noise whitened filter.
        CVec v = llt.solve(H.col(k));
        W.col(k) = v.conjugate() / v.norm();
    }
    return W;
}

inline RVec receiver_sinr(const CMat &H, const CMat &W, const RVec &powers, double noise)
{
    const Eigen::Index K = H.cols();
    RVec s(K);
    const CMat G = W.transpose() * H; // G(k, j) = w_k^T h_j
    for (Eigen::Index k = 0; k < K; ++k)
    {
        double interf = noise * W.col(k).squaredNorm();
        for (Eigen::Index j = 0; j < K; ++j)
            if (j != k)
                interf += powers[j] * std::norm(G(k, j));
        s[k] = powers[k] * std::norm(G(k, k)) / interf;
    }
    return s;
}

inline CMat receivers(ReceiverType type, const CMat &H, const RVec &powers, double noise)
{
    switch (type)
    {
    case ReceiverType::MRC:
        return mrc_receivers(H);
    case ReceiverType::ZF:
        return zf_receivers(H);
    case ReceiverType::MMSE:
        return mmse_receivers(H, powers, noise);
    }
    throw InvalidParameter("receivers: unknown type");
}

// ------------------------------------------------------------------------
// SCA step on pointing vectors.
//
// At the current point F0 every objective piece i and constraint piece j is
// linearized; the convex model
//   max_D  min_i (v_i + g_i.D) - ||D||^2 / (2 tau)
//   s.t.   c_j + h_j.D >= 0,  F0_n + D_n in ball(1) x cone
// is solved by projected subgradient ascent, and the resulting direction is
// followed with a halving line search on the renormalized, cone-projected
// iterate. A step is accepted only if the true objective does not decrease.
// ------------------------------------------------------------------------
struct Linearization
{
    std::vector<double> values;
    std::vector<std::vector<Vec3>> gradients;

    void add(double v, std::vector<Vec3> g)
    {
        values.push_back(v);
        gradients.push_back(std::move(g));
    }
    void clear()
    {
        values.clear();
        gradients.clear();
    }
};

struct ScaProblem
{
    // True objective (maximized).
    std::function<double(const Pointings &)> objective;
    // Objective pieces (objective = min over pieces) and constraint pieces (>= 0).
    std::function<void(const Pointings &, Linearization &obj, Linearization &cons)> linearize;
    // Optional exact feasibility test for trial points.
    std::function<bool(const Pointings &)> feasible;
};

struct ScaState
{
    double tau = -1.0;   // proximal step; < 0 means "initialize from gradient scale"
    bool tied = false;   // all antennas share one pointing (array-wise rotation)
    int inner_iterations = 300;
};

namespace detail
{
inline double dot_all(const std::vector<Vec3> &a, const std::vector<Vec3> &b)
{
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
        s += a[n].dot(b[n]);
    return s;
}

// Euclidean projection onto the probability simplex.
inline std::vector<double> project_simplex(std::vector<double> v)
{
    std::vector<double> s = v;
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        cum += s[i];
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (s[i] - t > 0.0)
            theta = t;
    }
    for (auto &x : v)
        x = std::max(0.0, x - theta);
    return v;
}

inline std::vector<Vec3> tie(const std::vector<Vec3> &g)
{
    Vec3 s = Vec3::Zero();
    for (const auto &v : g)
        s += v;
    return std::vector<Vec3>(g.size(), s / static_cast<double>(g.size()));
}
} // namespace detail

// Returns true when a step was accepted; F and value are updated in place.
inline bool sca_step(const ScaProblem &problem, const Cone &cone, Pointings &F, double &value, ScaState &state)
{
    Linearization obj, cons;
    problem.linearize(F, obj, cons);
    if (obj.values.empty())
        return false;
    if (state.tied)
    {
        for (auto &g : obj.gradients)
            g = detail::tie(g);
        for (auto &g : cons.gradients)
            g = detail::tie(g);
    }
    const std::size_t N = F.size();
    const std::size_t I = obj.values.size();

    auto model = [&](const std::vector<Vec3> &D) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < I; ++i)
            m = std::min(m, obj.values[i] + detail::dot_all(obj.gradients[i], D));
        return m;
    };
    const double base = model(std::vector<Vec3>(N, Vec3::Zero()));

    if (state.tau <= 0.0)
    {
        double gmax = 0.0;
        for (const auto &g : obj.gradients)
            for (const auto &v : g)
                gmax = std::max(gmax, v.norm());
        if (!(gmax > 0.0))
            return false;
        state.tau = 0.3 / gmax;
    }

    // Dual of the proximal model: minimize over multipliers (lambda in the
    // simplex for pieces, mu >= 0 for constraints) of
    //   sum lambda_i v_i + sum mu_j c_j + max_{D in X} (s . D - ||D||^2 / (2 tau)),
    // s = sum lambda_i g_i + sum mu_j h_j, whose maximizer is
    //   D = P_X(F0 + tau s) - F0.
    const std::size_t J = cons.values.size();
    auto primal = [&](const std::vector<double> &lam, const std::vector<double> &mu) {
        std::vector<Vec3> D(N, Vec3::Zero());
        for (std::size_t i = 0; i < I; ++i)
            for (std::size_t n = 0; n < N; ++n)
                D[n] += lam[i] * obj.gradients[i][n];
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t n = 0; n < N; ++n)
                D[n] += mu[j] * cons.gradients[j][n];
        for (std::size_t n = 0; n < N; ++n)
            D[n] = project_ball_cone(F[n] + state.tau * D[n], cone) - F[n];
        return D;
    };

    std::vector<Vec3> best;
    if (I == 1 && J == 0)
        best = primal({1.0}, {});
    else
    {
        double lip = 0.0;
        for (const auto &g : obj.gradients)
            lip += detail::dot_all(g, g);
        for (const auto &g : cons.gradients)
            lip += detail::dot_all(g, g);
        const double step = 1.0 / (state.tau * std::max(lip, 1e-300));

        std::vector<double> lam(I, 1.0 / static_cast<double>(I)), mu(J, 0.0);
        std::vector<double> ylam = lam, ymu = mu, lam_prev = lam, mu_prev = mu;
        double tk = 1.0;
        for (int it = 0; it < state.inner_iterations; ++it)
        {
            const auto D = primal(ylam, ymu);
            std::vector<double> zl(I);
            for (std::size_t i = 0; i < I; ++i)
                zl[i] = ylam[i] - step * (obj.values[i] + detail::dot_all(obj.gradients[i], D));
            lam = detail::project_simplex(zl);
            for (std::size_t j = 0; j < J; ++j)
                mu[j] = std::max(0.0, ymu[j] - step * (cons.values[j] + detail::dot_all(cons.gradients[j], D)));
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            const double w = (tk - 1.0) / tn;
            for (std::size_t i = 0; i < I; ++i)
                ylam[i] = lam[i] + w * (lam[i] - lam_prev[i]);
            for (std::size_t j = 0; j < J; ++j)
                ymu[j] = std::max(0.0, mu[j] + w * (mu[j] - mu_prev[j]));
            ylam = detail::project_simplex(ylam);
            lam_prev = lam;
            mu_prev = mu;
            tk = tn;
        }
        best = primal(lam, mu);
    }

    const double predicted = model(best) - base;
    if (!(predicted > 0.0) && cons.values.empty())
        return false;

    for (double t = 1.0; t > 1e-6; t *= 0.5)
    {
        Pointings trial(N);
        for (std::size_t n = 0; n < N; ++n)
            trial[n] = renormalize_into_cone(F[n] + t * best[n], cone, F[n]);
        if (problem.feasible && !problem.feasible(trial))
            continue;
        const double v = problem.objective(trial);
        if (v >= value + 1e-4 * t * std::max(predicted, 0.0) && v >= value)
        {
            const bool moved = v > value;
            F = std::move(trial);
            value = v;
            state.tau = t == 1.0 ? state.tau * 2.0 : state.tau * std::max(t, 0.05);
            return moved;
        }
    }
    state.tau *= 0.1;
    return false;
}

// Repeats SCA steps until the relative improvement drops below tol.
struct AscentReport
{
    int iterations = 0;
    bool converged = false;
};

inline AscentReport sca_ascent(const ScaProblem &problem, const Cone &cone, Pointings &F, double &value,
                               ScaState &state, const SolverOptions &opt,
                               const std::function<void(int, double)> &on_iterate = {})
{
    AscentReport rep;
    int stalls = 0;
    for (int it = 1; it <= opt.max_iter; ++it)
    {
        const double before = value;
        const bool moved = sca_step(problem, cone, F, value, state);
        rep.iterations = it;
        if (on_iterate)
            on_iterate(it, value);
        const double rel = (value - before) / std::max(std::abs(before), 1e-300);
        if (!moved)
        {
            if (++stalls >= 3)
            {
                rep.converged = true;
                break;
            }
            continue;
        }
        stalls = 0;
        if (rel < opt.tol)
        {
            rep.converged = true;
            break;
        }
    }
    return rep;
}

} // namespace ra
