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
#include "ra/optimize/waterfill.hpp"

namespace ra
{

struct SubcarrierAllocation
{
    std::vector<int> owner; // per subcarrier; -1 when unused
    RMat power;             // K x L
    double rate = 0.0;      // sum over k, l of log2(1 + p g), before CP normalization
};

namespace detail
{
inline double user_rate(const RMat &gain, Eigen::Index k, const std::vector<int> &owner, double budget,
                        RMat *power = nullptr)
{
    std::vector<Eigen::Index> set;
    for (std::size_t l = 0; l < owner.size(); ++l)
        if (owner[l] == k)
            set.push_back(static_cast<Eigen::Index>(l));
    if (set.empty())
        return 0.0;
    RVec g(static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i)
        g[static_cast<Eigen::Index>(i)] = gain(k, set[i]);
    const RVec p = waterfill(g, budget, 1.0);
    double r = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        const auto ii = static_cast<Eigen::Index>(i);
        r += std::log2(1.0 + p[ii] * g[ii]);
        if (power)
            (*power)(k, set[i]) = p[ii];
    }
    return r;
}

inline SubcarrierAllocation finalize_allocation(const RMat &gain, const RVec &budgets, std::vector<int> owner)
{
    SubcarrierAllocation a;
    a.power = RMat::Zero(gain.rows(), gain.cols());
    for (Eigen::Index k = 0; k < gain.rows(); ++k)
        a.rate += user_rate(gain, k, owner, budgets[k], &a.power);
    a.owner = std::move(owner);
    return a;
}
} // namespace detail

// gain(k, l) = |h_kl|^2 / noise_l. Per-user water-filling over assigned
// subcarriers, then greedy single-subcarrier reassignment while it helps.
inline SubcarrierAllocation allocate_subcarriers(const RMat &gain, const RVec &budgets,
                                                 const std::vector<int> &warm = {})
{
    const Eigen::Index K = gain.rows(), L = gain.cols();
    if (budgets.size() != K)
        throw ConfigurationError("allocate_subcarriers: one budget per user expected");
    auto total = [&](const std::vector<int> &own) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < K; ++k)
            s += detail::user_rate(gain, k, own, budgets[k]);
        return s;
    };

    std::vector<std::vector<int>> starts;
    std::vector<int> rr(static_cast<std::size_t>(L)), best_gain(static_cast<std::size_t>(L));
    for (Eigen::Index l = 0; l < L; ++l)
    {
        rr[static_cast<std::size_t>(l)] = static_cast<int>(l % K);
        Eigen::Index kb = 0;
        gain.col(l).maxCoeff(&kb);
        best_gain[static_cast<std::size_t>(l)] = static_cast<int>(kb);
    }
    starts.push_back(rr);
    starts.push_back(best_gain);
    if (static_cast<Eigen::Index>(warm.size()) == L)
        starts.push_back(warm);

    std::vector<int> owner;
    double best = -1.0;
    for (const auto &s : starts)
    {
        const double v = total(s);
        if (v > best)
        {
            best = v;
            owner = s;
        }
    }

    std::vector<double> ur(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k)
        ur[static_cast<std::size_t>(k)] = detail::user_rate(gain, k, owner, budgets[k]);
    for (int pass = 0; pass < 50 && K > 1; ++pass)
    {
        bool changed = false;
        for (Eigen::Index l = 0; l < L; ++l)
        {
            const int o = owner[static_cast<std::size_t>(l)];
            for (Eigen::Index k = 0; k < K; ++k)
            {
                if (k == o)
                    continue;
                auto trial = owner;
                trial[static_cast<std::size_t>(l)] = static_cast<int>(k);
                const double rk = detail::user_rate(gain, k, trial, budgets[k]);
                const double ro = o >= 0 ? detail::user_rate(gain, o, trial, budgets[o]) : 0.0;
                const double old = ur[static_cast<std::size_t>(k)] + (o >= 0 ? ur[static_cast<std::size_t>(o)] : 0.0);
                if (rk + ro > old * (1.0 + 1e-12) + 1e-15)
                {
                    owner = std::move(trial);
                    ur[static_cast<std::size_t>(k)] = rk;
                    if (o >= 0)
                        ur[static_cast<std::size_t>(o)] = ro;
                    changed = true;
                    break;
                }
            }
        }
        if (!changed)
            break;
    }
    return detail::finalize_allocation(gain, budgets, std::move(owner));
}

struct WidebandOptions
{
    SolverOptions solver{};
    Pointings initial; // empty: point at the user centroid
    bool optimize_orientation = true;
};

class WidebandSumRate
{
  public:
    WidebandSumRate(const Scenario &scn, const WidebandConfig &wb)
        : field_(PathField::users(scn)), wb_(wb), budgets_(uplink_powers(scn)),
          noise_(scn.noise_power / wb.subcarriers)
    {
        wb.validate();
    }

    double noise_per_subcarrier() const { return noise_; }
    double normalization() const { return 1.0 / (wb_.subcarriers + wb_.cp_length); }
    const RVec &budgets() const { return budgets_; }

    RMat gains(const Pointings &F) const
    {
        const auto K = static_cast<Eigen::Index>(field_.num_targets());
        RMat g(K, wb_.subcarriers);
        for (Eigen::Index k = 0; k < K; ++k)
            for (int l = 0; l < wb_.subcarriers; ++l)
                g(k, l) = field_.channel(static_cast<std::size_t>(k), F, wb_.subcarrier_frequency(l)).squaredNorm() / noise_;
        return g;
    }

    // Normalized sum rate for a fixed assignment with powers re-water-filled.
    double rate(const Pointings &F, const std::vector<int> &owner) const
    {
        const RMat g = gains(F);
        double s = 0.0;
        for (Eigen::Index k = 0; k < g.rows(); ++k)
            s += detail::user_rate(g, k, owner, budgets_[k]);
        return s * normalization();
    }

    std::vector<Vec3> gradient(const Pointings &F, const SubcarrierAllocation &a) const
    {
        std::vector<Vec3> grad(F.size(), Vec3::Zero());
        for (int l = 0; l < wb_.subcarriers; ++l)
        {
            const int k = a.owner[static_cast<std::size_t>(l)];
            if (k < 0)
                continue;
            const double f = wb_.subcarrier_frequency(l);
            const CVec h = field_.channel(static_cast<std::size_t>(k), F, f);
            const double p = a.power(k, l);
            const double snr = p * h.squaredNorm() / noise_;
            const double scale = normalization() * p / (noise_ * std::log(2.0) * (1.0 + snr));
            field_.accumulate_gradient(static_cast<std::size_t>(k), F, CVec(scale * h.conjugate()), grad, f);
        }
        return grad;
    }

  private:
    PathField field_;
    WidebandConfig wb_;
    RVec budgets_;
    double noise_;
};

// Objective: (1 / (L + L_CP)) sum_k sum_l a_kl log2(1 + P_kl |h_kl|^2 / (noise / L)).
inline OptimizationResult wideband_sumrate_ao(const Scenario &scn, const WidebandConfig &wb,
                                             const WidebandOptions &wo = {})
{
    scn.validate();
    if (scn.users.empty())
        throw InvalidParameter("wideband_sumrate_ao: at least one user required");
    const WidebandSumRate model(scn, wb);
    const Cone cone = Cone::about_x(scn.constraint.theta_max);
    Pointings F = wo.initial.empty() ? point_toward(scn.bs.positions, centroid(scn.users), cone) : wo.initial;
    if (F.size() != scn.num_antennas())
        throw ConfigurationError("wideband_sumrate_ao: one initial pointing per antenna expected");
    for (auto &f : F)
        f = cone.project(f);

    SubcarrierAllocation alloc = allocate_subcarriers(model.gains(F), model.budgets());
    double value = alloc.rate * model.normalization();
    OptimizationResult res;
    res.trace.push_back({0, value});
    ScaState state;
    SolverOptions inner{1e-9, 1};

    for (int it = 1; it <= wo.solver.max_iter && wo.optimize_orientation; ++it)
    {
        const double before = value;
        ScaProblem prob;
        prob.objective = [&](const Pointings &X) { return model.rate(X, alloc.owner); };
        prob.linearize = [&](const Pointings &X, Linearization &o, Linearization &) {
            const auto a = detail::finalize_allocation(model.gains(X), model.budgets(), alloc.owner);
            o.add(a.rate * model.normalization(), model.gradient(X, a));
        };
        sca_ascent(prob, cone, F, value, state, inner);

        auto next = allocate_subcarriers(model.gains(F), model.budgets(), alloc.owner);
        if (next.rate * model.normalization() >= value)
        {
            alloc = std::move(next);
            value = alloc.rate * model.normalization();
        }
        else
            alloc = detail::finalize_allocation(model.gains(F), model.budgets(), alloc.owner);
        res.trace.push_back({it, value});
        if (value - before <= wo.solver.tol * std::max(std::abs(before), 1e-12))
        {
            res.status = SolverStatus::Converged;
            break;
        }
    }
    if (!wo.optimize_orientation)
        res.status = SolverStatus::Converged;
    res.orientations = orientations_from_pointings(F);
    res.beamformers = {alloc.power.cast<cdouble>()};
    res.objective = value;
    res.assignment = alloc.owner;
    return res;
}

} // namespace ra
