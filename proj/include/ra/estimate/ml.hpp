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

#include "ra/estimate/sparse.hpp"

#include <limits>
#include <vector>

namespace ra
{

struct MlOptions
{
    AngleGrid grid{};
    int max_iter = 200;
    double tol = 1e-13;          // relative residual decrease that ends the alternation
    double angle_tol = 1e-11;    // golden-section bracket width (rad)
    double condition_limit = 1e8;
};

enum class EstimateStatus
{
    Ok,
    IllConditioned
};

struct MlResult
{
    PathParameters params;
    std::vector<double> residuals; // ||z - S(eta) beta||^2 after each pass
    int iterations = 0;
    EstimateStatus status = EstimateStatus::Ok;
};

namespace detail
{

inline double concentrated_residual(const ParametricModel &model, const CVec &z, const std::vector<double> &zen,
                                    const std::vector<double> &az, CVec *beta = nullptr)
{
    const CMat S = model.stacked_matrix(zen, az);
    const CVec b = S.colPivHouseholderQr().solve(z);
    if (beta)
        *beta = b;
    return (z - S * b).squaredNorm();
}

// Golden-section minimisation of f on [lo, hi]; returns the abscissa.
template <class F> double golden_section(F &&f, double lo, double hi, double tol)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

} // namespace detail

// Maximum-likelihood estimate of `paths` angle pairs and coefficients from the
// stacked pilot correlation z. Angles start from a greedy grid search; passes
// then alternate a least-squares coefficient step with per-path, per-coordinate
// golden-section refinement of the concentrated residual. The residual never increases.
inline MlResult ml_estimate(const ParametricModel &model, const AngleDictionary &dict, const CVec &z, int paths,
                            const MlOptions &opt = {})
{
    if (paths < 1)
        throw InvalidParameter("ml_estimate: at least one path required");
    if (z.size() != model.rows())
        throw ConfigurationError("ml_estimate: data length does not match the schedule");
    if (paths > model.rows())
        throw InvalidParameter("ml_estimate: more paths than observations");
    if (dict.Phi.rows() != model.rows())
        throw ConfigurationError("ml_estimate: dictionary does not match the schedule");
    if (dict.Phi.cols() == 0)
        throw InvalidParameter("ml_estimate: search grid has no visible direction");

    MlResult out;
    std::vector<double> zen, az;
    CVec r = z;
    for (int p = 0; p < paths; ++p)
    {
        const RVec corr = (dict.Phi.adjoint() * r).cwiseAbs();
        Eigen::Index best;
        corr.maxCoeff(&best);
        zen.push_back(dict.zenith[static_cast<std::size_t>(best)]);
        az.push_back(dict.azimuth[static_cast<std::size_t>(best)]);
        CVec beta;
        detail::concentrated_residual(model, z, zen, az, &beta);
        r = z - model.stacked_matrix(zen, az) * beta;
    }

    CMat S = model.stacked_matrix(zen, az);
    auto residual = [&](const CMat &A) {
        Eigen::ColPivHouseholderQR<CMat> qr(A);
        return (z - A * qr.solve(z)).squaredNorm();
    };
    double value = residual(S);
    out.residuals.push_back(value);
    std::vector<double> bracket(static_cast<std::size_t>(2 * paths), opt.grid.step);
    for (int it = 0; it < opt.max_iter; ++it)
    {
        const double before = value;
        double largest_move = 0.0;
        for (int q = 0; q < paths; ++q)
            for (int coord = 0; coord < 2; ++coord)
            {
                const auto qi = static_cast<std::size_t>(q);
                auto &x = coord == 0 ? zen[qi] : az[qi];
                const double x0 = x;
                const CVec col0 = S.col(q);
                auto f = [&](double v) {
                    S.col(q) = coord == 0 ? model.stacked(v, az[qi]) : model.stacked(zen[qi], v);
                    return residual(S);
                };
                double &h = bracket[2 * qi + static_cast<std::size_t>(coord)];
                double lo = x0 - h, hi = x0 + h;
                if (coord == 0)
                {
                    lo = std::max(lo, 0.0);
                    hi = std::min(hi, pi);
                }
                const double cand = detail::golden_section(f, lo, hi, opt.angle_tol);
                const double fc = f(cand);
                if (fc < value)
                {
                    x = cand;
                    value = fc;
                    largest_move = std::max(largest_move, std::abs(cand - x0));
                    h = std::clamp(4.0 * std::abs(cand - x0), 100.0 * opt.angle_tol, opt.grid.step);
                }
                else
                {
                    S.col(q) = col0;
                    h = std::max(100.0 * opt.angle_tol, 0.5 * h);
                }
            }
        out.residuals.push_back(value);
        out.iterations = it + 1;
        if (before - value <= opt.tol * std::max(before, std::numeric_limits<double>::min()) ||
            largest_move <= opt.angle_tol)
            break;
    }

    CVec beta;
    detail::concentrated_residual(model, z, zen, az, &beta);
    out.params.zenith = zen;
    out.params.azimuth = az;
    out.params.beta.assign(beta.data(), beta.data() + beta.size());

    S = model.stacked_matrix(zen, az);
    Eigen::JacobiSVD<CMat> svd(S);
    const RVec sv = svd.singularValues();
    const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
    if (model.schedule().has_repeated_views() || cond > opt.condition_limit)
        out.status = EstimateStatus::IllConditioned;
    return out;
}

inline MlResult ml_estimate(const ParametricModel &model, const CVec &z, int paths, const MlOptions &opt = {})
{
    return ml_estimate(model, build_dictionary(model, opt.grid), z, paths, opt);
}

} // namespace ra
