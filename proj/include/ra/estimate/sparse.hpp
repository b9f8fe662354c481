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

#include "ra/estimate/model.hpp"

#include <limits>
#include <vector>

namespace ra
{

// Least-squares coefficients beta = (S^H S)^-1 S^H y; rank-deficient S is an error.
inline CVec ls_coefficients(const CMat &S, const CVec &y)
{
    if (S.rows() != y.size())
        throw ConfigurationError("ls_coefficients: observation matrix and data sizes differ");
    if (S.cols() == 0)
        throw InvalidParameter("ls_coefficients: empty observation matrix");
    Eigen::ColPivHouseholderQR<CMat> qr(S);
    qr.setThreshold(1e-10);
    if (qr.rank() < S.cols())
        throw IllConditioned("ls_coefficients: observation matrix is rank deficient");
    return qr.solve(y);
}

struct OmpResult
{
    std::vector<Eigen::Index> support;
    CVec coefficients;
    std::vector<double> residual_norms; // after each selection, starting with ||y||
};

// Orthogonal matching pursuit on unit-norm dictionary columns; stops after s
// atoms or once ||r||^2 <= epsilon.
inline OmpResult omp_recover(const CVec &y, const CMat &Phi, int s, double epsilon = 0.0)
{
    if (Phi.rows() != y.size())
        throw ConfigurationError("omp_recover: dictionary and data sizes differ");
    if (s < 1 || s > Phi.rows() || s > Phi.cols())
        throw InvalidParameter("omp_recover: invalid sparsity " + std::to_string(s));
    for (Eigen::Index c = 0; c < Phi.cols(); ++c)
        if (std::abs(Phi.col(c).norm() - 1.0) > 1e-9)
            throw InvalidParameter("omp_recover: dictionary columns must have unit norm");

    OmpResult out;
    CVec r = y;
    out.residual_norms.push_back(r.norm());
    std::vector<char> used(static_cast<std::size_t>(Phi.cols()), 0);
    while (static_cast<int>(out.support.size()) < s && r.squaredNorm() > epsilon)
    {
        const RVec corr = (Phi.adjoint() * r).cwiseAbs();
        Eigen::Index best = -1;
        double best_val = -1.0;
        for (Eigen::Index c = 0; c < corr.size(); ++c)
            if (!used[static_cast<std::size_t>(c)] && corr[c] > best_val)
            {
                best_val = corr[c];
                best = c;
            }
        if (best < 0)
            break;
        used[static_cast<std::size_t>(best)] = 1;
        out.support.push_back(best);
        CMat A(Phi.rows(), static_cast<Eigen::Index>(out.support.size()));
        for (std::size_t i = 0; i < out.support.size(); ++i)
            A.col(static_cast<Eigen::Index>(i)) = Phi.col(out.support[i]);
        out.coefficients = A.colPivHouseholderQr().solve(y);
        r = y - A * out.coefficients;
        out.residual_norms.push_back(r.norm());
    }
    if (out.support.empty())
        out.coefficients = CVec();
    return out;
}

// Angular dictionary: column i is the unit-normalized stacked response of
// grid point i; points with zero response are dropped.
struct AngleDictionary
{
    CMat Phi;
    std::vector<double> zenith;
    std::vector<double> azimuth;
    std::vector<double> norms;
};

inline AngleDictionary build_dictionary(const ParametricModel &model, const AngleGrid &grid)
{
    grid.validate();
    AngleDictionary d;
    std::vector<CVec> cols;
    for (int i = 0; i < grid.zenith_count(); ++i)
        for (int j = 0; j < grid.azimuth_count(); ++j)
        {
            CVec b = model.stacked(grid.zenith(i), grid.azimuth(j));
            const double n = b.norm();
            if (!(n > 1e-12))
                continue;
            cols.push_back(b / n);
            d.zenith.push_back(grid.zenith(i));
            d.azimuth.push_back(grid.azimuth(j));
            d.norms.push_back(n);
        }
    d.Phi.resize(model.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        d.Phi.col(static_cast<Eigen::Index>(c)) = cols[c];
    return d;
}

// OMP angle estimates followed by least-squares coefficients on the stacked model.
inline PathParameters omp_estimate(const ParametricModel &model, const AngleDictionary &dict, const CVec &z,
                                   int paths, double epsilon = 0.0)
{
    const auto res = omp_recover(z, dict.Phi, paths, epsilon);
    PathParameters p;
    for (auto c : res.support)
    {
        p.zenith.push_back(dict.zenith[static_cast<std::size_t>(c)]);
        p.azimuth.push_back(dict.azimuth[static_cast<std::size_t>(c)]);
    }
    const CVec beta = ls_coefficients(model.stacked_matrix(p.zenith, p.azimuth), z);
    p.beta.assign(beta.data(), beta.data() + beta.size());
    return p;
}

} // namespace ra
