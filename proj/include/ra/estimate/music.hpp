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

#include "ra/estimate/pilots.hpp"

#include <algorithm>
#include <vector>

namespace ra
{

struct MusicResult
{
    std::vector<double> zenith;
    std::vector<double> azimuth;
    RMat spectrum; // zenith index x azimuth index, averaged over blocks
};

// Noise-subspace projector of one block's sample covariance.
inline CMat noise_projector(const CMat &R, int sources)
{
    Eigen::SelfAdjointEigenSolver<CMat> eig(R);
    const auto N = R.rows();
    const CMat En = eig.eigenvectors().leftCols(N - sources);
    return En * En.adjoint();
}

// MUSIC pseudo-spectrum 1 / (b^H En En^H b) with unit-norm b; zero where the
// orientations give no response.
inline double music_value(const CMat &Pn, const CVec &b)
{
    const double n2 = b.squaredNorm();
    if (!(n2 > 1e-24))
        return 0.0;
    const double den = std::max(std::real(b.dot(Pn * b)) / n2, 1e-15);
    return 1.0 / den;
}

inline std::vector<std::pair<int, int>> spectrum_peaks(const RMat &V, int count, int min_separation)
{
    std::vector<std::pair<int, int>> candidates;
    for (int i = 0; i < V.rows(); ++i)
        for (int j = 0; j < V.cols(); ++j)
        {
            bool peak = true;
            for (int di = -1; di <= 1 && peak; ++di)
                for (int dj = -1; dj <= 1 && peak; ++dj)
                {
                    const int a = i + di, b = j + dj;
                    if ((di || dj) && a >= 0 && b >= 0 && a < V.rows() && b < V.cols() && V(a, b) > V(i, j))
                        peak = false;
                }
            if (peak)
                candidates.emplace_back(i, j);
        }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const auto &x, const auto &y) { return V(x.first, x.second) > V(y.first, y.second); });
    std::vector<std::pair<int, int>> picked;
    for (const auto &c : candidates)
    {
        if (static_cast<int>(picked.size()) == count)
            break;
        bool far = true;
        for (const auto &p : picked)
            if (std::max(std::abs(p.first - c.first), std::abs(p.second - c.second)) < min_separation)
                far = false;
        if (far)
            picked.push_back(c);
    }
    return picked;
}

// Block-wise MUSIC: `sources` incoherent arrivals, spectra averaged over blocks.
inline MusicResult music_estimate(const ParametricModel &model, const Measurement &meas, int sources,
                                  const AngleGrid &grid = {}, int min_separation = 3)
{
    grid.validate();
    if (sources < 1)
        throw InvalidParameter("music_estimate: at least one source required");
    const int tb = meas.slots_per_block();
    const auto N = meas.Y.rows();
    if (tb < sources)
        throw SubspaceRankError("music_estimate: " + std::to_string(tb) + " snapshots per block cannot span " +
                                std::to_string(sources) + " sources");
    if (N <= sources)
        throw SubspaceRankError("music_estimate: noise subspace is empty");
    if (meas.schedule.num_blocks() != model.schedule().num_blocks())
        throw ConfigurationError("music_estimate: model and measurement schedules differ");

    const int M = meas.schedule.num_blocks();
    std::vector<CMat> projectors;
    for (int m = 0; m < M; ++m)
    {
        const CMat Yb = meas.block(static_cast<std::size_t>(m));
        projectors.push_back(noise_projector(Yb * Yb.adjoint() / static_cast<double>(tb), sources));
    }

    MusicResult out;
    out.spectrum = RMat::Zero(grid.zenith_count(), grid.azimuth_count());
    for (int i = 0; i < grid.zenith_count(); ++i)
        for (int j = 0; j < grid.azimuth_count(); ++j)
        {
            double v = 0.0;
            for (int m = 0; m < M; ++m)
                v += music_value(projectors[static_cast<std::size_t>(m)],
                                 model.block_response(static_cast<std::size_t>(m), grid.zenith(i), grid.azimuth(j)));
            out.spectrum(i, j) = v / M;
        }
    for (const auto &[i, j] : spectrum_peaks(out.spectrum, sources, min_separation))
    {
        out.zenith.push_back(grid.zenith(i));
        out.azimuth.push_back(grid.azimuth(j));
    }
    return out;
}

} // namespace ra
