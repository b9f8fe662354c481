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

#include <functional>
#include <vector>

namespace ra
{

struct OrientationCodebook
{
    std::vector<Pointings> codewords;
    std::vector<int> sector; // sector index per codeword
};

struct BeamCodebook
{
    CMat W;                  // one unit-norm beam per column
    std::vector<int> group;  // group index per beam
};

enum class BeamSearch
{
    Exhaustive,
    Hierarchical
};

struct BeamTrainingResult
{
    std::size_t orientation = 0;
    Eigen::Index beam = 0;
    double power = 0.0;
    int probes = 0;
};

using ChannelOracle = std::function<CVec(const Pointings &)>;

// Codewords point every antenna along one Fibonacci direction of the cap;
// sectors split the cap into `sectors` equal azimuth wedges about the axis.
inline OrientationCodebook fibonacci_orientation_codebook(int codewords, int sectors, const Cone &cone,
                                                          std::size_t antennas)
{
    if (codewords < 1 || sectors < 1)
        throw ConfigurationError("fibonacci_orientation_codebook: codebook sizes must be positive");
    OrientationCodebook cb;
    for (const auto &d : fibonacci_cap(codewords, cone))
    {
        cb.codewords.push_back(Pointings(antennas, d));
        const double phi = wrap_two_pi(cone.zenith_azimuth(d).second);
        cb.sector.push_back(std::min(sectors - 1, static_cast<int>(phi / (two_pi / sectors))));
    }
    return cb;
}

// Orthogonal DFT beams of a half-wavelength-equivalent planar grid; the four
// groups are the sign quadrants of the beam direction.
inline BeamCodebook dft_beam_codebook(const ArrayLayout &layout, double wavelength)
{
    if (layout.ny < 1 || layout.nz < 1 || layout.size() != static_cast<std::size_t>(layout.ny) * layout.nz)
        throw ConfigurationError("dft_beam_codebook: a ULA or UPA layout is required");
    const double scale = wavelength / (2.0 * layout.spacing);
    const int ny = layout.ny, nz = layout.nz;
    BeamCodebook cb;
    cb.W.resize(static_cast<Eigen::Index>(layout.size()), ny * nz);
    int c = 0;
    for (int i = 0; i < ny; ++i)
        for (int j = 0; j < nz; ++j, ++c)
        {
            const double uy = scale * (2.0 * i + 1.0 - ny) / ny;
            const double uz = scale * (2.0 * j + 1.0 - nz) / nz;
            const Vec3 u(0.0, uy, uz);
            for (std::size_t n = 0; n < layout.size(); ++n)
                cb.W(static_cast<Eigen::Index>(n), c) =
                    std::exp(-j_unit * (two_pi / wavelength * (layout.positions[n] - layout.center).dot(u))) /
                    std::sqrt(static_cast<double>(layout.size()));
            cb.group.push_back((uy > 0.0 ? 1 : 0) + (uz > 0.0 ? 2 : 0));
        }
    return cb;
}

inline double probe_power(const CVec &w, const CVec &h) { return std::norm((w.transpose() * h).value()); }

// Coarse stage: one representative codeword per sector against one merged beam
// per group. Fine stage: every pair inside the best sector and group.
inline BeamTrainingResult beam_train(const ChannelOracle &oracle, const OrientationCodebook &orient,
                                     const BeamCodebook &beams, BeamSearch search)
{
    if (orient.codewords.empty() || beams.W.cols() == 0)
        throw ConfigurationError("beam_train: empty codebook");
    if (orient.sector.size() != orient.codewords.size() ||
        beams.group.size() != static_cast<std::size_t>(beams.W.cols()))
        throw ConfigurationError("beam_train: codebook labels do not match the codewords");

    BeamTrainingResult best;
    best.power = -1.0;
    auto scan = [&](std::size_t f, const std::vector<Eigen::Index> &cols) {
        const CVec h = oracle(orient.codewords[f]);
        for (auto c : cols)
        {
            const double p = probe_power(beams.W.col(c), h);
            ++best.probes;
            if (p > best.power)
            {
                best.power = p;
                best.orientation = f;
                best.beam = c;
            }
        }
    };
    std::vector<Eigen::Index> all_beams(static_cast<std::size_t>(beams.W.cols()));
    for (Eigen::Index c = 0; c < beams.W.cols(); ++c)
        all_beams[static_cast<std::size_t>(c)] = c;

    if (search == BeamSearch::Exhaustive)
    {
        for (std::size_t f = 0; f < orient.codewords.size(); ++f)
            scan(f, all_beams);
        return best;
    }

    const int S = *std::max_element(orient.sector.begin(), orient.sector.end()) + 1;
    const int G = *std::max_element(beams.group.begin(), beams.group.end()) + 1;
    int probes = 0;
    double coarse_best = -1.0;
    int best_s = 0, best_g = 0;
    for (int s = 0; s < S; ++s)
    {
        std::vector<std::size_t> members;
        Vec3 mean = Vec3::Zero();
        for (std::size_t f = 0; f < orient.codewords.size(); ++f)
            if (orient.sector[f] == s)
            {
                members.push_back(f);
                mean += orient.codewords[f].front();
            }
        if (members.empty())
            continue;
        std::size_t rep = members.front();
        for (auto f : members)
            if (orient.codewords[f].front().dot(mean) > orient.codewords[rep].front().dot(mean))
                rep = f;
        const CVec h = oracle(orient.codewords[rep]);
        for (int g = 0; g < G; ++g)
        {
            CVec wide = CVec::Zero(beams.W.rows());
            for (Eigen::Index c = 0; c < beams.W.cols(); ++c)
                if (beams.group[static_cast<std::size_t>(c)] == g)
                    wide += beams.W.col(c);
            if (!(wide.norm() > 0.0))
                continue;
            const double p = probe_power(wide / wide.norm(), h);
            ++probes;
            if (p > coarse_best)
            {
                coarse_best = p;
                best_s = s;
                best_g = g;
            }
        }
    }
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < beams.W.cols(); ++c)
        if (beams.group[static_cast<std::size_t>(c)] == best_g)
            cols.push_back(c);
    for (std::size_t f = 0; f < orient.codewords.size(); ++f)
        if (orient.sector[f] == best_s)
            scan(f, cols);
    best.probes += probes;
    return best;
}

} // namespace ra
