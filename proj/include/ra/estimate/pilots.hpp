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

#include <random>
#include <vector>

namespace ra
{

// Received pilots: column t of Y is the slot-t snapshot; block m covers slots
// [m T_b, (m+1) T_b). Row k of X holds user k's pilot symbols.
struct Measurement
{
    PilotSchedule schedule;
    CMat Y;
    CMat X;
    double noise_power = 0.0;

    int slots_per_block() const { return schedule.slots_per_block(); }
    std::size_t num_users() const { return static_cast<std::size_t>(X.rows()); }

    CMat block(std::size_t m) const
    {
        const int tb = slots_per_block();
        return Y.middleCols(static_cast<Eigen::Index>(m) * tb, tb);
    }
};

// DFT pilots, orthogonal within every block: x_k(t) = sqrt(P_k) exp(-j 2 pi k t / T_b).
inline CMat dft_pilots(const PilotSchedule &schedule, const std::vector<double> &powers)
{
    const int K = static_cast<int>(powers.size());
    const int tb = schedule.slots_per_block();
    if (tb < K)
        throw ConfigurationError("dft_pilots: T_b = " + std::to_string(tb) + " slots cannot carry " +
                                 std::to_string(K) + " orthogonal pilots");
    CMat X(K, schedule.total_slots);
    for (int k = 0; k < K; ++k)
    {
        if (!(powers[static_cast<std::size_t>(k)] > 0.0))
            throw InvalidParameter("dft_pilots: pilot powers must be positive");
        const double a = std::sqrt(powers[static_cast<std::size_t>(k)]);
        for (int t = 0; t < schedule.total_slots; ++t)
            X(k, t) = a * std::exp(-j_unit * (two_pi * k * (t % tb) / tb));
    }
    return X;
}

template <class Rng> CVec complex_gaussian(Rng &rng, Eigen::Index n, double variance)
{
    std::normal_distribution<double> G(0.0, std::sqrt(variance / 2.0));
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double re = G(rng);
        const double im = G(rng);
        v[i] = cdouble(re, im);
    }
    return v;
}

// block_channels[m] is the N x K channel matrix in force during block m.
template <class Rng>
Measurement simulate_pilots(const PilotSchedule &schedule, const std::vector<CMat> &block_channels,
                            const std::vector<double> &powers, double noise_power, Rng &rng)
{
    if (block_channels.size() != schedule.blocks.size())
        throw ConfigurationError("simulate_pilots: one channel matrix per block expected");
    if (noise_power < 0.0)
        throw InvalidParameter("simulate_pilots: noise power must be non-negative");
    Measurement meas;
    meas.schedule = schedule;
    meas.noise_power = noise_power;
    meas.X = dft_pilots(schedule, powers);
    const auto N = static_cast<Eigen::Index>(schedule.num_antennas());
    meas.Y = CMat::Zero(N, schedule.total_slots);
    const int tb = schedule.slots_per_block();
    for (int t = 0; t < schedule.total_slots; ++t)
    {
        const CMat &H = block_channels[static_cast<std::size_t>(t / tb)];
        if (H.rows() != N || H.cols() != meas.X.rows())
            throw ConfigurationError("simulate_pilots: channel matrix has the wrong shape");
        meas.Y.col(t) = H * meas.X.col(t);
        if (noise_power > 0.0)
            meas.Y.col(t) += complex_gaussian(rng, N, noise_power);
    }
    return meas;
}

inline std::vector<CMat> block_channels(const ParametricModel &model, const std::vector<PathParameters> &users)
{
    const auto N = static_cast<Eigen::Index>(model.layout().size());
    std::vector<CMat> out;
    for (std::size_t m = 0; m < model.schedule().blocks.size(); ++m)
    {
        const auto o = orientations_from_pointings(model.schedule().blocks[m]);
        CMat H(N, static_cast<Eigen::Index>(users.size()));
        for (std::size_t k = 0; k < users.size(); ++k)
            H.col(static_cast<Eigen::Index>(k)) = model.channel(o, users[k]);
        out.push_back(std::move(H));
    }
    return out;
}

inline std::vector<CMat> block_channels(const Scenario &scn, const PilotSchedule &schedule)
{
    std::vector<CMat> out;
    for (const auto &b : schedule.blocks)
    {
        const auto o = orientations_from_pointings(b);
        CMat H(static_cast<Eigen::Index>(scn.num_antennas()), static_cast<Eigen::Index>(scn.num_users()));
        for (std::size_t k = 0; k < scn.num_users(); ++k)
            H.col(static_cast<Eigen::Index>(k)) = total_channel(scn, o, k);
        out.push_back(std::move(H));
    }
    return out;
}

// Pilot correlation of user k: block m of the result is h_k(F^(m)) plus noise
// of variance sigma^2 / (T_b P_k).
inline CVec decorrelate(const Measurement &meas, std::size_t k)
{
    const auto N = meas.Y.rows();
    const int M = meas.schedule.num_blocks();
    const int tb = meas.slots_per_block();
    CVec z(N * M);
    for (int m = 0; m < M; ++m)
    {
        const auto xk = meas.X.row(static_cast<Eigen::Index>(k)).segment(m * tb, tb);
        const CMat Yb = meas.block(static_cast<std::size_t>(m));
        z.segment(m * N, N) = Yb * xk.adjoint() / xk.squaredNorm();
    }
    return z;
}

inline double decorrelated_noise(const Measurement &meas, std::size_t k)
{
    const int tb = meas.slots_per_block();
    return meas.noise_power / meas.X.row(static_cast<Eigen::Index>(k)).segment(0, tb).squaredNorm();
}

} // namespace ra
