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

#include "ra/geometry.hpp"
#include "ra/optimize/common.hpp"

#include <random>
#include <string>
#include <vector>

namespace ra
{

enum class ScheduleStrategy
{
    Fixed,
    DynamicDesigned,
    DynamicRandom
};

inline std::string to_string(ScheduleStrategy s)
{
    switch (s)
    {
    case ScheduleStrategy::Fixed:
        return "fixed";
    case ScheduleStrategy::DynamicDesigned:
        return "dynamic-designed";
    case ScheduleStrategy::DynamicRandom:
        return "dynamic-random";
    }
    return "unknown";
}

struct PilotSchedule
{
    int total_slots = 0;                // T_a
    std::vector<Pointings> blocks;      // F^(m), one pointing per antenna
    ScheduleStrategy strategy = ScheduleStrategy::Fixed;

    int num_blocks() const { return static_cast<int>(blocks.size()); }
    int slots_per_block() const { return total_slots / num_blocks(); }
    std::size_t num_antennas() const { return blocks.empty() ? 0 : blocks.front().size(); }

    void validate(double theta_max) const
    {
        if (blocks.empty())
            throw ConfigurationError("PilotSchedule: at least one block required");
        if (total_slots < 1 || total_slots % num_blocks() != 0)
            throw ConfigurationError("PilotSchedule: T_a must be a positive multiple of M");
        for (const auto &b : blocks)
        {
            if (b.size() != num_antennas())
                throw ConfigurationError("PilotSchedule: every block needs one pointing per antenna");
            for (const auto &f : b)
                if (!is_unit(f) || angle_between(f, e1()) > theta_max + 1e-9)
                    throw ConfigurationError("PilotSchedule: pointing violates the rotation constraint");
        }
    }

    // True when two blocks share exactly the same orientation set.
    bool has_repeated_views() const
    {
        for (std::size_t a = 0; a < blocks.size(); ++a)
            for (std::size_t b = a + 1; b < blocks.size(); ++b)
            {
                bool same = true;
                for (std::size_t n = 0; n < blocks[a].size() && same; ++n)
                    same = (blocks[a][n] - blocks[b][n]).norm() < 1e-12;
                if (same)
                    return true;
            }
        return false;
    }
};

// Spherical Fibonacci points on the cap of half-angle theta_max about `cone.axis`;
// the first point is the pole, so m = 1 gives the cap centre.
inline std::vector<Vec3> fibonacci_cap(int m, const Cone &cone)
{
    if (m < 1)
        throw InvalidParameter("fibonacci_cap: at least one point required");
    const double golden = pi * (3.0 - std::sqrt(5.0));
    const double h = 1.0 - std::cos(cone.theta_max);
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
    {
        const double cz = 1.0 - h * (i == 0 ? 0.0 : (i + 0.5) / m);
        const double z = std::acos(std::clamp(cz, -1.0, 1.0));
        pts.push_back(cone.direction(z, golden * i));
    }
    return pts;
}

// Seeded stream for one Monte Carlo trial.
inline std::mt19937_64 trial_rng(std::uint64_t master, std::uint64_t trial, std::uint64_t stream = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

// Block-wise orientation schedule.
//  fixed:   one block with every antenna at broadside (the M = 1 case)
//  designed: M Fibonacci directions; antenna n in block m uses direction (m + n) mod M
//  random:  independent uniform cap samples per antenna and block
inline PilotSchedule schedule_orientations(const RotationConstraint &constraint, int n_antennas, int m_blocks,
                                           int total_slots, ScheduleStrategy strategy, std::uint64_t seed = 0)
{
    if (m_blocks < 1)
        throw InvalidParameter("schedule_orientations: M must be at least 1");
    if (n_antennas < 1)
        throw InvalidParameter("schedule_orientations: N must be at least 1");
    const Cone cone = Cone::about_x(constraint.theta_max);
    PilotSchedule s;
    s.strategy = strategy;
    s.total_slots = total_slots;
    const auto N = static_cast<std::size_t>(n_antennas);
    switch (strategy)
    {
    case ScheduleStrategy::Fixed:
        s.blocks.push_back(Pointings(N, e1()));
        break;
    case ScheduleStrategy::DynamicDesigned: {
        const auto dirs = fibonacci_cap(m_blocks, cone);
        for (int m = 0; m < m_blocks; ++m)
        {
            Pointings b(N);
            for (std::size_t n = 0; n < N; ++n)
                b[n] = dirs[(static_cast<std::size_t>(m) + n) % dirs.size()];
            s.blocks.push_back(std::move(b));
        }
        break;
    }
    case ScheduleStrategy::DynamicRandom: {
        auto rng = trial_rng(seed, 0, 0x5eed);
        for (int m = 0; m < m_blocks; ++m)
            s.blocks.push_back(random_pointings(rng, N, cone));
        break;
    }
    }
    if (constraint.is_discrete())
    {
        for (auto &b : s.blocks)
            for (auto &f : b)
                f = quantize_orientation(orientation_from_pointing(f), constraint).pointing;
        if (strategy != ScheduleStrategy::Fixed && s.has_repeated_views())
            throw InfeasibleError("schedule_orientations: not enough distinct codewords for M blocks");
    }
    if (total_slots < static_cast<int>(s.blocks.size()) || total_slots % static_cast<int>(s.blocks.size()) != 0)
        throw ConfigurationError("schedule_orientations: T_a must be a positive multiple of M");
    return s;
}

} // namespace ra
