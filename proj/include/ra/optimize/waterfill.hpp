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

#include "ra/core.hpp"

#include <algorithm>
#include <numeric>

namespace ra
{

// Powers p_i = [mu - noise/g_i]_+ with sum p_i = budget.
inline RVec waterfill(const RVec &gains, double budget, double noise = 1.0)
{
    if (!(budget >= 0.0) || !(noise > 0.0))
        throw InvalidParameter("waterfill: budget must be non-negative and noise positive");
    const Eigen::Index n = gains.size();
    RVec p = RVec::Zero(n);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if (gains[i] < 0.0 || !std::isfinite(gains[i]))
            throw InvalidParameter("waterfill: gains must be finite and non-negative");
        if (gains[i] > 0.0)
            idx.push_back(i);
    }
    if (idx.empty() || budget == 0.0)
        return p;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return gains[a] > gains[b]; });
    // Largest active set whose water level clears every floor in it.
    double floors = 0.0, mu = 0.0;
    std::size_t active = 0;
    for (std::size_t m = 0; m < idx.size(); ++m)
    {
        const double f = noise / gains[idx[m]];
        const double level = (budget + floors + f) / static_cast<double>(m + 1);
        if (level <= f)
            break;
        floors += f;
        mu = level;
        active = m + 1;
    }
    double used = 0.0;
    for (std::size_t m = 0; m < active; ++m)
    {
        p[idx[m]] = std::max(0.0, mu - noise / gains[idx[m]]);
        used += p[idx[m]];
    }
    if (used > 0.0)
        p *= budget / used; // remove rounding drift
    return p;
}

} // namespace ra
