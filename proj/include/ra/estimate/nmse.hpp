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

#include <vector>

namespace ra
{

// Reconstruction error of estimated parameters over a set of evaluation
// orientation sets: per user sum ||h_hat - h||^2 / sum ||h||^2, averaged over users.
inline double reconstruct_and_nmse(const ParametricModel &model, const std::vector<PathParameters> &estimates,
                                   const std::vector<PathParameters> &truth,
                                   const std::vector<Pointings> &evaluation)
{
    if (estimates.size() != truth.size() || truth.empty())
        throw ConfigurationError("reconstruct_and_nmse: one estimate per user expected");
    if (evaluation.empty())
        throw ConfigurationError("reconstruct_and_nmse: at least one evaluation orientation set required");
    double total = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k)
    {
        double err = 0.0, ref = 0.0;
        for (const auto &F : evaluation)
        {
            const auto o = orientations_from_pointings(F);
            const CVec h = model.channel(o, truth[k]);
            const CVec hh = estimates[k].beta.empty() ? CVec(CVec::Zero(h.size())) : model.channel(o, estimates[k]);
            err += (hh - h).squaredNorm();
            ref += h.squaredNorm();
        }
        if (!(ref > 0.0))
            throw NumericError("reconstruct_and_nmse: NMSE undefined for a zero channel");
        total += err / ref;
    }
    return total / static_cast<double>(truth.size());
}

} // namespace ra
