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
#include "ra/radiation.hpp"

#include "ra/optimize/common.hpp"
#include "ra/optimize/isac.hpp"
#include "ra/optimize/mimo.hpp"
#include "ra/optimize/miso.hpp"
#include "ra/optimize/multiuser.hpp"
#include "ra/optimize/waterfill.hpp"
#include "ra/optimize/wideband.hpp"

#include "ra/estimate/beam_training.hpp"
#include "ra/estimate/ml.hpp"
#include "ra/estimate/model.hpp"
#include "ra/estimate/music.hpp"
#include "ra/estimate/nmse.hpp"
#include "ra/estimate/pilots.hpp"
#include "ra/estimate/schedule.hpp"
#include "ra/estimate/sparse.hpp"

#include "ra/harness/config.hpp"
#include "ra/harness/experiments.hpp"
#include "ra/harness/params.hpp"
#include "ra/harness/results.hpp"
