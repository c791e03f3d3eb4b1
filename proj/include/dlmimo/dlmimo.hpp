// SPDX-License-Identifier: Apache-2.0
//
// dlmimo - downlink MIMO cellular network simulator comparing co-located,
// distributed and small-cell base-station antenna layouts
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

#include "dlmimo/asymptotics.hpp"
#include "dlmimo/channel.hpp"
#include "dlmimo/common.hpp"
#include "dlmimo/experiments.hpp"
#include "dlmimo/geometry.hpp"
#include "dlmimo/interference.hpp"
#include "dlmimo/parallel.hpp"
#include "dlmimo/precoding.hpp"
#include "dlmimo/quadrature.hpp"
#include "dlmimo/random.hpp"
#include "dlmimo/rate_sim.hpp"
#include "dlmimo/stats.hpp"
