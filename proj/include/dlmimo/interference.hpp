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
//
// Normalized inter-cell interference power: the per-antenna average of
// squared large-scale gains from the six neighbor cells,
//   P_int = (1/M) sum_{i=1..6} sum_{m in cell i} gamma_{m}^2.
// For clustered layouts this is (1/L) sum_i sum_l d_{l,i}^{-alpha}, whose
// moments diverge for cell-edge users; divergent quantities are reported as
// running-mean/tail diagnostics, never as a point estimate.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dlmimo/common.hpp"
#include "dlmimo/geometry.hpp"
#include "dlmimo/parallel.hpp"
#include "dlmimo/random.hpp"
#include "dlmimo/stats.hpp"

namespace dlmimo {

struct InterferenceSample {
    double p_int = 0.0;
    LayoutKind layout_kind = LayoutKind::CA;
    PolarPoint user;
};

/// Co-located layout: deterministic in the user position, periodic in theta
/// with period pi/3, increasing in rho.
inline double intercell_power_ca(const PolarPoint& user, double alpha) {
    double s = 0.0;
    for (int i = 1; i < kCellCount; ++i) {
        const double d2 = user.rho * user.rho + 4.0 - 4.0 * user.rho * std::cos(user.theta - cell_center_angle(i));
        s += std::pow(d2, -alpha / 2.0);
    }
    return s;
}

/// Clustered layouts: average d^{-alpha} over all 6L neighbor clusters.
inline double intercell_power_da(const PolarPoint& user, const LayoutRealization& layout, double alpha) {
    const double ux = user.x();
    const double uy = user.y();
    double s = 0.0;
    for (int i = 1; i < kCellCount; ++i) {
        for (const auto& c : layout.clusters[i]) {
            const double dx = c.x() - ux;
            const double dy = c.y() - uy;
            const double d2 = dx * dx + dy * dy;
            if (d2 == 0.0) throw CoincidentPositions{};
            s += std::pow(d2, -alpha / 2.0);
        }
    }
    return s / layout.clusters_per_cell();
}

/// Inter-cell interference covariance in the many-user regime: a scalar
/// multiple of I_N with diagonal P_t * P_int; off-diagonals vanish exactly.
struct IntercellCovariance {
    int dim = 0;
    double diagonal = 0.0; // Q = diagonal * I_dim
};

inline IntercellCovariance intercell_covariance(const PolarPoint& user, const LayoutRealization& layout,
                                                const SystemParams& params) {
    const double p_int = layout.kind == LayoutKind::CA ? intercell_power_ca(user, params.alpha)
                                                       : intercell_power_da(user, layout, params.alpha);
    return {params.user_antennas, params.snr * p_int};
}

/// Monte Carlo diagnostics of E[(P_int)^n] over random cluster placements.
struct MomentDiagnostics {
    double final_mean = 0.0;
    std::vector<std::pair<std::uint64_t, double>> running_mean; // (trials, mean) checkpoints
    double final_decade_drift = 0.0; // |m(T) - m(T/10)| / m(T/10)
    double tail_index = 0.0;         // Hill estimate over the largest draws
    std::uint64_t trials = 0;
    int moment_order = 1;
};

/// Estimates the n-th moment of the clustered-layout interference power at a
/// fixed user position. Cluster placements are redrawn every trial; only the
/// six neighbor cells matter. For cell-center users the running mean
/// converges; at the cell edge the moment is infinite and the trajectory
/// drifts, which is what the diagnostics expose.
inline MomentDiagnostics intercell_moment_mc(const PolarPoint& user, int order, const SystemParams& params,
                                             std::uint64_t trials, std::uint64_t seed, int threads = 0) {
    if (order < 1) throw std::domain_error("moment order must be >= 1");
    if (trials < 10) throw std::invalid_argument("need at least 10 trials");
    const double ux = user.x();
    const double uy = user.y();
    const int L = params.clusters;
    const double alpha = params.alpha;

    double cx[kCellCount], cy[kCellCount];
    for (int i = 1; i < kCellCount; ++i) {
        const PolarPoint c = cell_center(i);
        cx[i] = c.x();
        cy[i] = c.y();
    }

    std::vector<double> values(trials);
    parallel_for(trials, threads, [&](std::uint64_t t) {
        RngStream rng = substream(seed, 0x496e7446ULL, t);
        double sum = 0.0;
        for (int i = 1; i < kCellCount; ++i) {
            for (int l = 0; l < L; ++l) {
                const double th = 2.0 * kPi * uniform01(rng);
                const double r = std::sqrt(uniform01(rng));
                const double dx = cx[i] + r * std::cos(th) - ux;
                const double dy = cy[i] + r * std::sin(th) - uy;
                const double d2 = dx * dx + dy * dy;
                if (d2 == 0.0) { --l; continue; } // probability-zero coincidence: redraw cluster
                sum += std::pow(d2, -alpha / 2.0);
            }
        }
        const double p = sum / L;
        values[t] = order == 1 ? p : std::pow(p, order);
    });

    MomentDiagnostics diag;
    diag.trials = trials;
    diag.moment_order = order;

    // sequential prefix means at ~200 log-spaced checkpoints
    std::vector<std::uint64_t> marks;
    for (double m = 10.0; m < static_cast<double>(trials); m *= 1.06)
        marks.push_back(static_cast<std::uint64_t>(m));
    marks.push_back(trials);
    double sum = 0.0;
    std::size_t next = 0;
    double decade_start_mean = 0.0;
    const std::uint64_t decade_start = trials / 10;
    for (std::uint64_t t = 0; t < trials; ++t) {
        sum += values[t];
        if (t + 1 == decade_start) decade_start_mean = sum / static_cast<double>(t + 1);
        while (next < marks.size() && t + 1 == marks[next]) {
            diag.running_mean.emplace_back(t + 1, sum / static_cast<double>(t + 1));
            ++next;
        }
    }
    diag.final_mean = sum / static_cast<double>(trials);
    diag.final_decade_drift = std::fabs(diag.final_mean - decade_start_mean) / decade_start_mean;
    const std::size_t k = std::max<std::size_t>(20, trials / 1000);
    diag.tail_index = hill_tail_index(values, std::min<std::size_t>(k, trials / 2));
    return diag;
}

} // namespace dlmimo
