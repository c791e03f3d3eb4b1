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
// Channel composition: large-scale gain gamma_m = d^{-alpha/2} per BS
// antenna, i.i.d. CN(0,1) small-scale fading H, composite G = Gamma o H and
// its normalized form G~ = B o H with beta = gamma/||gamma|| over the serving
// cell's antennas. The large-scale matrix has identical rows, so only the row
// vector is stored and the Hadamard product becomes a column scaling.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "dlmimo/common.hpp"
#include "dlmimo/geometry.hpp"
#include "dlmimo/random.hpp"

namespace dlmimo {

/// One composite channel draw between a user and its serving cell's antennas.
struct ChannelRealization {
    Eigen::VectorXd gamma;    // large-scale gains, length M, cluster-major
    Eigen::VectorXd beta;     // gamma / ||gamma||
    Eigen::MatrixXcd H;       // N x M small-scale fading
    Eigen::MatrixXcd G;       // gamma-scaled columns of H
    Eigen::MatrixXcd G_tilde; // beta-scaled columns of H
    double gamma_norm_sq = 0.0;
    int antennas_per_cluster = 1; // column-block width sharing one gamma
};

/// Path gain ||r_B - r_U||^{-alpha/2}. Throws CoincidentPositions at zero
/// distance; the caller must redraw (clamping would break the unbounded
/// path-loss model the interference tails depend on).
inline double large_scale_fading(const PolarPoint& user, const PolarPoint& antenna, double alpha) {
    const double d = distance(user, antenna);
    if (d == 0.0) throw CoincidentPositions{};
    return std::pow(d, -alpha / 2.0);
}

/// Per-cell large-scale gains for the co-located layout: entry i applies to
/// every antenna of cell i.
inline std::array<double, kCellCount> ca_large_scale_vector(const PolarPoint& user, double alpha) {
    std::array<double, kCellCount> g{};
    if (user.rho == 0.0) throw CoincidentPositions{};
    g[0] = std::pow(user.rho, -alpha / 2.0);
    for (int i = 1; i < kCellCount; ++i) {
        const double d2 = user.rho * user.rho + 4.0 - 4.0 * user.rho * std::cos(user.theta - cell_center_angle(i));
        g[i] = std::pow(d2, -alpha / 4.0);
    }
    return g;
}

/// N x M matrix of i.i.d. CN(0,1) entries, filled column-major.
inline Eigen::MatrixXcd sample_small_scale(int n, int m, RngStream& rng) {
    Eigen::MatrixXcd h(n, m);
    for (int c = 0; c < m; ++c)
        for (int r = 0; r < n; ++r) h(r, c) = complex_gaussian(rng);
    return h;
}

/// Distances from a user in cell 0 to each of its own cell's clusters.
inline std::vector<double> own_cluster_distances(const LayoutRealization& layout, const PolarPoint& user) {
    std::vector<double> d;
    d.reserve(layout.clusters[0].size());
    for (const auto& c : layout.clusters[0]) d.push_back(distance(user, c));
    return d;
}

/// Composes gamma/beta/H/G/G~ for a user in cell 0. For the CA layout all
/// beta entries are 1/sqrt(M); for clustered layouts gamma is constant within
/// a cluster (cluster-major, antenna-within-cluster ordering).
inline ChannelRealization compose_channel(const LayoutRealization& layout, const PolarPoint& user,
                                          const SystemParams& params, RngStream& rng) {
    ChannelRealization chan;
    const int n = params.user_antennas;
    const int per = layout.antennas_per_cluster;
    const int m = layout.antennas_per_cell();

    chan.antennas_per_cluster = per;
    chan.gamma.resize(m);
    if (layout.kind == LayoutKind::CA) {
        const double g = large_scale_fading(user, layout.clusters[0][0], params.alpha);
        chan.gamma.setConstant(g);
    } else {
        const auto dist = own_cluster_distances(layout, user);
        for (std::size_t l = 0; l < dist.size(); ++l) {
            if (dist[l] == 0.0) throw CoincidentPositions{};
            const double g = std::pow(dist[l], -params.alpha / 2.0);
            chan.gamma.segment(static_cast<Eigen::Index>(l) * per, per).setConstant(g);
        }
    }
    chan.gamma_norm_sq = chan.gamma.squaredNorm();
    chan.beta = chan.gamma / std::sqrt(chan.gamma_norm_sq);
    chan.H = sample_small_scale(n, m, rng);
    chan.G = chan.H * chan.gamma.asDiagonal();
    chan.G_tilde = chan.H * chan.beta.asDiagonal();
    return chan;
}

} // namespace dlmimo
