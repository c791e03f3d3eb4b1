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
// 1-tier hexagonal layout: cell 0 at the origin surrounded by six neighbor
// cells whose centers sit at polar (2, i*pi/3 - pi/6). The inscribed radius
// of each hexagon is normalized to 1; users and antenna clusters live
// uniformly inside each cell's inscribed circle. All distance laws below are
// circle-overlap geometry: the conditional cdf of the distance from a fixed
// point to a uniform point in a unit disk whose center is D away.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dlmimo/common.hpp"
#include "dlmimo/random.hpp"

namespace dlmimo {

inline constexpr int kCellCount = 7;

struct PolarPoint {
    double rho = 0.0;   // radial coordinate, cell inscribed radii
    double theta = 0.0; // radians in [0, 2*pi)

    double x() const { return rho * std::cos(theta); }
    double y() const { return rho * std::sin(theta); }
};

inline PolarPoint polar_from_xy(double x, double y) {
    double th = std::atan2(y, x);
    if (th < 0.0) th += 2.0 * kPi;
    return {std::hypot(x, y), th};
}

inline double distance(const PolarPoint& a, const PolarPoint& b) {
    const double d2 = a.rho * a.rho + b.rho * b.rho - 2.0 * a.rho * b.rho * std::cos(a.theta - b.theta);
    return std::sqrt(std::max(0.0, d2));
}

/// Angle of neighbor cell i's center as seen from the origin.
inline double cell_center_angle(int i) { return i * kPi / 3.0 - kPi / 6.0; }

inline PolarPoint cell_center(int i) {
    if (i < 0 || i >= kCellCount) throw std::domain_error("cell index must be in 0..6");
    if (i == 0) return {0.0, 0.0};
    return {2.0, cell_center_angle(i)};
}

struct CellIndex {
    int i = 0;
    PolarPoint center;
    explicit CellIndex(int idx) : i(idx), center(cell_center(idx)) {}
};

/// One draw of the base-station antenna placement for all seven cells.
struct LayoutRealization {
    LayoutKind kind = LayoutKind::CA;
    int antennas_per_cluster = 1; // N for DA/small cell, M for CA
    std::array<std::vector<PolarPoint>, kCellCount> clusters; // global coordinates

    int clusters_per_cell() const { return static_cast<int>(clusters[0].size()); }
    int antennas_per_cell() const { return clusters_per_cell() * antennas_per_cluster; }
};

/// Uniform point in the unit disk: radius sqrt(u) (radial pdf 2x), angle
/// uniform. The angle is drawn first so radius/angle pairs are reproducible
/// independent of use.
inline PolarPoint sample_user_position(RngStream& rng) {
    const double th = 2.0 * kPi * uniform01(rng);
    const double r = std::sqrt(uniform01(rng));
    return {r, th};
}

inline LayoutRealization sample_layout(LayoutKind kind, const SystemParams& params, RngStream& rng) {
    params.validate();
    LayoutRealization out;
    out.kind = kind;
    if (kind == LayoutKind::CA) {
        out.antennas_per_cluster = params.bs_antennas();
        for (int i = 0; i < kCellCount; ++i) out.clusters[i] = {cell_center(i)};
        return out;
    }
    out.antennas_per_cluster = params.user_antennas;
    for (int i = 0; i < kCellCount; ++i) {
        const PolarPoint c = cell_center(i);
        const double cx = c.x();
        const double cy = c.y();
        auto& cell = out.clusters[i];
        cell.reserve(static_cast<std::size_t>(params.clusters));
        for (int l = 0; l < params.clusters; ++l) {
            const PolarPoint local = sample_user_position(rng);
            cell.push_back(polar_from_xy(cx + local.x(), cy + local.y()));
        }
    }
    return out;
}

namespace detail {

inline double clamped_acos(double v) { return std::acos(std::clamp(v, -1.0, 1.0)); }

/// P(dist <= x) for a uniform point in a unit disk whose center is D from
/// the reference point. Circle-overlap area over pi.
inline double disk_distance_cdf(double x, double D) {
    if (x <= std::max(0.0, D - 1.0)) return 0.0;
    if (x >= D + 1.0) return 1.0;
    if (x <= 1.0 - D) return x * x; // query circle inside the disk
    const double p1 = clamped_acos((x * x + D * D - 1.0) / (2.0 * x * D));
    const double p2 = clamped_acos((D * D + 1.0 - x * x) / (2.0 * D));
    const double area = x * x * p1 + p2 - x * D * std::sin(p1);
    return std::clamp(area / kPi, 0.0, 1.0);
}

inline double disk_distance_pdf(double x, double D) {
    if (x <= std::max(0.0, D - 1.0) || x > D + 1.0) return 0.0;
    if (x <= 1.0 - D) return 2.0 * x;
    return 2.0 * x / kPi * clamped_acos((x * x + D * D - 1.0) / (2.0 * x * D));
}

inline void check_user_radius(double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw std::domain_error("user radial coordinate must be in [0,1]");
}

inline void check_neighbor_index(int i) {
    if (i < 1 || i > 6) throw std::domain_error("neighbor cell index must be in 1..6");
}

} // namespace detail

/// Center distance D from a user at (y, z) to neighbor cell i's center.
inline double neighbor_center_distance(double y, double z, int i) {
    detail::check_user_radius(y);
    detail::check_neighbor_index(i);
    return std::sqrt(y * y + 4.0 - 4.0 * y * std::cos(z - cell_center_angle(i)));
}

/// Conditional cdf of the distance from a user at radius y to one uniform
/// cluster in the user's own cell.
inline double own_cell_distance_cdf(double x, double y) {
    detail::check_user_radius(y);
    return detail::disk_distance_cdf(x, y);
}

/// Density of the own-cell access distance: 2x inside the inscribed circle
/// remainder, arc-weighted on the boundary lens.
inline double own_cell_distance_pdf(double x, double y) {
    detail::check_user_radius(y);
    return detail::disk_distance_pdf(x, y);
}

/// Density of the distance from a user at (y, z) to one uniform cluster in
/// neighbor cell i. Supported on [D-1, D+1].
inline double neighbor_cell_distance_pdf(double x, double y, double z, int i) {
    return detail::disk_distance_pdf(x, neighbor_center_distance(y, z, i));
}

inline double neighbor_cell_distance_cdf(double x, double y, double z, int i) {
    return detail::disk_distance_cdf(x, neighbor_center_distance(y, z, i));
}

/// Order-statistic pdf of the minimum of n_clusters i.i.d. own-cell access
/// distances.
inline double min_access_distance_pdf(double x, double y, int n_clusters) {
    if (n_clusters < 1) throw std::domain_error("need at least one cluster");
    detail::check_user_radius(y);
    const double F = detail::disk_distance_cdf(x, y);
    const double f = detail::disk_distance_pdf(x, y);
    if (n_clusters == 1) return f;
    return n_clusters * std::pow(1.0 - F, n_clusters - 1) * f;
}

inline double min_access_distance_cdf(double x, double y, int n_clusters) {
    if (n_clusters < 1) throw std::domain_error("need at least one cluster");
    detail::check_user_radius(y);
    const double F = detail::disk_distance_cdf(x, y);
    return 1.0 - std::pow(1.0 - F, n_clusters);
}

} // namespace dlmimo
