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
// Monte Carlo ergodic-rate engine. Nested averaging: user positions outer,
// antenna layouts next (clustered layouts only), small-scale fading inner.
// Every outer draw works from its own hash-derived substream and lands in a
// per-index slot, so estimates are bit-identical for any thread count.
// Confidence intervals come from the outer-draw spread; inner channel noise
// folds into it.

#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <optional>
#include <vector>

#include "dlmimo/channel.hpp"
#include "dlmimo/interference.hpp"
#include "dlmimo/parallel.hpp"
#include "dlmimo/precoding.hpp"
#include "dlmimo/stats.hpp"

namespace dlmimo {

struct MonteCarloPlan {
    std::uint64_t positions = 100;
    std::uint64_t layouts = 100;  // ignored for CA
    std::uint64_t channels = 200;
    int threads = 0;
};

namespace detail {

inline Eigen::VectorXd squared_singular_values(const Eigen::MatrixXcd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    return svd.singularValues().array().square();
}

/// Normalized large-scale row for a user in cell 0 plus ||gamma||^2.
struct LargeScale {
    Eigen::VectorXd beta;
    double gamma_norm_sq = 0.0;
};

inline LargeScale large_scale_for(const LayoutRealization& layout, const PolarPoint& user,
                                  const SystemParams& params) {
    LargeScale ls;
    const int per = layout.antennas_per_cluster;
    const int m = layout.antennas_per_cell();
    Eigen::VectorXd gamma(m);
    if (layout.kind == LayoutKind::CA) {
        gamma.setConstant(large_scale_fading(user, layout.clusters[0][0], params.alpha));
    } else {
        const auto& cl = layout.clusters[0];
        for (std::size_t l = 0; l < cl.size(); ++l) {
            const double d = distance(user, cl[l]);
            if (d == 0.0) throw CoincidentPositions{};
            gamma.segment(static_cast<Eigen::Index>(l) * per, per).setConstant(std::pow(d, -params.alpha / 2.0));
        }
    }
    ls.gamma_norm_sq = gamma.squaredNorm();
    ls.beta = gamma / std::sqrt(ls.gamma_norm_sq);
    return ls;
}

inline void fill_small_scale(Eigen::MatrixXcd& h, RngStream& rng) {
    for (Eigen::Index c = 0; c < h.cols(); ++c)
        for (Eigen::Index r = 0; r < h.rows(); ++r) h(r, c) = complex_gaussian(rng);
}

} // namespace detail

/// Per-realization single-user rate: SVD transmission with water-filling,
/// interference-free (single-user regime).
inline double su_realization_rate(const ChannelRealization& chan, const SystemParams& params) {
    const Eigen::VectorXd eigs = detail::squared_singular_values(chan.G_tilde);
    const double budget = params.per_user_power() * chan.gamma_norm_sq;
    const auto wf = waterfill(eigs, budget, 1.0);
    return precode_rate(eigs, wf.powers, 1.0, params.user_antennas);
}

/// Rate chain on one realization: optimal water-filling >= equal power per
/// subchannel >= transmitting to the nearest cluster alone.
struct SuRateBreakdown {
    double waterfilled = 0.0;
    double equal_power = 0.0;
    double nearest_cluster = 0.0;
};

inline SuRateBreakdown su_rate_breakdown(const ChannelRealization& chan, const SystemParams& params) {
    SuRateBreakdown out;
    const int n = params.user_antennas;
    const double budget = params.per_user_power() * chan.gamma_norm_sq;
    const Eigen::VectorXd eigs = detail::squared_singular_values(chan.G_tilde);
    const auto wf = waterfill(eigs, budget, 1.0);
    out.waterfilled = precode_rate(eigs, wf.powers, 1.0, n);
    out.equal_power = precode_rate(eigs, Eigen::VectorXd::Constant(eigs.size(), budget / n), 1.0, n);

    // strongest cluster by large-scale gain; its antennas form one column block
    const Eigen::Index block = chan.antennas_per_cluster;
    Eigen::Index best = 0;
    chan.gamma.maxCoeff(&best);
    const Eigen::Index cluster = best / block;
    const double gain2 = chan.gamma[cluster * block] * chan.gamma[cluster * block]; // d^{-alpha}
    const Eigen::MatrixXcd h1 = chan.H.middleCols(cluster * block, block);
    const Eigen::VectorXd heigs = detail::squared_singular_values(h1);
    const double scale = params.per_user_power() * gain2 / n;
    double r = 0.0;
    for (Eigen::Index i = 0; i < heigs.size(); ++i) r += log2_one_plus(scale * heigs[i]);
    out.nearest_cluster = r / n;
    return out;
}

/// Single-user per-antenna ergodic capacity at a fixed position and layout,
/// averaged over `trials` small-scale draws.
inline RateEstimate single_user_capacity(const PolarPoint& user, const LayoutRealization& layout,
                                         const SystemParams& params, std::uint64_t trials, RngStream& rng) {
    const auto ls = detail::large_scale_for(layout, user, params);
    const double budget = params.per_user_power() * ls.gamma_norm_sq;
    const int n = params.user_antennas;
    const int m = layout.antennas_per_cell();
    Eigen::MatrixXcd h(n, m), gt(n, m);
    RunningStat stat;
    for (std::uint64_t t = 0; t < trials; ++t) {
        detail::fill_small_scale(h, rng);
        gt.noalias() = h * ls.beta.asDiagonal();
        const Eigen::VectorXd eigs = detail::squared_singular_values(gt);
        const auto wf = waterfill(eigs, budget, 1.0);
        stat.push(precode_rate(eigs, wf.powers, 1.0, n));
    }
    RateEstimate est;
    est.mean = stat.mean();
    est.half_width = stat.half_width95();
    est.outer_std = stat.stddev();
    est.trials = {1, 1, trials};
    est.layout = layout.kind;
    est.params = params;
    return est;
}

/// Per-antenna rate of one user under block diagonalization. The co-cell
/// users' channels are drawn once (they fix the null-space projector); the
/// target's small-scale fading is redrawn every trial, matching the
/// conditional ergodic-rate definition. Inter-cell interference enters as a
/// deterministic power through the SINR denominator; `intercell_override`
/// substitutes the layout-derived value (0 isolates a single cell).
inline RateEstimate bd_per_antenna_rate(std::size_t user_index, const std::vector<PolarPoint>& users,
                                        const LayoutRealization& layout, const SystemParams& params,
                                        std::uint64_t trials, RngStream& rng,
                                        std::optional<double> intercell_override = {}) {
    const int k = static_cast<int>(users.size());
    const int n = params.user_antennas;
    const int m = layout.antennas_per_cell();
    if (m < k * n)
        throw InfeasibleConfiguration("bd rate: M below K*N");
    if (user_index >= users.size()) throw std::out_of_range("bd rate: user index");

    const auto target = detail::large_scale_for(layout, users[user_index], params);
    const double budget = params.per_user_power() * target.gamma_norm_sq;
    const double p_int = intercell_override
                             ? *intercell_override
                             : (layout.kind == LayoutKind::CA
                                    ? intercell_power_ca(users[user_index], params.alpha)
                                    : intercell_power_da(users[user_index], layout, params.alpha));
    const double noise_eff = 1.0 + params.snr * p_int;

    // co-cell users' stacked normalized channels -> row-space basis Q
    const int rows = (k - 1) * n;
    Eigen::MatrixXcd q; // m x rows
    if (rows > 0) {
        Eigen::MatrixXcd stacked(rows, m);
        Eigen::MatrixXcd hj(n, m);
        Eigen::Index row = 0;
        for (int j = 0; j < k; ++j) {
            if (static_cast<std::size_t>(j) == user_index) continue;
            const auto ls = detail::large_scale_for(layout, users[static_cast<std::size_t>(j)], params);
            detail::fill_small_scale(hj, rng);
            stacked.middleRows(row, n).noalias() = hj * ls.beta.asDiagonal();
            row += n;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(stacked.adjoint());
        if (qr.rank() < rows) throw RankDeficient(static_cast<int>(qr.rank()), rows);
        q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, rows);
    }

    Eigen::MatrixXcd h(n, m), gt(n, m);
    RunningStat stat;
    for (std::uint64_t t = 0; t < trials; ++t) {
        detail::fill_small_scale(h, rng);
        gt.noalias() = h * target.beta.asDiagonal();
        if (rows > 0) gt.noalias() -= (gt * q) * q.adjoint(); // project onto null(X)
        const Eigen::VectorXd eigs = detail::squared_singular_values(gt);
        const auto wf = waterfill(eigs, budget, 1.0);
        stat.push(precode_rate(eigs, wf.powers, noise_eff, n));
    }
    RateEstimate est;
    est.mean = stat.mean();
    est.half_width = stat.half_width95();
    est.outer_std = stat.stddev();
    est.trials = {1, 1, trials};
    est.layout = layout.kind;
    est.params = params;
    return est;
}

/// Greedy nearest-available-BS assignment in user index order; ties resolve
/// to the lowest cluster index. Returns per-user cluster indices in cell 0.
inline std::vector<int> assign_users_to_cells(const std::vector<PolarPoint>& users,
                                              const LayoutRealization& layout) {
    const auto& bs = layout.clusters[0];
    if (users.size() > bs.size())
        throw InfeasibleConfiguration("small cells: more users than base stations");
    std::vector<bool> used(bs.size(), false);
    std::vector<int> assignment(users.size(), -1);
    for (std::size_t u = 0; u < users.size(); ++u) {
        int best = -1;
        double best_d = 0.0;
        for (std::size_t b = 0; b < bs.size(); ++b) {
            if (used[b]) continue;
            const double d = distance(users[u], bs[b]);
            if (best < 0 || d < best_d) {
                best = static_cast<int>(b);
                best_d = d;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        assignment[u] = best;
    }
    return assignment;
}

/// Per-antenna rate of a small-cell user: served by its assigned BS (N
/// antennas, power P_t/K), interfered by every other active BS. Own-cell
/// co-channel BSs enter through their actual distances; each neighbor cell
/// contributes K serving BSs drawn uniformly in its disk.
inline RateEstimate small_cell_rate(std::size_t user_index, const std::vector<int>& assignment,
                                    const std::vector<PolarPoint>& users, const LayoutRealization& layout,
                                    const SystemParams& params, std::uint64_t trials, RngStream& rng) {
    if (layout.kind == LayoutKind::CA)
        throw InfeasibleConfiguration("small_cell_rate: needs a clustered layout");
    const int n = params.user_antennas;
    const int k = static_cast<int>(users.size());
    const PolarPoint& me = users[user_index];
    const auto& bs = layout.clusters[0];

    const double d_serve = distance(me, bs[static_cast<std::size_t>(assignment[user_index])]);
    if (d_serve == 0.0) throw CoincidentPositions{};

    double interference = 0.0;
    for (std::size_t j = 0; j < users.size(); ++j) {
        if (j == user_index) continue;
        const double d = distance(me, bs[static_cast<std::size_t>(assignment[j])]);
        if (d == 0.0) throw CoincidentPositions{};
        interference += std::pow(d, -params.alpha);
    }
    const double ux = me.x();
    const double uy = me.y();
    for (int i = 1; i < kCellCount; ++i) {
        const PolarPoint c = cell_center(i);
        const double cx = c.x();
        const double cy = c.y();
        for (int j = 0; j < k; ++j) {
            const PolarPoint local = sample_user_position(rng);
            const double dx = cx + local.x() - ux;
            const double dy = cy + local.y() - uy;
            interference += std::pow(dx * dx + dy * dy, -params.alpha / 2.0);
        }
    }
    const double noise_eff = 1.0 + params.per_user_power() * interference;
    const double budget = params.per_user_power() * n * std::pow(d_serve, -params.alpha);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    Eigen::MatrixXcd h(n, n);
    RunningStat stat;
    for (std::uint64_t t = 0; t < trials; ++t) {
        detail::fill_small_scale(h, rng);
        const Eigen::VectorXd eigs = detail::squared_singular_values(h * inv_sqrt_n);
        const auto wf = waterfill(eigs, budget, 1.0);
        stat.push(precode_rate(eigs, wf.powers, noise_eff, n));
    }
    RateEstimate est;
    est.mean = stat.mean();
    est.half_width = stat.half_width95();
    est.outer_std = stat.stddev();
    est.trials = {1, 1, trials};
    est.layout = LayoutKind::SmallCell;
    est.params = params;
    return est;
}

namespace detail {

/// Shared nested-outer-loop driver. `fixed_target` pins the target user's
/// position (other users and layouts still vary).
inline RateEstimate average_rate_impl(LayoutKind kind, const SystemParams& params, const MonteCarloPlan& plan,
                                      std::uint64_t seed, std::optional<PolarPoint> fixed_target) {
    params.validate();
    if (plan.positions == 0 || plan.channels == 0) throw std::invalid_argument("draw counts must be >= 1");
    const std::uint64_t layouts = kind == LayoutKind::CA ? 1 : std::max<std::uint64_t>(1, plan.layouts);
    const std::uint64_t outer = plan.positions * layouts;
    const int k = params.users;

    std::vector<double> values(outer);
    parallel_for(outer, plan.threads, [&](std::uint64_t t) {
        const std::uint64_t pos_idx = t / layouts;
        for (;;) {
            try {
                RngStream pos_rng = substream(seed, 0x506f73ULL, pos_idx);
                std::vector<PolarPoint> users(static_cast<std::size_t>(k));
                for (auto& u : users) u = sample_user_position(pos_rng);
                if (fixed_target) users[0] = *fixed_target;

                RngStream rng = substream(seed, 0x44726177ULL, t);
                const LayoutRealization layout =
                    sample_layout(kind == LayoutKind::CA ? LayoutKind::CA
                                                         : (kind == LayoutKind::DA ? LayoutKind::DA
                                                                                   : LayoutKind::SmallCell),
                                  params, rng);
                RateEstimate inner;
                if (kind == LayoutKind::SmallCell) {
                    const auto assignment = assign_users_to_cells(users, layout);
                    inner = small_cell_rate(0, assignment, users, layout, params, plan.channels, rng);
                } else if (k == 1) {
                    inner = single_user_capacity(users[0], layout, params, plan.channels, rng);
                } else {
                    inner = bd_per_antenna_rate(0, users, layout, params, plan.channels, rng);
                }
                values[t] = inner.mean;
                return;
            } catch (const CoincidentPositions&) {
                // probability-zero geometry; redraw this outer draw
                seed = hash_combine(seed, t + 1);
            }
        }
    });

    RunningStat stat;
    for (double v : values) stat.push(v);
    RateEstimate est;
    est.mean = stat.mean();
    est.half_width = stat.half_width95();
    est.outer_std = stat.stddev();
    est.trials = {plan.positions, layouts, plan.channels};
    est.layout = kind;
    est.params = params;
    return est;
}

} // namespace detail

/// Position- and layout-averaged per-antenna rate (positions outer, layouts
/// next, channels inner). Deterministic in (seed, draw counts) for any
/// thread count.
inline RateEstimate average_rate(LayoutKind kind, const SystemParams& params, const MonteCarloPlan& plan,
                                 std::uint64_t seed) {
    return detail::average_rate_impl(kind, params, plan, seed, std::nullopt);
}

/// Layout/co-user-averaged rate with the target user pinned at a position.
inline RateEstimate rate_at_position(LayoutKind kind, const PolarPoint& target, const SystemParams& params,
                                     const MonteCarloPlan& plan, std::uint64_t seed) {
    return detail::average_rate_impl(kind, params, plan, seed, target);
}

} // namespace dlmimo
