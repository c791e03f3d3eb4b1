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
// Transmit precoding with the noise floor normalized to N0 = 1:
//  - single user: SVD transmission W = V * Omega with water-filled powers,
//  - multi user: block diagonalization, i.e. SVD transmission on the
//    projection of the user's channel onto the null space of the co-cell
//    users' stacked channels.
// The power scaling Omega_n = sqrt(P_n / budget) with sum P_n = budget makes
// Tr(W W^H) = 1 by construction.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <numeric>
#include <vector>

#include "dlmimo/channel.hpp"
#include "dlmimo/common.hpp"

namespace dlmimo {

/// Nonnegative effective eigenvalues of a normalized channel Gram matrix,
/// descending, length N.
using EigSpectrum = Eigen::VectorXd;

struct WaterfillResult {
    Eigen::VectorXd powers; // aligned with the input spectrum
    double water_level = 0.0;
};

/// Water-filling P_n = (zeta - noise/lambda_n)^+ with sum P_n = budget.
/// Solved exactly by a sort-and-scan over candidate active sets; active
/// channels satisfy zeta - noise/lambda_n > 0, inactive ones
/// zeta <= noise/lambda_n.
inline WaterfillResult waterfill(const EigSpectrum& eigs, double budget, double noise) {
    if (!(budget > 0.0)) throw std::invalid_argument("waterfill: budget must be positive");
    if (!(noise > 0.0)) throw std::invalid_argument("waterfill: noise must be positive");
    const Eigen::Index n = eigs.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return eigs[a] > eigs[b]; });

    Eigen::Index positive = 0;
    while (positive < n && eigs[order[static_cast<std::size_t>(positive)]] > 0.0) ++positive;
    if (positive == 0) throw std::invalid_argument("rank-zero channel");

    double inv_sum = 0.0;
    for (Eigen::Index i = 0; i < positive; ++i) inv_sum += 1.0 / eigs[order[static_cast<std::size_t>(i)]];

    Eigen::Index active = positive;
    double zeta = 0.0;
    for (;; --active) {
        zeta = (budget + noise * inv_sum) / static_cast<double>(active);
        const double weakest = eigs[order[static_cast<std::size_t>(active - 1)]];
        if (zeta - noise / weakest > 0.0) break;
        inv_sum -= 1.0 / weakest;
        if (active == 1) throw std::logic_error("waterfill: no active channel"); // unreachable: budget > 0
    }

    WaterfillResult out;
    out.powers = Eigen::VectorXd::Zero(n);
    out.water_level = zeta;
    for (Eigen::Index i = 0; i < active; ++i) {
        const Eigen::Index idx = order[static_cast<std::size_t>(i)];
        out.powers[idx] = zeta - noise / eigs[idx];
    }
    return out;
}

struct PrecodeResult {
    Eigen::MatrixXcd W;             // M x N, Tr(W W^H) = 1
    Eigen::VectorXd powers;         // per-subchannel allocation, sums to the budget
    double water_level = 0.0;
    EigSpectrum effective_eigs; // descending, length N
};

/// Per-antenna rate of a precoded link: (1/N) sum log2(1 + lambda_n P_n / noise).
inline double precode_rate(const EigSpectrum& eigs, const Eigen::VectorXd& powers, double noise, int n_antennas) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) r += log2_one_plus(eigs[i] * powers[i] / noise);
    return r / n_antennas;
}

/// Single-user SVD transmission on the normalized channel. budget is the
/// total allocatable power P_bar*||gamma||^2, noise is N0.
inline PrecodeResult svd_precoder(const ChannelRealization& chan, double budget, double noise) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(chan.G_tilde, Eigen::ComputeThinV);
    PrecodeResult out;
    out.effective_eigs = svd.singularValues().array().square();
    auto wf = waterfill(out.effective_eigs, budget, noise);
    out.powers = std::move(wf.powers);
    out.water_level = wf.water_level;
    out.W = svd.matrixV() * (out.powers / budget).cwiseSqrt().asDiagonal();
    return out;
}

/// Orthonormal basis of the null space of X (rows x M, rows < M), taken from
/// the right singular vectors of the zero singular values. The numerical
/// rank uses sigma > max_dim * eps * sigma_max.
inline Eigen::MatrixXcd null_space_basis(const Eigen::MatrixXcd& X) {
    const Eigen::Index m = X.cols();
    const Eigen::Index rows = X.rows();
    if (rows == 0) return Eigen::MatrixXcd::Identity(m, m);
    if (rows >= m) throw InfeasibleConfiguration("null_space_basis: no null space, rows >= cols");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = static_cast<double>(std::max(rows, m)) *
                       std::numeric_limits<double>::epsilon() * sv[0];
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > tol) ++rank;
    if (rank < rows) throw RankDeficient(static_cast<int>(rank), static_cast<int>(rows));
    return svd.matrixV().rightCols(m - rows);
}

/// Block diagonalization for K co-cell users: user k transmits in the null
/// space of the other users' stacked normalized channels, with per-user
/// water-filling over the effective spectrum. Requires M >= K*N.
inline std::vector<PrecodeResult> bd_precoder(const std::vector<ChannelRealization>& chans,
                                              const SystemParams& params) {
    const int k_users = static_cast<int>(chans.size());
    const int n = params.user_antennas;
    const int m = params.bs_antennas();
    if (k_users < 1) throw std::invalid_argument("bd_precoder: no users");
    if (m < k_users * n)
        throw InfeasibleConfiguration("bd_precoder: M = " + std::to_string(m) + " below K*N = " +
                                      std::to_string(k_users * n));

    std::vector<PrecodeResult> out;
    out.reserve(chans.size());
    for (int k = 0; k < k_users; ++k) {
        Eigen::MatrixXcd stacked((k_users - 1) * n, m);
        Eigen::Index row = 0;
        for (int j = 0; j < k_users; ++j) {
            if (j == k) continue;
            stacked.middleRows(row, n) = chans[static_cast<std::size_t>(j)].G_tilde;
            row += n;
        }
        const Eigen::MatrixXcd v0 = null_space_basis(stacked);
        const Eigen::MatrixXcd effective = chans[static_cast<std::size_t>(k)].G_tilde * v0;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(effective, Eigen::ComputeThinV);

        PrecodeResult r;
        r.effective_eigs = svd.singularValues().array().square();
        const double budget = params.per_user_power() * chans[static_cast<std::size_t>(k)].gamma_norm_sq;
        auto wf = waterfill(r.effective_eigs, budget, 1.0);
        r.powers = std::move(wf.powers);
        r.water_level = wf.water_level;
        r.W = v0 * svd.matrixV() * (r.powers / budget).cwiseSqrt().asDiagonal();
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace dlmimo
