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

#include <cmath>
#include <stdexcept>
#include <string>

namespace dlmimo {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kLog2E = 1.442695040888963407359924681001892137;

/// Base-station antenna deployment within each cell.
enum class LayoutKind { CA, DA, SmallCell };

inline const char* to_string(LayoutKind k) {
    switch (k) {
        case LayoutKind::CA: return "ca";
        case LayoutKind::DA: return "da";
        case LayoutKind::SmallCell: return "smallcell";
    }
    return "?";
}

/// Global system parameters shared by all modules.
///
/// The cell's inscribed radius is normalized to 1 and the noise power N0 to 1,
/// so `snr` is the total BS transmit power P_t in noise units. Each of the K
/// users gets an equal share P_t/K.
struct SystemParams {
    double alpha = 4.0;    // path-loss exponent, > 2
    double snr = 10.0;     // P_t / N0, linear
    int users = 1;         // K, users per cell
    int clusters = 1;      // L, antenna clusters per cell (DA/small-cell)
    int user_antennas = 1; // N, antennas per user (and per cluster)

    int bs_antennas() const { return clusters * user_antennas; } // M = L*N
    double per_user_power() const { return snr / users; }        // P_t/(K*N0)

    void validate() const {
        if (!(alpha > 2.0))
            throw std::invalid_argument("path-loss exponent must exceed 2, got " + std::to_string(alpha));
        if (!(snr > 0.0))
            throw std::invalid_argument("snr must be positive");
        if (users < 1) throw std::invalid_argument("need at least one user per cell");
        if (user_antennas < 1) throw std::invalid_argument("need at least one user antenna");
        if (clusters < users)
            throw std::invalid_argument("clusters L=" + std::to_string(clusters) +
                                        " below users K=" + std::to_string(users) +
                                        "; joint precoding needs M >= K*N");
    }
};

inline double log2_one_plus(double x) { return std::log1p(x) * kLog2E; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Thrown when a sampled geometry puts a user on top of an antenna. The
/// path-loss model is unbounded there; callers must redraw the stochastic
/// element rather than clamp the distance.
struct CoincidentPositions : std::runtime_error {
    CoincidentPositions() : std::runtime_error("user coincides with an antenna position; resample") {}
};

/// Parameter combination a precoder cannot serve (e.g. M < K*N).
struct InfeasibleConfiguration : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerically rank-deficient input where full rank was required.
struct RankDeficient : std::runtime_error {
    int rank;
    int expected;
    RankDeficient(int r, int e)
        : std::runtime_error("rank-deficient matrix: measured rank " + std::to_string(r) +
                             ", expected " + std::to_string(e)),
          rank(r), expected(e) {}
};

} // namespace dlmimo
