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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dlmimo/common.hpp"

namespace dlmimo {

/// Welford running mean/variance.
class RunningStat {
  public:
    void push(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    /// 95% normal-approximation confidence half-width of the mean.
    double half_width95() const {
        return n_ > 1 ? 1.959963984540054 * stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Draw counts at each averaging level of a nested Monte Carlo estimate.
struct TrialCounts {
    std::uint64_t positions = 1;
    std::uint64_t layouts = 1;
    std::uint64_t channels = 1;
};

/// Monte Carlo rate estimate in bits/s/Hz per user antenna.
struct RateEstimate {
    double mean = 0.0;
    double half_width = 0.0; // 95% CI over outer draws
    double outer_std = 0.0;  // spread across outer draws
    TrialCounts trials;
    LayoutKind layout = LayoutKind::CA;
    SystemParams params;
};

/// Kolmogorov-Smirnov statistic of samples against an analytic cdf.
/// Samples are sorted in place.
template <class Cdf>
double ks_statistic(std::vector<double>& samples, Cdf&& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
        ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return ks;
}

/// Hill estimator of the tail index from the k largest of the given values.
/// Returns the estimated Pareto exponent (small means heavy tail; below 1
/// means the mean does not exist).
inline double hill_tail_index(std::vector<double> values, std::size_t k) {
    if (values.size() < k + 1 || k == 0) throw std::invalid_argument("hill_tail_index: need k+1 samples");
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end(),
                     std::greater<double>());
    const double xk = values[k];
    if (!(xk > 0.0)) throw std::invalid_argument("hill_tail_index: nonpositive order statistic");
    std::sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), std::greater<double>());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(values[i] / xk);
    return static_cast<double>(k) / s;
}

} // namespace dlmimo
