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
// Closed-form asymptotics (M, N -> infinity at fixed M/N = L) and their
// quadrature-evaluated exact counterparts. Large-argument approximations are
// exposed separately from the exact forms so the approximation gap is
// measurable. Values are bits/s/Hz per user antenna.

#pragma once

#include <cmath>
#include <map>
#include <mutex>

#include "dlmimo/common.hpp"
#include "dlmimo/geometry.hpp"
#include "dlmimo/interference.hpp"
#include "dlmimo/quadrature.hpp"

namespace dlmimo {

enum class AsymKind { exact_asymptotic, lower_bound, approximation };

struct AsymptoticValue {
    double value = 0.0;
    AsymKind kind = AsymKind::exact_asymptotic;
    const char* formula_id = "";
    bool regime_warning = false; // evaluated outside the large-L regime it assumes
};

/// Marchenko-Pastur density of the eigenvalues of the normalized channel
/// Gram matrix, ratio = L (BS antennas per user antenna). With `users` > 1
/// this is the post-projection spectrum: edge positions from L-K+1, scale
/// from L. ratio 1 (and users 1) gives the quarter-circle law on [0, 4].
inline double mp_density(double x, double ratio, int users = 1) {
    if (ratio < 1.0 || users < 1 || ratio - users + 1 < 1.0 - 1e-12)
        throw std::domain_error("mp_density: need ratio >= users >= 1");
    const double le = ratio - users + 1;
    const double sq = std::sqrt(le);
    const double xp = (sq + 1.0) * (sq + 1.0);
    const double xm = (sq - 1.0) * (sq - 1.0);
    const double lx = ratio * x;
    if (x <= 0.0 || lx <= xm || lx >= xp) return 0.0;
    return std::sqrt((xp - lx) * (lx - xm)) / (2.0 * kPi * x);
}

/// Support of mp_density, [lower, upper].
inline std::pair<double, double> mp_support(double ratio, int users = 1) {
    const double le = ratio - users + 1;
    const double sq = std::sqrt(le);
    return {(sq - 1.0) * (sq - 1.0) / ratio, (sq + 1.0) * (sq + 1.0) / ratio};
}

inline double mp_cdf(double x, double ratio, int users = 1) {
    auto [lo, hi] = mp_support(ratio, users);
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    if (lo == 0.0) {
        // hard edge: substitute x = u^2, the transformed integrand is smooth
        const double le = ratio - users + 1; // == 1 here
        const double xp = (std::sqrt(le) + 1.0) * (std::sqrt(le) + 1.0);
        auto f = [&](double u) {
            const double lx = ratio * u * u;
            return std::sqrt(std::max(0.0, (xp - lx) * ratio)) / kPi;
        };
        return std::min(1.0, integrate(f, 0.0, std::sqrt(x), {1e-11, 30}));
    }
    auto f = [&](double t) { return mp_density(t, ratio, users); };
    return std::min(1.0, integrate(f, lo, x, {1e-11, 30}));
}

/// Asymptotic per-antenna capacity functional of the effective SNR under the
/// quarter-circle eigenvalue law. Strictly increasing and concave;
/// phi(x) -> log2(x) - log2(e) for large x (gap decays like 1/sqrt(x)).
inline double phi(double x) {
    if (!(x > 0.0)) throw std::domain_error("phi: argument must be positive");
    if (x < 1e-8) return kLog2E * x * (1.0 - x);
    const double s = std::sqrt(1.0 + 4.0 * x);
    const double d = s - 1.0;
    return 2.0 * std::log2(0.5 * (1.0 + s)) - kLog2E / (4.0 * x) * d * d;
}

/// E[d^-alpha] of the distance to a uniform point in a unit disk whose
/// center is D away. Blows up like (D-1)^{2-alpha} as D -> 1.
inline double neighbor_inv_pow_mean(double D, double alpha) {
    const double lo = D - 1.0;
    const double hi = D + 1.0;
    if (lo < 0.0) throw std::domain_error("neighbor_inv_pow_mean: center distance below 1");
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    auto f = [&](double x) { return std::pow(x, -alpha) * detail::disk_distance_pdf(x, D); };
    const double scale = std::max(1.0, std::pow(lo, 2.0 - alpha));
    if (lo >= 0.5) return integrate(f, lo, hi, {1e-12, 30});
    return integrate_peaked_low(f, lo, hi, {1e-10 * scale, 30});
}

inline double upsilon(double alpha) {
    auto f = [&](double x) {
        return 2.0 / kPi * std::pow(x, 1.0 - alpha) * detail::clamped_acos((x * x + 3.0) / (4.0 * x));
    };
    return integrate(f, 1.0, 3.0, {1e-12, 30});
}

namespace detail {

/// Sum over the six neighbor cells of (distance to center)^{-alpha} for a
/// user at (rho, theta); the CA inter-cell power.
inline double ca_neighbor_sum(double rho, double theta, double alpha) {
    return intercell_power_ca({rho, theta}, alpha);
}

/// Average over the user disk of f(rho, theta), exploiting the pi/3
/// periodicity and reflection symmetry of the layout: 12x the [0, pi/6]
/// angular patch.
template <class F>
double disk_average_symmetric(F&& f, double inner_tol, double outer_tol) {
    auto outer = [&](double z) {
        auto inner = [&](double y) { return y * f(y, z); };
        return integrate(inner, 0.0, 1.0, {inner_tol, 36});
    };
    return 12.0 / kPi * integrate(outer, 0.0, kPi / 6.0, {outer_tol, 24});
}

/// Log-spaced interpolation table for neighbor_inv_pow_mean over center
/// distances D in (1, 3]; u = ln(D-1). Cubic 4-point interpolation of
/// ln(mean) in u.
class NeighborMomentTable {
  public:
    explicit NeighborMomentTable(double alpha) : alpha_(alpha) {
        const double u_lo = std::log(1e-14);
        const double u_hi = std::log(2.0);
        const int n = 1600;
        du_ = (u_hi - u_lo) / (n - 1);
        u_lo_ = u_lo;
        log_mean_.resize(n);
        for (int i = 0; i < n; ++i)
            log_mean_[static_cast<std::size_t>(i)] =
                std::log(neighbor_inv_pow_mean(1.0 + std::exp(u_lo + i * du_), alpha_));
    }

    double operator()(double D) const {
        const double delta = std::max(D - 1.0, 1e-14);
        const double u = std::log(std::min(delta, 2.0));
        double t = (u - u_lo_) / du_;
        const int n = static_cast<int>(log_mean_.size());
        int i1 = static_cast<int>(std::floor(t));
        i1 = std::clamp(i1, 1, n - 3);
        const double s = t - i1;
        const double p0 = log_mean_[static_cast<std::size_t>(i1 - 1)];
        const double p1 = log_mean_[static_cast<std::size_t>(i1)];
        const double p2 = log_mean_[static_cast<std::size_t>(i1 + 1)];
        const double p3 = log_mean_[static_cast<std::size_t>(i1 + 2)];
        // Catmull-Rom in u
        const double v = p1 + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                                        s * (3.0 * (p1 - p2) + p3 - p0)));
        return std::exp(v);
    }

  private:
    double alpha_;
    double u_lo_ = 0.0;
    double du_ = 1.0;
    std::vector<double> log_mean_;
};

template <class Fn>
double cached_by_alpha(const char* which, double alpha, Fn&& compute) {
    static std::map<std::pair<std::string, double>, double> cache;
    static std::mutex mu;
    const std::pair<std::string, double> key{which, alpha};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, v);
    return v;
}

/// Expected log2 of the minimum of n own-cell access distances, weighted by
/// -alpha and averaged over the user radius:
///   int_0^1 2y int_0^{1+y} log2(x^-alpha) f_min(x | y, n) dx dy.
inline double avg_log_inv_min_dist(int n, double alpha) {
    auto outer = [&](double y) {
        auto f = [&](double x) {
            return -alpha * std::log2(x) * min_access_distance_pdf(x, y, n);
        };
        const double split = 1.0 - y;
        double v = integrate_peaked_low(f, 0.0, split, {1e-10, 34});
        if (y > 0.0) v += integrate(f, split, 1.0 + y, {1e-10, 30});
        return 2.0 * y * v;
    };
    return integrate(outer, 0.0, 1.0, {1e-8, 22});
}

} // namespace detail

/// Layout constant of the co-located multi-user average rate.
inline double psi_c(double alpha) {
    return detail::cached_by_alpha("psi_c", alpha, [&] {
        const double avg = detail::disk_average_symmetric(
            [&](double y, double z) { return std::log2(detail::ca_neighbor_sum(y, z, alpha)); }, 1e-9, 1e-8);
        return alpha / std::log(4.0) - avg;
    });
}

/// Layout constant of the distributed multi-user average-rate bound. The
/// integrand's inner expectation diverges toward the cell edge, so it is
/// evaluated through a log-spaced table with edge-refined quadrature.
inline double psi_d(double alpha) {
    return detail::cached_by_alpha("psi_d", alpha, [&] {
        detail::NeighborMomentTable table(alpha);
        const double avg = detail::disk_average_symmetric(
            [&](double y, double z) {
                double s = 0.0;
                for (int i = 1; i < kCellCount; ++i) s += table(neighbor_center_distance(y, z, i));
                return std::log2(s);
            },
            1e-8, 1e-7);
        return -avg - kLog2E;
    });
}

// ---- single user, co-located ----

inline AsymptoticValue ca_su_rate(double rho, int L, const SystemParams& p) {
    const double v = std::log2(1.0 + L * p.per_user_power() * std::pow(rho, -p.alpha));
    return {v, AsymKind::approximation, "ca-su-rate-large-l", L < 10};
}

inline AsymptoticValue ca_su_avg(int L, const SystemParams& p) {
    const double c = L * p.per_user_power();
    auto f = [&](double x) { return 2.0 * x * log2_one_plus(c * std::pow(x, -p.alpha)); };
    return {integrate(f, 0.0, 1.0, {1e-10, 30}), AsymKind::exact_asymptotic, "ca-su-avg-quadrature", L < 10};
}

inline AsymptoticValue ca_su_avg_large_l(int L, const SystemParams& p) {
    const double v = std::log2(p.per_user_power()) + p.alpha / std::log(4.0) + std::log2(static_cast<double>(L));
    return {v, AsymKind::approximation, "ca-su-avg-large-l", L < 10};
}

// ---- single user, distributed ----

inline AsymptoticValue da_su_lb(double d_min, const SystemParams& p) {
    if (!(d_min > 0.0)) throw std::domain_error("da_su_lb: distance must be positive");
    return {phi(p.per_user_power() * std::pow(d_min, -p.alpha)), AsymKind::lower_bound, "da-su-lb"};
}

inline AsymptoticValue da_su_lb_large_l(double d_min, const SystemParams& p) {
    const double v = std::log2(p.per_user_power() * std::pow(d_min, -p.alpha)) - kLog2E;
    return {v, AsymKind::approximation, "da-su-lb-large-snr"};
}

inline AsymptoticValue da_su_avg_lb(int L, const SystemParams& p) {
    const double v = detail::avg_log_inv_min_dist(L, p.alpha) + std::log2(p.per_user_power()) - kLog2E;
    return {v, AsymKind::lower_bound, "da-su-avg-lb", L < 10};
}

// ---- multi user, co-located ----

inline double ca_mu_rate_value(double rho, int L, int K, double snr, double p_int, double alpha) {
    const double gain = static_cast<double>(L - K + 1) / K * std::pow(rho, -alpha);
    return log2_one_plus(gain / (1.0 / snr + p_int));
}

inline AsymptoticValue ca_mu_rate(double rho, double theta, int L, int K, const SystemParams& p) {
    if (L < K) throw InfeasibleConfiguration("ca_mu_rate: L below K");
    const double pint = intercell_power_ca({rho, theta}, p.alpha);
    return {ca_mu_rate_value(rho, L, K, p.snr, pint, p.alpha), AsymKind::approximation, "ca-mu-rate-large-l",
            L < 10 * K};
}

inline AsymptoticValue ca_mu_avg(int L, int K, const SystemParams& p) {
    if (L < K) throw InfeasibleConfiguration("ca_mu_avg: L below K");
    const double v = detail::disk_average_symmetric(
        [&](double y, double z) {
            const double pint = detail::ca_neighbor_sum(y, z, p.alpha);
            return ca_mu_rate_value(y, L, K, p.snr, pint, p.alpha);
        },
        1e-9, 1e-8);
    return {v, AsymKind::exact_asymptotic, "ca-mu-avg-quadrature", L < 10 * K};
}

inline AsymptoticValue ca_mu_avg_large_l(int L, int K, const SystemParams& p) {
    if (L <= K) throw InfeasibleConfiguration("ca_mu_avg_large_l: needs L/K > 1");
    const double v = std::log2(static_cast<double>(L) / K - 1.0) + psi_c(p.alpha);
    return {v, AsymKind::approximation, "ca-mu-avg-large-l", L < 10 * K};
}

// ---- multi user, distributed ----

inline AsymptoticValue da_mu_lb(double d_min_tilde, double p_int, int K, const SystemParams& p) {
    if (!(d_min_tilde > 0.0)) throw std::domain_error("da_mu_lb: distance must be positive");
    const double sinr = std::pow(d_min_tilde, -p.alpha) / K / (1.0 / p.snr + p_int);
    return {phi(sinr), AsymKind::lower_bound, "da-mu-lb"};
}

inline AsymptoticValue da_mu_lb_high_snr(double d_min_tilde, double p_int, int K, const SystemParams& p) {
    const double v = std::log2(std::pow(d_min_tilde, -p.alpha) / K / p_int) - kLog2E;
    return {v, AsymKind::approximation, "da-mu-lb-high-snr"};
}

inline AsymptoticValue da_mu_avg_lb(int L, int K, const SystemParams& p) {
    if (L < K) throw InfeasibleConfiguration("da_mu_avg_lb: L below K");
    const double v = detail::avg_log_inv_min_dist(L - K + 1, p.alpha) - std::log2(static_cast<double>(K)) +
                     psi_d(p.alpha);
    return {v, AsymKind::lower_bound, "da-mu-avg-lb", L < 10 * K};
}

// ---- small cells ----

namespace detail {

inline double min_dist_pdf_center(double x, int L) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 2.0 * L * x * std::pow(1.0 - x * x, L - 1);
}

} // namespace detail

/// Small-cell average-rate bound for a cell-center user, simplified
/// denominator (own-cell co-channel term dominating at small access
/// distance).
inline AsymptoticValue sc_avg_lb(int L, int K, const SystemParams& p) {
    if (L < K) throw InfeasibleConfiguration("sc_avg_lb: more users than small cells");
    auto f = [&](double x) {
        return phi((p.alpha - 2.0) / 2.0 * std::pow(x, -2.0) / K) * detail::min_dist_pdf_center(x, L);
    };
    return {integrate_peaked_low(f, 0.0, 1.0, {1e-10, 30}), AsymKind::lower_bound, "sc-avg-lb", L < 10 * K};
}

/// Same bound with the full interference denominator: own-cell co-channel
/// users on the annulus plus six neighbor cells' expected contribution.
inline AsymptoticValue sc_avg_lb_exact(int L, int K, const SystemParams& p) {
    if (L < K) throw InfeasibleConfiguration("sc_avg_lb_exact: more users than small cells");
    const double ups6 = 6.0 * upsilon(p.alpha);
    auto f = [&](double x) {
        const double xa = std::pow(x, p.alpha);
        double annulus; // x^alpha * E[d^-alpha over co-channel serving BSs]
        if (x > 1.0 - 1e-8) {
            annulus = 1.0; // limit of (x^2 - x^alpha)/(1 - x^2) * 2/(alpha-2)
        } else {
            annulus = 2.0 / (p.alpha - 2.0) * (x * x - xa) / (1.0 - x * x);
        }
        const double den = xa * (1.0 / p.snr + ups6) + annulus;
        return phi(1.0 / (K * den)) * detail::min_dist_pdf_center(x, L);
    };
    return {integrate_peaked_low(f, 0.0, 1.0, {1e-10, 30}), AsymKind::lower_bound, "sc-avg-lb-full", L < 10 * K};
}

} // namespace dlmimo
