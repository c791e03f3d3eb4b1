// SPDX-License-Identifier: Apache-2.0
//
// Test-side oracles, deliberately independent of the library's quadrature
// and sampling paths: an adaptive Simpson integrator and small Monte Carlo
// reference estimators.

#pragma once

#include <cmath>
#include <functional>
#include <random>

namespace oracles {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                      double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature (independent of the library integrator).
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                        int depth = 40) {
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return detail::adaptive(f, a, b, fa, fm, fb, detail::simpson(f, a, b, fa, fm, fb), tol, depth);
}

/// Monte Carlo estimate of P(distance <= x) from a point at radius `user_rho`
/// to a uniform point in the unit disk (2-D rejection-free sampling).
inline double mc_disk_distance_cdf(double x, double user_rho, unsigned long n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    unsigned long hits = 0;
    for (unsigned long i = 0; i < n; ++i) {
        const double r = std::sqrt(u(rng));
        const double th = 2.0 * 3.141592653589793 * u(rng);
        const double dx = r * std::cos(th) - user_rho;
        const double dy = r * std::sin(th);
        if (dx * dx + dy * dy <= x * x) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

} // namespace oracles
