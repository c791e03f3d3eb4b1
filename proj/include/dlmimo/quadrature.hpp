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
#include <cstdint>
#include <utility>

namespace dlmimo {

struct QuadOptions {
    double abs_tol = 1e-10;
    int max_depth = 32;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (positive half, node 7 is the center).
inline constexpr double kGkNode[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGkWeight[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeight[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// One GK15 panel; returns {estimate, error estimate}.
template <class F>
std::pair<double, double> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k15 = kGkWeight[7] * fc;
    double g7 = kGaussWeight[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGkNode[i];
        const double fv = f(c + dx) + f(c - dx);
        k15 += kGkWeight[i] * fv;
        if (i % 2 == 1) g7 += kGaussWeight[i / 2] * fv;
    }
    k15 *= h;
    g7 *= h;
    double err = std::fabs(k15 - g7);
    const double scaled = std::pow(200.0 * err, 1.5);
    if (scaled < err) err = scaled;
    return {k15, err};
}

template <class F>
double integrate_rec(F& f, double a, double b, double tol, int depth, int max_depth) {
    auto [est, err] = gk15(f, a, b);
    if (err <= tol || depth >= max_depth || !(b - a > 0.0)) return est;
    const double m = 0.5 * (a + b);
    return integrate_rec(f, a, m, 0.5 * tol, depth + 1, max_depth) +
           integrate_rec(f, m, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b]. Nodes are interior,
/// so integrable endpoint singularities are admissible.
template <class F>
double integrate(F&& f, double a, double b, QuadOptions opt = {}) {
    if (!(b > a)) return 0.0;
    return detail::integrate_rec(f, a, b, opt.abs_tol, 0, opt.max_depth);
}

/// Integration over [lo, hi] for integrands whose mass piles up against the
/// lower endpoint (x^{-p}-type). The range is pre-split into geometrically
/// shrinking panels toward lo, each integrated adaptively.
template <class F>
double integrate_peaked_low(F&& f, double lo, double hi, QuadOptions opt = {}) {
    if (!(hi > lo)) return 0.0;
    const double span = hi - lo;
    int n_panels = 1;
    double w = span;
    while (w > 1e-13 * span && lo + w * 0.5 > lo && n_panels < 60) {
        w *= 0.5;
        ++n_panels;
    }
    QuadOptions panel_opt = opt;
    panel_opt.abs_tol = opt.abs_tol / n_panels;
    double total = 0.0;
    double b = hi;
    w = span;
    for (int i = 0; i + 1 < n_panels; ++i) {
        w *= 0.5;
        const double a = lo + w;
        total += detail::integrate_rec(f, a, b, panel_opt.abs_tol, 0, panel_opt.max_depth);
        b = a;
    }
    total += detail::integrate_rec(f, lo, b, panel_opt.abs_tol, 0, panel_opt.max_depth);
    return total;
}

} // namespace dlmimo
