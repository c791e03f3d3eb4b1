// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one line per criterion, each backed by sub-checks at
// pinned tolerances. Exit code is the number of failed criteria.

#include <Eigen/SVD>
#include <cstdio>
#include <string>
#include <vector>

#include "dlmimo/dlmimo.hpp"

using namespace dlmimo;

namespace {

struct Criterion {
    std::string name;
    bool pass = true;
    std::vector<std::string> notes;

    void sub(const std::string& what, bool ok, const std::string& detail = "") {
        pass = pass && ok;
        std::string line = std::string(ok ? "pass  " : "FAIL  ") + what;
        if (!detail.empty()) line += "  [" + detail + "]";
        notes.push_back(line);
    }
};

std::vector<Criterion> g_results;

void report(Criterion c) {
    std::printf("[%zu] %-58s %s\n", g_results.size() + 1, c.name.c_str(), c.pass ? "PASS" : "FAIL");
    for (const auto& n : c.notes) std::printf("      %s\n", n.c_str());
    std::fflush(stdout);
    g_results.push_back(std::move(c));
}

SystemParams make_params(int K, int L, int N, double alpha = 4.0, double snr_db = 10.0) {
    SystemParams p;
    p.alpha = alpha;
    p.snr = db_to_linear(snr_db);
    p.users = K;
    p.clusters = L;
    p.user_antennas = N;
    return p;
}

std::string f9(double v) { return fmt9(v); }

// ------------------------------------------------------------ criterion 1

void criterion_constants() {
    Criterion c{"printed constants"};
    const double pc = psi_c(4.0);
    c.sub("psi_c(4) in [3.49, 3.59]", pc >= 3.49 && pc <= 3.59, "value " + f9(pc));
    const double pd = psi_d(4.0);
    c.sub("psi_d(4) in [-3.10, -3.00]", pd >= -3.10 && pd <= -3.00,
          "value " + f9(pd) +
              "; the defining integral evaluates to -3.1234 (confirmed by an independent integrator and "
              "position-sampling MC); the quoted window assumes an under-resolved cell-edge region");
    const double up = upsilon(4.0);
    c.sub("upsilon(4) = 1/9 +- 1e-4", std::fabs(up - 1.0 / 9.0) <= 1e-4, "value " + f9(up));
    const double p0 = intercell_power_ca({0.0, 0.0}, 4.0);
    c.sub("intercell CA at the center = 0.375 exactly", p0 == 0.375, "value " + f9(p0));
    const double pe = intercell_power_ca({1.0, kPi / 6.0}, 4.0);
    c.sub("intercell CA at the corner in [1.27, 1.28]", pe >= 1.27 && pe <= 1.28, "value " + f9(pe));

    SystemParams p = make_params(1, 16, 2);
    RunningStat stat;
    RngStream rng = substream(1001, 0);
    for (int i = 0; i < 100000; ++i) {
        const auto layout = sample_layout(LayoutKind::DA, p, rng);
        stat.push(intercell_power_da({0.0, 0.0}, layout, 4.0));
    }
    c.sub("mean clustered interference at the center = 2/3 +- 2% (1e5 layouts)",
          std::fabs(stat.mean() - 2.0 / 3.0) <= 0.02 * 2.0 / 3.0, "value " + f9(stat.mean()));
    report(std::move(c));
}

// ------------------------------------------------------------ criterion 2

std::vector<double> sweep_rates(LayoutKind kind, const std::vector<int>& ls, bool half_users, int fixed_users,
                                const MonteCarloPlan& plan, std::uint64_t seed) {
    std::vector<double> out;
    for (int l : ls) {
        const int k = half_users ? l / 2 : fixed_users;
        SystemParams p = make_params(k, l, 2);
        out.push_back(average_rate(kind, p, plan, seed).mean);
    }
    return out;
}

void criterion_slopes() {
    Criterion c{"scaling slopes at desk scale (100x100 outer draws)"};
    const std::vector<int> l_su = {32, 64, 128, 256, 512};

    {
        MonteCarloPlan plan{100, 1, 200, 0};
        const auto v = sweep_rates(LayoutKind::CA, l_su, false, 1, plan, 21);
        bool ok = true;
        std::string detail = "gains";
        for (std::size_t i = 1; i < v.size(); ++i) {
            const double gain = v[i] - v[i - 1];
            ok = ok && std::fabs(gain - 1.0) <= 0.15;
            detail += " " + f9(gain);
        }
        c.sub("single-user CA: 1.0 +- 0.15 bits per doubling of L", ok, detail);
    }
    {
        MonteCarloPlan plan{100, 100, 100, 0};
        const auto v = sweep_rates(LayoutKind::DA, l_su, false, 1, plan, 22);
        bool ok = true;
        std::string detail = "gains";
        for (std::size_t i = 1; i < v.size(); ++i) {
            const double gain = v[i] - v[i - 1];
            ok = ok && std::fabs(gain - 2.0) <= 0.2;
            detail += " " + f9(gain);
        }
        c.sub("single-user DA: 2.0 +- 0.2 bits per doubling of L", ok, detail);
    }
    {
        const std::vector<int> ls = {16, 32, 64, 128};
        MonteCarloPlan plan_ca{100, 1, 25, 0};
        const auto v = sweep_rates(LayoutKind::CA, ls, true, 0, plan_ca, 23);
        bool ok = true;
        std::string detail = "diffs";
        for (std::size_t i = 1; i < v.size(); ++i) {
            ok = ok && std::fabs(v[i] - v[i - 1]) <= 0.1;
            detail += " " + f9(v[i] - v[i - 1]);
        }
        c.sub("multi-user CA at L/K = 2: flat within 0.1 bit per doubling", ok, detail);

        MonteCarloPlan plan_da{100, 100, 15, 0};
        const auto w = sweep_rates(LayoutKind::DA, ls, true, 0, plan_da, 24);
        bool ok2 = true;
        std::string detail2 = "gains";
        for (std::size_t i = 2; i < w.size(); ++i) { // doublings from 32 on
            const double gain = w[i] - w[i - 1];
            ok2 = ok2 && std::fabs(gain - 1.0) <= 0.2;
            detail2 += " " + f9(gain);
        }
        c.sub("multi-user DA at L/K = 2: 1.0 +- 0.2 bits per doubling", ok2, detail2);
    }
    {
        const std::vector<int> ls = {20, 40, 80};
        MonteCarloPlan plan{100, 100, 25, 0};
        std::vector<double> v;
        for (int l : ls) {
            SystemParams p = make_params(l / 5, l, 2);
            v.push_back(average_rate(LayoutKind::SmallCell, p, plan, 25).mean);
        }
        bool ok = true;
        std::string detail = "diffs";
        for (std::size_t i = 1; i < v.size(); ++i) {
            ok = ok && std::fabs(v[i] - v[i - 1]) <= 0.15;
            detail += " " + f9(v[i] - v[i - 1]);
        }
        c.sub("small cells at L/K = 5: flat within 0.15 bit per doubling", ok, detail);
    }
    report(std::move(c));
}

// ------------------------------------------------------------ criterion 3

void criterion_bounds() {
    Criterion c{"bound ordering at N = 8 and the per-realization chain"};
    for (int l : {16, 64, 256}) {
        SystemParams p = make_params(1, l, 8);
        MonteCarloPlan plan{30, 30, 20, 0};
        const auto est = average_rate(LayoutKind::DA, p, plan, 31);
        const double lb = da_su_avg_lb(l, p).value;
        c.sub("single-user DA average above its bound, L = " + std::to_string(l),
              est.mean >= lb - est.half_width,
              "sim " + f9(est.mean) + " +- " + f9(est.half_width) + " vs bound " + f9(lb));
    }
    for (int l : {16, 64, 256}) {
        SystemParams p = make_params(2, l, 8);
        MonteCarloPlan plan{30, 30, 15, 0};
        const auto est = average_rate(LayoutKind::DA, p, plan, 32);
        const double lb = da_mu_avg_lb(l, 2, p).value;
        c.sub("multi-user DA average above its bound, K = 2, L = " + std::to_string(l),
              est.mean >= lb - est.half_width,
              "sim " + f9(est.mean) + " +- " + f9(est.half_width) + " vs bound " + f9(lb));
    }
    {
        bool ok = true;
        double margin = 1e300;
        RngStream rng = substream(33, 0);
        const int n_list[3] = {2, 4, 8};
        for (int rep = 0; rep < 100; ++rep) {
            SystemParams p = make_params(1, 12, n_list[rep % 3]);
            const auto layout = sample_layout(LayoutKind::DA, p, rng);
            const auto chan = compose_channel(layout, sample_user_position(rng), p, rng);
            const auto br = su_rate_breakdown(chan, p);
            ok = ok && br.waterfilled >= br.equal_power - 1e-9 && br.equal_power >= br.nearest_cluster - 1e-9;
            margin = std::min(margin, std::min(br.waterfilled - br.equal_power, br.equal_power - br.nearest_cluster));
        }
        c.sub("rate chain (water-filled >= equal power >= nearest cluster) on 100 realizations to 1e-9", ok,
              "min margin " + f9(margin));
    }
    report(std::move(c));
}

// ------------------------------------------------------------ criterion 4

void criterion_precoding() {
    Criterion c{"precoding exactness"};
    {
        RngStream rng = substream(41, 0);
        double worst = 0.0;
        for (int rep = 0; rep < 100; ++rep) {
            const int k = 2 + static_cast<int>(uniform01(rng) * 3);
            const int n = 1 + static_cast<int>(uniform01(rng) * 2);
            const int l = k + static_cast<int>(uniform01(rng) * (32 / n - k));
            SystemParams p = make_params(k, l, n);
            const auto layout = sample_layout(LayoutKind::DA, p, rng);
            std::vector<ChannelRealization> chans;
            for (int u = 0; u < k; ++u) chans.push_back(compose_channel(layout, sample_user_position(rng), p, rng));
            const auto pre = bd_precoder(chans, p);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    if (a != b)
                        worst = std::max(worst, (chans[a].G_tilde * pre[b].W).norm() / chans[a].G_tilde.norm());
        }
        c.sub("BD nulling residual < 1e-8 relative on 100 instances (K <= 4, M <= 32)", worst < 1e-8,
              "max " + f9(worst));
    }
    {
        RngStream rng = substream(41, 1);
        bool kkt = true;
        double worst = 0.0;
        for (int rep = 0; rep < 300; ++rep) {
            const int n = 1 + static_cast<int>(uniform01(rng) * 8);
            Eigen::VectorXd eigs(n);
            for (int i = 0; i < n; ++i)
                eigs[i] = uniform01(rng) < 0.2 ? 0.0 : std::pow(10.0, -3 + 5 * uniform01(rng));
            if (eigs.maxCoeff() <= 0.0) eigs[0] = 1.0;
            const double noise = std::pow(10.0, -1 + 2 * uniform01(rng));
            const double budget = std::pow(10.0, -2 + 4 * uniform01(rng));
            const auto wf = waterfill(eigs, budget, noise);
            worst = std::max(worst, std::fabs(wf.powers.sum() - budget) / budget);
            for (int i = 0; i < n; ++i) {
                if (wf.powers[i] > 0.0) kkt = kkt && (wf.water_level - noise / eigs[i] > 0.0);
                else if (eigs[i] > 0.0) kkt = kkt && (wf.water_level <= noise / eigs[i] * (1 + 1e-12));
            }
        }
        c.sub("water-filling KKT form and budget conservation to 1e-9", kkt && worst <= 1e-9,
              "max rel budget err " + f9(worst));
    }
    {
        RngStream rng = substream(41, 2);
        double worst = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            SystemParams p = make_params(1, 4 + rep % 5, 2);
            const auto layout = sample_layout(LayoutKind::DA, p, rng);
            const auto chan = compose_channel(layout, sample_user_position(rng), p, rng);
            const double budget = p.per_user_power() * chan.gamma_norm_sq;
            const auto bd = bd_precoder({chan}, p);
            const auto sv = svd_precoder(chan, budget, 1.0);
            const double r_bd = precode_rate(bd[0].effective_eigs, bd[0].powers, 1.0, p.user_antennas);
            const double r_sv = precode_rate(sv.effective_eigs, sv.powers, 1.0, p.user_antennas);
            worst = std::max(worst, std::fabs(r_bd - r_sv));
        }
        c.sub("K = 1 block diagonalization equals the SVD precoder rate to 1e-9", worst <= 1e-9,
              "max diff " + f9(worst));
    }
    report(std::move(c));
}

// ------------------------------------------------------------ criterion 5

void criterion_random_matrix() {
    Criterion c{"random-matrix law"};
    const int n = 128;
    RngStream rng = substream(51, 0);
    for (int l : {1, 4, 16}) {
        const int m = n * l;
        std::vector<double> eigs;
        const int draws = 50;
        eigs.reserve(static_cast<std::size_t>(draws) * n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(m));
        for (int d = 0; d < draws; ++d) {
            const Eigen::MatrixXcd gt = sample_small_scale(n, m, rng) * scale;
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(gt);
            const auto& sv = svd.singularValues();
            for (int i = 0; i < n; ++i) eigs.push_back(sv[i] * sv[i]);
        }
        const double ks = ks_statistic(eigs, [&](double x) { return mp_cdf(x, static_cast<double>(l)); });
        c.sub("eigenvalue law KS < 0.03 at N = 128, L = " + std::to_string(l), ks < 0.03, "KS " + f9(ks));
    }
    {
        // effective post-projection spectrum mean = (L-K+1)/L
        SystemParams p = make_params(2, 4, 8); // M = 32
        RngStream rng2 = substream(51, 1);
        const double scale = 1.0 / std::sqrt(static_cast<double>(p.bs_antennas()));
        RunningStat stat;
        for (int d = 0; d < 1500; ++d) {
            const Eigen::MatrixXcd other = sample_small_scale(8, 32, rng2) * scale;
            const Eigen::MatrixXcd v0 = null_space_basis(other);
            const Eigen::MatrixXcd eff = (sample_small_scale(8, 32, rng2) * scale) * v0;
            stat.push(eff.squaredNorm() / 8.0);
        }
        const double expect = (4.0 - 2.0 + 1.0) / 4.0;
        c.sub("BD effective mean eigenvalue = (L-K+1)/L +- 1%", std::fabs(stat.mean() / expect - 1.0) <= 0.01,
              "mean " + f9(stat.mean()) + " vs " + f9(expect));
    }
    report(std::move(c));
}

// ------------------------------------------------------------ criterion 6

void criterion_geometry_laws() {
    Criterion c{"geometry laws"};
    {
        double worst = 0.0;
        for (double y : {0.0, 0.3, 0.7, 1.0}) {
            auto f = [&](double x) { return own_cell_distance_pdf(x, y); };
            const double split = std::max(1e-9, 1.0 - y);
            worst = std::max(worst, std::fabs(integrate(f, 0.0, split, {1e-10, 30}) +
                                              integrate(f, split, 1.0 + y, {1e-10, 30}) - 1.0));
        }
        const double cases[][3] = {{0.5, kPi / 6, 1}, {0.0, 0.0, 3}, {0.9, 2.0, 2}, {1.0, kPi / 6, 1}};
        for (const auto& cs : cases) {
            const int i = static_cast<int>(cs[2]);
            const double d = neighbor_center_distance(cs[0], cs[1], i);
            auto f = [&](double x) { return neighbor_cell_distance_pdf(x, cs[0], cs[1], i); };
            worst = std::max(worst, std::fabs(integrate_peaked_low(f, d - 1.0, d + 1.0, {1e-10, 30}) - 1.0));
        }
        auto fm = [&](double x) { return min_access_distance_pdf(x, 0.4, 50); };
        worst = std::max(worst, std::fabs(integrate_peaked_low(fm, 0.0, 0.6, {1e-10, 30}) +
                                          integrate(fm, 0.6, 1.4, {1e-10, 30}) - 1.0));
        c.sub("all pdf normalizations within 1e-6", worst < 1e-6, "max |1-integral| " + f9(worst));
    }
    {
        RngStream rng = substream(61, 0);
        const int samples = 100000;

        std::vector<double> own(samples);
        for (auto& v : own) v = distance({0.5, 0.0}, sample_user_position(rng));
        const double ks_own = ks_statistic(own, [](double x) { return own_cell_distance_cdf(x, 0.5); });
        c.sub("own-cell distance law, KS < 0.02 at 1e5 samples", ks_own < 0.02, "KS " + f9(ks_own));

        const PolarPoint c1 = cell_center(1);
        std::vector<double> nbr(samples);
        for (auto& v : nbr) {
            const PolarPoint local = sample_user_position(rng);
            v = std::hypot(c1.x() + local.x() - 0.5 * std::cos(kPi / 6.0),
                           c1.y() + local.y() - 0.5 * std::sin(kPi / 6.0));
        }
        const double ks_nbr =
            ks_statistic(nbr, [](double x) { return neighbor_cell_distance_cdf(x, 0.5, kPi / 6.0, 1); });
        c.sub("neighbor-cell distance law, KS < 0.02", ks_nbr < 0.02, "KS " + f9(ks_nbr));

        const PolarPoint c2 = cell_center(2);
        std::vector<double> ctr(samples);
        for (auto& v : ctr) {
            const PolarPoint local = sample_user_position(rng);
            v = std::hypot(c2.x() + local.x(), c2.y() + local.y());
        }
        const double ks_ctr =
            ks_statistic(ctr, [](double x) { return neighbor_cell_distance_cdf(x, 0.0, 0.0, 2); });
        c.sub("center-user neighbor law, KS < 0.02", ks_ctr < 0.02, "KS " + f9(ks_ctr));

        std::vector<double> mins(samples);
        for (auto& v : mins) {
            double dmin = 2.0;
            for (int l = 0; l < 50; ++l) dmin = std::min(dmin, sample_user_position(rng).rho);
            v = dmin;
        }
        const double ks_min = ks_statistic(mins, [](double x) { return min_access_distance_cdf(x, 0.0, 50); });
        c.sub("minimum-distance law (L = 50), KS < 0.02", ks_min < 0.02, "KS " + f9(ks_min));
    }
    report(std::move(c));
}

// ------------------------------------------------------------ criterion 7

void criterion_divergence() {
    Criterion c{"cell-edge interference divergence"};
    SystemParams p = make_params(1, 20, 2);
    const auto center = intercell_moment_mc({0.0, 0.0}, 1, p, 1000000, 71);
    const auto edge = intercell_moment_mc({1.0, kPi / 6.0}, 1, p, 1000000, 71);
    c.sub("center running mean converges to 2/3 +- 2% over 1e6 layout draws",
          std::fabs(center.final_mean - 2.0 / 3.0) <= 0.02 * 2.0 / 3.0,
          "mean " + f9(center.final_mean) + ", final-decade drift " + f9(center.final_decade_drift));
    c.sub("edge running mean is non-convergent (final-decade drift > 10x the center's)",
          edge.final_decade_drift > 10.0 * center.final_decade_drift,
          "edge drift " + f9(edge.final_decade_drift) + " vs center " + f9(center.final_decade_drift) +
              ", edge tail index " + f9(edge.tail_index));
    report(std::move(c));
}

// ------------------------------------------------------------ criterion 8

void criterion_edge_variance() {
    Criterion c{"cell-edge rate spread (capped per-user-rate configuration)"};
    SystemParams p = make_params(64, 128, 2);
    const PolarPoint target{0.95, kPi / 6.0};
    MonteCarloPlan plan_ca{30, 1, 25, 0};
    MonteCarloPlan plan_da{6, 40, 25, 0};
    const auto ca = rate_at_position(LayoutKind::CA, target, p, plan_ca, 81);
    const auto da = rate_at_position(LayoutKind::DA, target, p, plan_da, 82);
    const double var_ca = ca.outer_std * ca.outer_std;
    const double var_da = da.outer_std * da.outer_std;
    c.sub("DA per-user rate variance at the cell edge >= 5x the CA variance", var_da >= 5.0 * var_ca,
          "var DA " + f9(var_da) + " vs CA " + f9(var_ca));
    report(std::move(c));
}

} // namespace

int main() {
    std::printf("acceptance suite (desk scale)\n");
    criterion_constants();
    criterion_slopes();
    criterion_bounds();
    criterion_precoding();
    criterion_random_matrix();
    criterion_geometry_laws();
    criterion_divergence();
    criterion_edge_variance();

    int failed = 0;
    for (const auto& r : g_results)
        if (!r.pass) ++failed;
    std::printf("%zu/%zu criteria passed\n", g_results.size() - failed, g_results.size());
    return failed;
}
