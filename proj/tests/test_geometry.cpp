// SPDX-License-Identifier: Apache-2.0
//
// Geometry module tests: cell layout, sampling laws, access-distance
// distributions, and their order statistics.

#include <catch2/catch_amalgamated.hpp>

#include "dlmimo/geometry.hpp"
#include "dlmimo/quadrature.hpp"
#include "dlmimo/stats.hpp"
#include "oracles.hpp"

using namespace dlmimo;

namespace {

SystemParams da_params(int clusters, int n = 2) {
    SystemParams p;
    p.alpha = 4.0;
    p.snr = 10.0;
    p.users = 1;
    p.clusters = clusters;
    p.user_antennas = n;
    return p;
}

} // namespace

TEST_CASE("cell centers", "[geometry]") {
    CHECK(cell_center(0).rho == 0.0);
    for (int i = 1; i <= 6; ++i) {
        CHECK(cell_center(i).rho == 2.0);
        CHECK(cell_center(i).theta == Catch::Approx(i * kPi / 3.0 - kPi / 6.0));
    }
    CHECK_THROWS_AS(cell_center(7), std::domain_error);
    // neighbor center spacing: adjacent centers are 2 apart
    CHECK(distance(cell_center(1), cell_center(2)) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("uniform disk sampling law", "[geometry]") {
    RngStream rng = substream(2024, 1);
    const int n = 200000;
    int below_half = 0;
    double sum_rho = 0.0, sum_theta = 0.0;
    for (int i = 0; i < n; ++i) {
        const PolarPoint p = sample_user_position(rng);
        REQUIRE(p.rho <= 1.0);
        REQUIRE(p.theta >= 0.0);
        REQUIRE(p.theta < 2.0 * kPi);
        if (p.rho <= 0.5) ++below_half;
        sum_rho += p.rho;
        sum_theta += p.theta;
    }
    CHECK(static_cast<double>(below_half) / n == Catch::Approx(0.25).margin(0.005));
    CHECK(sum_rho / n == Catch::Approx(2.0 / 3.0).margin(0.005));
    CHECK(sum_theta / n == Catch::Approx(kPi).margin(0.02));
}

TEST_CASE("layout sampling", "[geometry]") {
    SystemParams p = da_params(200);

    SECTION("CA layout is the deterministic center set") {
        RngStream rng = substream(7, 0);
        const auto layout = sample_layout(LayoutKind::CA, p, rng);
        REQUIRE(layout.clusters_per_cell() == 1);
        CHECK(layout.antennas_per_cluster == p.bs_antennas());
        CHECK(layout.clusters[0][0].rho == 0.0);
        for (int i = 1; i < kCellCount; ++i) {
            CHECK(layout.clusters[i][0].rho == 2.0);
            CHECK(layout.clusters[i][0].theta == Catch::Approx(cell_center_angle(i)));
        }
    }

    SECTION("DA layout: 7L clusters, each within its cell's unit disk") {
        RngStream rng = substream(7, 1);
        const auto layout = sample_layout(LayoutKind::DA, p, rng);
        CHECK(layout.antennas_per_cluster == p.user_antennas);
        for (int i = 0; i < kCellCount; ++i) {
            REQUIRE(static_cast<int>(layout.clusters[i].size()) == 200);
            const PolarPoint c = cell_center(i);
            for (const auto& cl : layout.clusters[i]) CHECK(distance(cl, c) <= 1.0 + 1e-12);
        }
    }

    SECTION("same seed gives the identical realization") {
        RngStream a = substream(99, 5), b = substream(99, 5);
        const auto la = sample_layout(LayoutKind::DA, p, a);
        const auto lb = sample_layout(LayoutKind::DA, p, b);
        for (int i = 0; i < kCellCount; ++i)
            for (std::size_t l = 0; l < la.clusters[i].size(); ++l) {
                CHECK(la.clusters[i][l].rho == lb.clusters[i][l].rho);
                CHECK(la.clusters[i][l].theta == lb.clusters[i][l].theta);
            }
    }
}

TEST_CASE("own-cell distance cdf", "[geometry]") {
    CHECK(own_cell_distance_cdf(0.5, 0.3) == Catch::Approx(0.25).epsilon(1e-12));
    CHECK(own_cell_distance_cdf(1.4, 0.4) == 1.0);
    CHECK(own_cell_distance_cdf(-0.1, 0.4) == 0.0);
    CHECK_THROWS_AS(own_cell_distance_cdf(0.5, 1.2), std::domain_error);

    // lens-branch value frozen from an independent 2-D Monte Carlo oracle
    CHECK(own_cell_distance_cdf(1.0, 0.5) == Catch::Approx(0.6850376424742927).epsilon(1e-9));
    CHECK(own_cell_distance_cdf(0.8, 0.4) == Catch::Approx(0.5627575633144297).epsilon(1e-9));
    const double mc = oracles::mc_disk_distance_cdf(1.0, 0.5, 2000000, 123);
    CHECK(own_cell_distance_cdf(1.0, 0.5) == Catch::Approx(mc).margin(2e-3));

    SECTION("monotone nondecreasing in x") {
        for (double y : {0.0, 0.2, 0.8, 1.0}) {
            double prev = -1.0;
            for (double x = 0.0; x <= 2.05; x += 0.01) {
                const double v = own_cell_distance_cdf(x, y);
                CHECK(v >= prev);
                prev = v;
            }
        }
    }

    SECTION("continuity at the branch boundary x = 1-y") {
        for (double y : {0.1, 0.4, 0.9}) {
            const double left = own_cell_distance_cdf(1.0 - y - 1e-10, y);
            const double right = own_cell_distance_cdf(1.0 - y + 1e-10, y);
            CHECK(left == Catch::Approx(right).margin(1e-8));
        }
    }

    SECTION("numerical derivative matches pdf") {
        const double h = 1e-6;
        for (double y : {0.3, 0.7}) {
            for (double x = 0.05; x < 1.0 + y - 0.05; x += 0.07) {
                const double num = (own_cell_distance_cdf(x + h, y) - own_cell_distance_cdf(x - h, y)) / (2 * h);
                CHECK(num == Catch::Approx(own_cell_distance_pdf(x, y)).margin(1e-4));
            }
        }
    }
}

TEST_CASE("own-cell distance pdf", "[geometry]") {
    CHECK(own_cell_distance_pdf(0.2, 0.5) == Catch::Approx(0.4).epsilon(1e-12));
    CHECK(own_cell_distance_pdf(1.5, 0.5) == Catch::Approx(0.0).margin(1e-9)); // support endpoint
    CHECK(own_cell_distance_pdf(1.6, 0.5) == 0.0);
    CHECK_THROWS_AS(own_cell_distance_pdf(0.5, -0.1), std::domain_error);

    SECTION("normalizes to 1 (independent Simpson oracle)") {
        const double y = 0.7;
        auto f = [&](double x) { return own_cell_distance_pdf(x, y); };
        const double v = oracles::integrate(f, 0.0, 1.0 - y, 1e-12) + oracles::integrate(f, 1.0 - y, 1.0 + y, 1e-12);
        CHECK(v == Catch::Approx(1.0).margin(1e-8));
    }

    SECTION("library quadrature agrees with the Simpson oracle") {
        auto f = [](double x) { return own_cell_distance_pdf(x, 0.4); };
        const double lib = integrate(f, 0.0, 0.6, {1e-11, 30}) + integrate(f, 0.6, 1.4, {1e-11, 30});
        const double simp = oracles::integrate(f, 0.0, 0.6, 1e-12) + oracles::integrate(f, 0.6, 1.4, 1e-12);
        CHECK(lib == Catch::Approx(simp).margin(1e-9));
    }
}

TEST_CASE("neighbor-cell distance pdf", "[geometry]") {
    SECTION("cell-center user: closed form on [1,3], independent of i") {
        for (int i = 1; i <= 6; ++i) {
            for (double x = 1.05; x < 3.0; x += 0.2) {
                const double expect = 2.0 * x / kPi * std::acos((x * x + 3.0) / (4.0 * x));
                CHECK(neighbor_cell_distance_pdf(x, 0.0, 0.0, i) == Catch::Approx(expect).epsilon(1e-12));
            }
            CHECK(neighbor_cell_distance_pdf(1.0, 0.0, 0.0, i) == 0.0); // arccos(1) = 0 at the edge
        }
    }

    SECTION("support is exactly [D-1, D+1]") {
        const double y = 0.7, z = 1.1;
        for (int i = 1; i <= 6; ++i) {
            const double d = neighbor_center_distance(y, z, i);
            CHECK(neighbor_cell_distance_pdf(d - 1.0 - 1e-9, y, z, i) == 0.0);
            CHECK(neighbor_cell_distance_pdf(d + 1.0 + 1e-9, y, z, i) == 0.0);
            CHECK(neighbor_cell_distance_pdf(d, y, z, i) > 0.0);
        }
    }

    SECTION("normalizes to 1") {
        const double y = 1.0, z = kPi / 6.0;
        const int i = 1;
        const double d = neighbor_center_distance(y, z, i);
        auto f = [&](double x) { return neighbor_cell_distance_pdf(x, y, z, i); };
        CHECK(oracles::integrate(f, d - 1.0, d + 1.0, 1e-12) == Catch::Approx(1.0).margin(1e-8));
    }

    SECTION("cdf derivative matches pdf") {
        const double y = 0.5, z = 0.5;
        const int i = 2;
        const double d = neighbor_center_distance(y, z, i);
        const double h = 1e-6;
        for (double x = d - 0.9; x < d + 0.9; x += 0.15) {
            const double num =
                (neighbor_cell_distance_cdf(x + h, y, z, i) - neighbor_cell_distance_cdf(x - h, y, z, i)) /
                (2 * h);
            CHECK(num == Catch::Approx(neighbor_cell_distance_pdf(x, y, z, i)).margin(1e-4));
        }
    }

    SECTION("cell-edge user: support endpoints from the enumerated centers") {
        // user at (1, pi/6): D_i = sqrt(5 - 4 cos((1-i) pi/3))
        for (int i = 1; i <= 6; ++i) {
            const double d = std::sqrt(5.0 - 4.0 * std::cos((1 - i) * kPi / 3.0));
            CHECK(neighbor_center_distance(1.0, kPi / 6.0, i) == Catch::Approx(d).epsilon(1e-12));
        }
        CHECK(neighbor_center_distance(1.0, kPi / 6.0, 1) == Catch::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(neighbor_cell_distance_pdf(1.0, 0.5, 0.0, 0), std::domain_error);
    CHECK_THROWS_AS(neighbor_cell_distance_pdf(1.0, 0.5, 0.0, 7), std::domain_error);
}

TEST_CASE("minimum access distance", "[geometry]") {
    SECTION("single cluster reduces to the plain pdf") {
        for (double x = 0.1; x < 1.4; x += 0.2)
            CHECK(min_access_distance_pdf(x, 0.5, 1) == Catch::Approx(own_cell_distance_pdf(x, 0.5)).epsilon(1e-14));
    }

    SECTION("center user closed form 2Lx(1-x^2)^{L-1}") {
        const int L = 37;
        for (double x = 0.05; x < 1.0; x += 0.1) {
            const double expect = 2.0 * L * x * std::pow(1.0 - x * x, L - 1);
            CHECK(min_access_distance_pdf(x, 0.0, L) == Catch::Approx(expect).epsilon(1e-12));
        }
    }

    SECTION("median of the minimum for a center user, L = 50") {
        // (1 - x^2)^L = 1/2  =>  x = sqrt(1 - 2^{-1/50})
        const double median = std::sqrt(1.0 - std::pow(2.0, -1.0 / 50.0));
        CHECK(median == Catch::Approx(0.11733411910710712).epsilon(1e-12));
        CHECK(min_access_distance_cdf(median, 0.0, 50) == Catch::Approx(0.5).margin(1e-12));

        // empirical minimum over sampled layouts
        SystemParams p = da_params(50);
        RngStream rng = substream(4, 4);
        int below = 0;
        const int reps = 20000;
        for (int r = 0; r < reps; ++r) {
            const auto layout = sample_layout(LayoutKind::DA, p, rng);
            double dmin = 2.0;
            for (const auto& c : layout.clusters[0]) dmin = std::min(dmin, c.rho);
            if (dmin <= median) ++below;
        }
        CHECK(static_cast<double>(below) / reps == Catch::Approx(0.5).margin(0.015));
    }

    SECTION("normalizes to 1") {
        auto f = [](double x) { return min_access_distance_pdf(x, 0.4, 40); };
        const double v = oracles::integrate(f, 0.0, 0.6, 1e-12) + oracles::integrate(f, 0.6, 1.4, 1e-12);
        CHECK(v == Catch::Approx(1.0).margin(1e-6));
    }

    CHECK_THROWS_AS(min_access_distance_pdf(0.5, 0.5, 0), std::domain_error);
}

TEST_CASE("sampled distances follow the analytic laws", "[geometry][ks]") {
    SystemParams p = da_params(10);
    const struct {
        double rho, theta;
    } users[] = {{0.0, 0.0}, {0.5, kPi / 6.0}, {1.0, kPi / 6.0}};

    for (const auto& u : users) {
        const PolarPoint user{u.rho, u.theta};
        RngStream rng = substream(31, static_cast<std::uint64_t>(u.rho * 1000));
        std::vector<double> own, nbr1;
        const int layouts = 10000; // x10 clusters = 1e5 own-cell samples
        own.reserve(layouts * 10);
        nbr1.reserve(layouts * 10);
        for (int i = 0; i < layouts; ++i) {
            const auto layout = sample_layout(LayoutKind::DA, p, rng);
            for (const auto& c : layout.clusters[0]) own.push_back(distance(user, c));
            for (const auto& c : layout.clusters[1]) nbr1.push_back(distance(user, c));
        }
        const double ks_own =
            ks_statistic(own, [&](double x) { return own_cell_distance_cdf(x, u.rho); });
        const double ks_nbr = ks_statistic(
            nbr1, [&](double x) { return neighbor_cell_distance_cdf(x, u.rho, u.theta, 1); });
        INFO("user rho = " << u.rho);
        CHECK(ks_own < 0.02);
        CHECK(ks_nbr < 0.02);
    }
}
