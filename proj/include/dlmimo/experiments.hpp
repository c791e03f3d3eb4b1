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
// Batch experiment harness: named figure reproductions and free-form sweeps,
// emitted as CSV with a JSON metadata sidecar. Output is deterministic in
// the seed: every simulated point derives its own substream, so sharding a
// sweep or changing the thread count never changes a byte of the CSV.
// Figure series reuse one substream family across their grid so curves share
// common random numbers and scaling slopes are not swamped by position noise.

#pragma once

#include <bit>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dlmimo/asymptotics.hpp"
#include "dlmimo/rate_sim.hpp"

namespace dlmimo {

/// %.9g rendering used for every numeric CSV cell.
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json meta;

    std::string to_csv() const {
        std::ostringstream out;
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << columns[c] << (c + 1 < columns.size() ? "," : "");
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << row[c] << (c + 1 < row.size() ? "," : "");
            out << "\n";
        }
        return out.str();
    }

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct ExperimentConfig {
    std::string figure;  // one of fig2 fig3 fig4 fig5a fig5b fig6 fig8 fig9
    std::string target;  // sweep target name

    std::optional<double> alpha;
    std::optional<double> snr_db;
    std::optional<int> users;
    std::optional<int> clusters;
    std::optional<int> user_antennas;
    std::optional<std::string> layout;

    std::vector<int> l_grid, k_grid, n_grid;
    std::vector<double> alpha_grid, snr_db_grid;

    std::optional<std::uint64_t> trials_pos, trials_layout, trials_chan;

    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool full_scale = false;
    int threads = 0;
    int shards = 1;
    int shard_index = 0;
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json::object();
    j["figure"] = c.figure;
    j["target"] = c.target;
    auto put = [&](const char* k, const auto& opt) {
        if (opt) j[k] = *opt;
    };
    put("alpha", c.alpha);
    put("snr_db", c.snr_db);
    put("users", c.users);
    put("clusters", c.clusters);
    put("user_antennas", c.user_antennas);
    put("layout", c.layout);
    j["l_grid"] = c.l_grid;
    j["k_grid"] = c.k_grid;
    j["n_grid"] = c.n_grid;
    j["alpha_grid"] = c.alpha_grid;
    j["snr_db_grid"] = c.snr_db_grid;
    put("trials_pos", c.trials_pos);
    put("trials_layout", c.trials_layout);
    put("trials_chan", c.trials_chan);
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["full_scale"] = c.full_scale;
    j["threads"] = c.threads;
    j["shards"] = c.shards;
    j["shard_index"] = c.shard_index;
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    c = ExperimentConfig{};
    auto get = [&](const char* k, auto& opt) {
        using T = typename std::decay_t<decltype(opt)>::value_type;
        if (j.contains(k)) opt = j.at(k).get<T>();
    };
    if (j.contains("figure")) c.figure = j.at("figure").get<std::string>();
    if (j.contains("target")) c.target = j.at("target").get<std::string>();
    get("alpha", c.alpha);
    get("snr_db", c.snr_db);
    get("users", c.users);
    get("clusters", c.clusters);
    get("user_antennas", c.user_antennas);
    get("layout", c.layout);
    if (j.contains("l_grid")) c.l_grid = j.at("l_grid").get<std::vector<int>>();
    if (j.contains("k_grid")) c.k_grid = j.at("k_grid").get<std::vector<int>>();
    if (j.contains("n_grid")) c.n_grid = j.at("n_grid").get<std::vector<int>>();
    if (j.contains("alpha_grid")) c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    if (j.contains("snr_db_grid")) c.snr_db_grid = j.at("snr_db_grid").get<std::vector<double>>();
    get("trials_pos", c.trials_pos);
    get("trials_layout", c.trials_layout);
    get("trials_chan", c.trials_chan);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("full_scale")) c.full_scale = j.at("full_scale").get<bool>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("shards")) c.shards = j.at("shards").get<int>();
    if (j.contains("shard_index")) c.shard_index = j.at("shard_index").get<int>();
}

inline LayoutKind layout_from_string(const std::string& s) {
    if (s == "ca") return LayoutKind::CA;
    if (s == "da") return LayoutKind::DA;
    if (s == "smallcell") return LayoutKind::SmallCell;
    throw std::invalid_argument("unknown layout '" + s + "' (expected ca, da or smallcell)");
}

namespace detail {

inline SystemParams base_params(const ExperimentConfig& c, double alpha_def, double snr_db_def, int k_def,
                                int l_def, int n_def) {
    SystemParams p;
    p.alpha = c.alpha.value_or(alpha_def);
    p.snr = db_to_linear(c.snr_db.value_or(snr_db_def));
    p.users = c.users.value_or(k_def);
    p.clusters = c.clusters.value_or(l_def);
    p.user_antennas = c.user_antennas.value_or(n_def);
    return p;
}

inline MonteCarloPlan base_plan(const ExperimentConfig& c, std::uint64_t pos_def, std::uint64_t lay_def,
                                std::uint64_t chan_def) {
    MonteCarloPlan plan;
    plan.positions = c.trials_pos.value_or(pos_def);
    plan.layouts = c.trials_layout.value_or(lay_def);
    plan.channels = c.trials_chan.value_or(chan_def);
    plan.threads = c.threads;
    return plan;
}

inline std::uint64_t series_seed(const ExperimentConfig& c, const char* series) {
    return hash_combine(mix64(c.seed), tag64(series));
}

} // namespace detail

// ---------------------------------------------------------------- figures

inline ResultTable run_fig2(const ExperimentConfig& c) {
    SystemParams p = detail::base_params(c, 4.0, 10.0, 1, 50, 2);
    p.validate();
    const auto plan = detail::base_plan(c, 100, 100, 200);
    ResultTable t;
    t.columns = {"series", "min_access_distance", "rate", "half_width"};
    t.meta["params"] = {{"alpha", p.alpha}, {"snr", p.snr}, {"K", p.users}, {"L", p.clusters}, {"N", p.user_antennas}};

    RngStream dummy = substream(c.seed, tag64("fig2-layout"));
    const LayoutRealization ca = sample_layout(LayoutKind::CA, p, dummy);
    const std::uint64_t realizations = plan.positions;

    struct Point { double x, rate, hw; };
    std::vector<Point> ca_pts(realizations), da_pts(realizations);
    parallel_for(realizations, plan.threads, [&](std::uint64_t i) {
        RngStream rng = substream(detail::series_seed(c, "fig2-ca"), i);
        const PolarPoint u = sample_user_position(rng);
        const auto est = single_user_capacity(u, ca, p, plan.channels, rng);
        ca_pts[i] = {u.rho, est.mean, est.half_width};
    });
    parallel_for(realizations, plan.threads, [&](std::uint64_t i) {
        RngStream rng = substream(detail::series_seed(c, "fig2-da"), i);
        const PolarPoint u = sample_user_position(rng);
        const LayoutRealization layout = sample_layout(LayoutKind::DA, p, rng);
        double d1 = std::numeric_limits<double>::infinity();
        for (const auto& cl : layout.clusters[0]) d1 = std::min(d1, distance(u, cl));
        const auto est = single_user_capacity(u, layout, p, plan.channels, rng);
        da_pts[i] = {d1, est.mean, est.half_width};
    });
    for (const auto& q : ca_pts) t.add({"ca-sim", fmt9(q.x), fmt9(q.rate), fmt9(q.hw)});
    for (const auto& q : da_pts) t.add({"da-sim", fmt9(q.x), fmt9(q.rate), fmt9(q.hw)});
    for (int i = 0; i <= 48; ++i) {
        const double d = 0.05 * std::pow(1.0 / 0.05, i / 48.0); // 0.05..1 log-spaced
        t.add({"ca-asymptotic", fmt9(d), fmt9(ca_su_rate(d, p.clusters, p).value), "0"});
    }
    for (int i = 0; i <= 48; ++i) {
        const double d = 0.02 * std::pow(1.2 / 0.02, i / 48.0);
        t.add({"da-lower-bound", fmt9(d), fmt9(da_su_lb(d, p).value), "0"});
    }
    return t;
}

inline ResultTable run_fig3(const ExperimentConfig& c) {
    std::vector<int> grid = c.l_grid.empty() ? std::vector<int>{8, 16, 32, 64, 128, 256, 512} : c.l_grid;
    ResultTable t;
    t.columns = {"L", "ca_sim", "ca_hw", "da_sim", "da_hw", "ca_asym", "da_lb"};
    const auto plan_ca = detail::base_plan(c, 100, 1, 200);
    const auto plan_da = detail::base_plan(c, 100, 100, 200);
    const std::uint64_t seed_ca = detail::series_seed(c, "fig3-ca");
    const std::uint64_t seed_da = detail::series_seed(c, "fig3-da");
    for (int l : grid) {
        SystemParams p = detail::base_params(c, 4.0, 10.0, 1, l, 2);
        p.clusters = l;
        p.validate();
        const auto ca = average_rate(LayoutKind::CA, p, plan_ca, seed_ca);
        const auto da = average_rate(LayoutKind::DA, p, plan_da, seed_da);
        t.add({fmt9(l), fmt9(ca.mean), fmt9(ca.half_width), fmt9(da.mean), fmt9(da.half_width),
               fmt9(ca_su_avg(l, p).value), fmt9(da_su_avg_lb(l, p).value)});
    }
    t.meta["grid"] = grid;
    return t;
}

inline ResultTable run_fig4(const ExperimentConfig& c) {
    SystemParams p = detail::base_params(c, 4.0, 10.0, 50, 200, 2);
    p.validate();
    const std::uint64_t layouts = c.trials_layout.value_or(100);
    ResultTable t;
    t.columns = {"rho", "ca_pint", "da_pint_mean", "da_pint_std"};
    const double theta = kPi / 6.0;
    std::vector<double> grid;
    for (double r = 0.0; r <= 0.951; r += 0.05) grid.push_back(r);
    grid.push_back(0.98);
    for (double rho : grid) {
        const PolarPoint u{rho, theta};
        RunningStat stat;
        for (std::uint64_t i = 0; i < layouts; ++i) {
            RngStream rng = substream(detail::series_seed(c, "fig4-da"), i);
            const LayoutRealization layout = sample_layout(LayoutKind::DA, p, rng);
            stat.push(intercell_power_da(u, layout, p.alpha));
        }
        t.add({fmt9(rho), fmt9(intercell_power_ca(u, p.alpha)), fmt9(stat.mean()), fmt9(stat.stddev())});
    }
    return t;
}

inline ResultTable run_fig5(const ExperimentConfig& c, bool fixed_ratio) {
    std::vector<int> grid;
    if (!c.l_grid.empty()) grid = c.l_grid;
    else if (fixed_ratio) grid = c.full_scale ? std::vector<int>{8, 16, 32, 64, 128, 256}
                                              : std::vector<int>{8, 16, 32, 64, 128};
    else grid = c.full_scale ? std::vector<int>{20, 40, 80, 128, 256} : std::vector<int>{20, 40, 80, 128};
    ResultTable t;
    t.columns = {"L", "K", "ca_sim", "ca_hw", "da_sim", "da_hw", "ca_asym", "da_lb"};
    const auto plan = detail::base_plan(c, 100, 100, 25);
    auto plan_ca = plan;
    plan_ca.layouts = 1;
    const char* tag_ca = fixed_ratio ? "fig5a-ca" : "fig5b-ca";
    const char* tag_da = fixed_ratio ? "fig5a-da" : "fig5b-da";
    for (int l : grid) {
        const int k = fixed_ratio ? l / 2 : c.users.value_or(20);
        SystemParams p = detail::base_params(c, 4.0, 10.0, k, l, 2);
        p.users = k;
        p.clusters = l;
        p.validate();
        const auto ca = average_rate(LayoutKind::CA, p, plan_ca, detail::series_seed(c, tag_ca));
        const auto da = average_rate(LayoutKind::DA, p, plan, detail::series_seed(c, tag_da));
        t.add({fmt9(l), fmt9(k), fmt9(ca.mean), fmt9(ca.half_width), fmt9(da.mean), fmt9(da.half_width),
               fmt9(ca_mu_avg(l, k, p).value), fmt9(da_mu_avg_lb(l, k, p).value)});
    }
    t.meta["grid"] = grid;
    return t;
}

inline ResultTable run_fig6(const ExperimentConfig& c) {
    const int l_def = c.full_scale ? 400 : 128;
    const int k_def = c.full_scale ? 200 : 64;
    SystemParams p = detail::base_params(c, 4.0, 10.0, k_def, l_def, 2);
    p.validate();
    MonteCarloPlan plan = detail::base_plan(c, 10, c.full_scale ? 100 : 50, 20);
    ResultTable t;
    t.columns = {"rho", "ca_rate", "ca_std", "da_rate", "da_std"};
    t.meta["params"] = {{"L", p.clusters}, {"K", p.users}};
    std::vector<double> grid;
    for (double r = 0.1; r <= 0.91; r += 0.1) grid.push_back(r);
    grid.push_back(0.95);
    for (double rho : grid) {
        const PolarPoint target{rho, kPi / 6.0};
        auto plan_ca = plan;
        plan_ca.layouts = 1;
        const auto ca = rate_at_position(LayoutKind::CA, target, p, plan_ca, detail::series_seed(c, "fig6-ca"));
        const auto da = rate_at_position(LayoutKind::DA, target, p, plan, detail::series_seed(c, "fig6-da"));
        t.add({fmt9(rho), fmt9(ca.mean), fmt9(ca.outer_std), fmt9(da.mean), fmt9(da.outer_std)});
    }
    return t;
}

inline ResultTable run_fig8(const ExperimentConfig& c) {
    const int k = c.users.value_or(20);
    ResultTable t;
    t.columns = {"l_over_k", "ca_asym", "da_lb"};
    std::vector<int> ratios = {2, 3, 4, 6, 8, 12, 16, 24, 32};
    for (int r : ratios) {
        SystemParams p = detail::base_params(c, 4.0, 10.0, k, r * k, 2);
        p.users = k;
        p.clusters = r * k;
        p.validate();
        t.add({fmt9(r), fmt9(ca_mu_avg_large_l(r * k, k, p).value), fmt9(da_mu_avg_lb(r * k, k, p).value)});
    }
    return t;
}

inline ResultTable run_fig9(const ExperimentConfig& c) {
    std::vector<int> grid = c.l_grid.empty() ? std::vector<int>{10, 20, 40, 80} : c.l_grid;
    ResultTable t;
    t.columns = {"L", "K", "sc_sim", "sc_hw", "da_sim", "da_hw", "sc_lb", "da_lb"};
    const auto plan = detail::base_plan(c, 100, 100, 25);
    for (int l : grid) {
        const int k = std::max(1, l / 5);
        SystemParams p = detail::base_params(c, 4.0, 10.0, k, l, 2);
        p.users = k;
        p.clusters = l;
        p.validate();
        const auto sc = average_rate(LayoutKind::SmallCell, p, plan, detail::series_seed(c, "fig9-sc"));
        const auto da = average_rate(LayoutKind::DA, p, plan, detail::series_seed(c, "fig9-da"));
        t.add({fmt9(l), fmt9(k), fmt9(sc.mean), fmt9(sc.half_width), fmt9(da.mean), fmt9(da.half_width),
               fmt9(sc_avg_lb(l, k, p).value), fmt9(da_mu_avg_lb(l, k, p).value)});
    }
    t.meta["grid"] = grid;
    return t;
}

inline ResultTable run_figure(const std::string& id, const ExperimentConfig& c) {
    ResultTable t;
    if (id == "fig2") t = run_fig2(c);
    else if (id == "fig3") t = run_fig3(c);
    else if (id == "fig4") t = run_fig4(c);
    else if (id == "fig5a") t = run_fig5(c, true);
    else if (id == "fig5b") t = run_fig5(c, false);
    else if (id == "fig6") t = run_fig6(c);
    else if (id == "fig8") t = run_fig8(c);
    else if (id == "fig9") t = run_fig9(c);
    else throw std::invalid_argument("unknown figure id '" + id + "'");
    t.meta["figure"] = id;
    t.meta["seed"] = c.seed;
    return t;
}

// ---------------------------------------------------------------- sweeps

namespace detail {

struct SweepPoint {
    double alpha, snr_db;
    int users, clusters, user_antennas;
    LayoutKind layout;
    std::uint64_t seed;
};

struct SweepOutput {
    double value = 0.0;
    double half_width = 0.0;
    const char* formula_id = "";
};

inline SystemParams point_params(const SweepPoint& pt) {
    SystemParams p;
    p.alpha = pt.alpha;
    p.snr = db_to_linear(pt.snr_db);
    p.users = pt.users;
    p.clusters = pt.clusters;
    p.user_antennas = pt.user_antennas;
    p.validate();
    return p;
}

} // namespace detail

/// Free-form sweep over the exposed closed forms and the Monte Carlo average
/// rate. Grid = cartesian product of the provided value lists; at least one
/// list is required. Every point is seeded by hash(seed, coordinates), so the
/// table is independent of sharding.
inline ResultTable run_sweep(const ExperimentConfig& c) {
    if (c.target.empty()) throw std::invalid_argument("sweep needs a target");
    using detail::SweepOutput;
    using detail::SweepPoint;
    static const std::map<std::string, std::function<SweepOutput(const SweepPoint&, const ExperimentConfig&)>>
        registry = {
            {"psi_c", [](const SweepPoint& pt, const ExperimentConfig&) {
                 return SweepOutput{psi_c(pt.alpha), 0.0, "psi-c"};
             }},
            {"psi_d", [](const SweepPoint& pt, const ExperimentConfig&) {
                 return SweepOutput{psi_d(pt.alpha), 0.0, "psi-d"};
             }},
            {"upsilon", [](const SweepPoint& pt, const ExperimentConfig&) {
                 return SweepOutput{upsilon(pt.alpha), 0.0, "upsilon"};
             }},
            {"ca_su_avg", [](const SweepPoint& pt, const ExperimentConfig&) {
                 const auto v = ca_su_avg(pt.clusters, detail::point_params(pt));
                 return SweepOutput{v.value, 0.0, v.formula_id};
             }},
            {"ca_su_avg_large_l", [](const SweepPoint& pt, const ExperimentConfig&) {
                 const auto v = ca_su_avg_large_l(pt.clusters, detail::point_params(pt));
                 return SweepOutput{v.value, 0.0, v.formula_id};
             }},
            {"da_su_avg_lb", [](const SweepPoint& pt, const ExperimentConfig&) {
                 const auto v = da_su_avg_lb(pt.clusters, detail::point_params(pt));
                 return SweepOutput{v.value, 0.0, v.formula_id};
             }},
            {"ca_mu_avg", [](const SweepPoint& pt, const ExperimentConfig&) {
                 const auto v = ca_mu_avg(pt.clusters, pt.users, detail::point_params(pt));
                 return SweepOutput{v.value, 0.0, v.formula_id};
             }},
            {"ca_mu_avg_large_l", [](const SweepPoint& pt, const ExperimentConfig&) {
                 const auto v = ca_mu_avg_large_l(pt.clusters, pt.users, detail::point_params(pt));
                 return SweepOutput{v.value, 0.0, v.formula_id};
             }},
            {"da_mu_avg_lb", [](const SweepPoint& pt, const ExperimentConfig&) {
                 const auto v = da_mu_avg_lb(pt.clusters, pt.users, detail::point_params(pt));
                 return SweepOutput{v.value, 0.0, v.formula_id};
             }},
            {"sc_avg_lb", [](const SweepPoint& pt, const ExperimentConfig&) {
                 const auto v = sc_avg_lb(pt.clusters, pt.users, detail::point_params(pt));
                 return SweepOutput{v.value, 0.0, v.formula_id};
             }},
            {"sc_avg_lb_exact", [](const SweepPoint& pt, const ExperimentConfig&) {
                 const auto v = sc_avg_lb_exact(pt.clusters, pt.users, detail::point_params(pt));
                 return SweepOutput{v.value, 0.0, v.formula_id};
             }},
            {"avg_rate", [](const SweepPoint& pt, const ExperimentConfig& cfg) {
                 const auto plan = detail::base_plan(cfg, 100, 100, 200);
                 const auto est = average_rate(pt.layout, detail::point_params(pt), plan, pt.seed);
                 return SweepOutput{est.mean, est.half_width, "avg-rate-mc"};
             }},
        };
    const auto it = registry.find(c.target);
    if (it == registry.end()) throw std::invalid_argument("unknown sweep target '" + c.target + "'");

    const bool any_grid = !(c.alpha_grid.empty() && c.snr_db_grid.empty() && c.l_grid.empty() &&
                            c.k_grid.empty() && c.n_grid.empty());
    if (!any_grid) throw std::invalid_argument("empty sweep");

    const std::vector<double> alphas = c.alpha_grid.empty() ? std::vector<double>{c.alpha.value_or(4.0)} : c.alpha_grid;
    const std::vector<double> snrs = c.snr_db_grid.empty() ? std::vector<double>{c.snr_db.value_or(10.0)} : c.snr_db_grid;
    const std::vector<int> ks = c.k_grid.empty() ? std::vector<int>{c.users.value_or(1)} : c.k_grid;
    const std::vector<int> ls = c.l_grid.empty() ? std::vector<int>{c.clusters.value_or(std::max(1, c.users.value_or(1)))} : c.l_grid;
    const std::vector<int> ns = c.n_grid.empty() ? std::vector<int>{c.user_antennas.value_or(2)} : c.n_grid;
    const LayoutKind layout = layout_from_string(c.layout.value_or("da"));

    ResultTable t;
    t.columns = {"alpha", "snr_db", "users", "clusters", "user_antennas",
                 "layout", "target", "value", "half_width", "formula_id"};
    t.meta["target"] = c.target;
    t.meta["seed"] = c.seed;

    std::size_t index = 0;
    for (double a : alphas)
        for (double s : snrs)
            for (int k : ks)
                for (int l : ls)
                    for (int n : ns) {
                        const std::size_t my_index = index++;
                        if (c.shards > 1 && static_cast<int>(my_index % static_cast<std::size_t>(c.shards)) != c.shard_index)
                            continue;
                        detail::SweepPoint pt;
                        pt.alpha = a;
                        pt.snr_db = s;
                        pt.users = k;
                        pt.clusters = l;
                        pt.user_antennas = n;
                        pt.layout = layout;
                        std::uint64_t h = mix64(c.seed);
                        h = hash_combine(h, std::bit_cast<std::uint64_t>(a));
                        h = hash_combine(h, std::bit_cast<std::uint64_t>(s));
                        h = hash_combine(h, static_cast<std::uint64_t>(k));
                        h = hash_combine(h, static_cast<std::uint64_t>(l));
                        h = hash_combine(h, static_cast<std::uint64_t>(n));
                        pt.seed = h;
                        const auto out = it->second(pt, c);
                        t.add({fmt9(a), fmt9(s), fmt9(k), fmt9(l), fmt9(n), to_string(layout), c.target,
                               fmt9(out.value), fmt9(out.half_width), out.formula_id});
                    }
    if (t.rows.empty() && c.shards <= 1) throw std::invalid_argument("empty sweep");
    return t;
}

// ---------------------------------------------------------------- validate

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Fast self-check battery over the library invariants; the CLI `validate`
/// subcommand prints one line per entry.
inline std::vector<CheckResult> validate_invariants() {
    std::vector<CheckResult> out;
    auto check = [&](const std::string& name, bool pass, const std::string& detail) {
        out.push_back({name, pass, detail});
    };

    { // pdf normalizations
        double worst = 0.0;
        for (double y : {0.0, 0.3, 0.7, 1.0}) {
            auto f = [&](double x) { return own_cell_distance_pdf(x, y); };
            double v = integrate(f, 0.0, std::max(1e-9, 1.0 - y), {1e-10, 30}) +
                       integrate(f, std::max(1e-9, 1.0 - y), 1.0 + y, {1e-10, 30});
            worst = std::max(worst, std::fabs(v - 1.0));
        }
        check("own-cell pdf normalization", worst < 1e-6, "max |1-integral| = " + fmt9(worst));
    }
    {
        double worst = 0.0;
        const double cases[][3] = {{0.5, kPi / 6, 1}, {0.0, 0.0, 3}, {0.9, 2.0, 2}, {1.0, kPi / 6, 1}};
        for (const auto& cs : cases) {
            const int i = static_cast<int>(cs[2]);
            const double d = neighbor_center_distance(cs[0], cs[1], i);
            auto f = [&](double x) { return neighbor_cell_distance_pdf(x, cs[0], cs[1], i); };
            const double v = integrate_peaked_low(f, d - 1.0, d + 1.0, {1e-10, 30});
            worst = std::max(worst, std::fabs(v - 1.0));
        }
        check("neighbor pdf normalization", worst < 1e-6, "max |1-integral| = " + fmt9(worst));
    }
    {
        auto f = [&](double x) { return min_access_distance_pdf(x, 0.4, 50); };
        const double v = integrate_peaked_low(f, 0.0, 0.6, {1e-10, 30}) + integrate(f, 0.6, 1.4, {1e-10, 30});
        check("min-distance pdf normalization", std::fabs(v - 1.0) < 1e-6, "|1-integral| = " + fmt9(std::fabs(v - 1.0)));
    }
    {
        double worst = 0.0;
        const double y = 0.6;
        for (double x = 0.05; x < 1.55; x += 0.1) {
            const double h = 1e-5;
            const double num = (own_cell_distance_cdf(x + h, y) - own_cell_distance_cdf(x - h, y)) / (2 * h);
            worst = std::max(worst, std::fabs(num - own_cell_distance_pdf(x, y)));
        }
        check("own-cell cdf derivative = pdf", worst < 1e-4, "max diff = " + fmt9(worst));
    }
    {
        RngStream rng = substream(99, 1);
        bool ok = true;
        double worst = 0.0;
        for (int rep = 0; rep < 200 && ok; ++rep) {
            const int n = 1 + static_cast<int>(uniform01(rng) * 7);
            Eigen::VectorXd eigs(n);
            for (int i = 0; i < n; ++i) eigs[i] = uniform01(rng) < 0.15 ? 0.0 : std::pow(10.0, -2 + 3 * uniform01(rng));
            if (eigs.maxCoeff() <= 0.0) eigs[0] = 1.0;
            const double budget = std::pow(10.0, -1 + 3 * uniform01(rng));
            const auto wf = waterfill(eigs, budget, 1.0);
            worst = std::max(worst, std::fabs(wf.powers.sum() - budget) / budget);
            for (int i = 0; i < n; ++i) {
                if (wf.powers[i] > 0.0 && !(wf.water_level - 1.0 / eigs[i] > 0.0)) ok = false;
                if (wf.powers[i] == 0.0 && eigs[i] > 0.0 && !(wf.water_level <= 1.0 / eigs[i] + 1e-12)) ok = false;
            }
        }
        check("water-filling KKT + budget", ok && worst < 1e-9, "max rel budget err = " + fmt9(worst));
    }
    {
        RngStream rng = substream(7, 3);
        double worst = 0.0;
        SystemParams p;
        p.alpha = 4.0; p.snr = 10.0; p.users = 2; p.clusters = 4; p.user_antennas = 2;
        for (int rep = 0; rep < 10; ++rep) {
            const LayoutRealization layout = sample_layout(LayoutKind::DA, p, rng);
            std::vector<ChannelRealization> chans;
            for (int k = 0; k < p.users; ++k)
                chans.push_back(compose_channel(layout, sample_user_position(rng), p, rng));
            const auto pre = bd_precoder(chans, p);
            for (int k = 0; k < p.users; ++k)
                for (int j = 0; j < p.users; ++j) {
                    if (j == k) continue;
                    worst = std::max(worst, (chans[k].G_tilde * pre[j].W).norm() / chans[k].G_tilde.norm());
                }
        }
        check("bd nulling residual", worst < 1e-8, "max rel residual = " + fmt9(worst));
    }
    {
        const double v = upsilon(4.0);
        check("upsilon(4) = 1/9", std::fabs(v - 1.0 / 9.0) < 1e-4, "value = " + fmt9(v));
    }
    {
        const double v0 = intercell_power_ca({0.0, 0.0}, 4.0);
        const double v1 = intercell_power_ca({1.0, kPi / 6.0}, 4.0);
        double per = 0.0;
        for (double r = 0.1; r < 1.0; r += 0.22)
            for (double th = 0.0; th < 2.0; th += 0.37)
                per = std::max(per, std::fabs(intercell_power_ca({r, th}, 4.0) -
                                              intercell_power_ca({r, th + kPi / 3.0}, 4.0)));
        check("intercell CA landmarks", v0 == 0.375 && v1 > 1.27 && v1 < 1.28 && per < 1e-12,
              "center = " + fmt9(v0) + ", edge = " + fmt9(v1) + ", periodicity err = " + fmt9(per));
    }
    {
        auto f = [&](double x) { return mp_density(x, 4.0); };
        auto [lo, hi] = mp_support(4.0);
        const double norm = integrate(f, lo, hi, {1e-10, 30});
        auto g = [&](double x) { return x * mp_density(x, 4.0); };
        const double mean = integrate(g, lo, hi, {1e-10, 30});
        check("mp density normalization/mean", std::fabs(norm - 1.0) < 1e-8 && std::fabs(mean - 1.0) < 1e-8,
              "norm = " + fmt9(norm) + ", mean = " + fmt9(mean));
    }
    {
        bool ok = true;
        double prev_x = 0.0, prev_v = 0.0, prev_slope = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double x = std::pow(10.0, -3.0 + 6.0 * i / 40.0);
            const double v = phi(x);
            if (i > 0) {
                if (v <= prev_v) ok = false;
                const double slope = (v - prev_v) / (x - prev_x); // divided differences must decrease
                if (i > 1 && slope > prev_slope * (1.0 + 1e-12)) ok = false;
                prev_slope = slope;
            }
            prev_x = x;
            prev_v = v;
        }
        check("phi increasing and concave", ok, "");
    }
    {
        SystemParams p;
        p.alpha = 4.0; p.snr = 10.0; p.users = 1; p.clusters = 8; p.user_antennas = 2;
        MonteCarloPlan plan{4, 3, 5, 2};
        const auto a = average_rate(LayoutKind::DA, p, plan, 42);
        const auto b = average_rate(LayoutKind::DA, p, plan, 42);
        check("average_rate determinism", a.mean == b.mean && a.half_width == b.half_width,
              "mean = " + fmt9(a.mean));
    }
    return out;
}

// ---------------------------------------------------------------- output

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

/// Generic reader-side plot script, written once into the output directory.
inline std::string plot_script() {
    return R"(#!/usr/bin/env python3
"""Plot any dlmimo CSV (pass one or more CSV paths).

Long format (a 'series' column): one line per series over column 2.
Wide format: every value column against the first column; *_hw / *_std
columns become error bars of the matching value column.
"""
import csv, sys, os

try:
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib required")

def load(path):
    with open(path) as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]

def plot(path, ax):
    header, rows = load(path)
    if header[0] == "series":
        series = {}
        for r in rows:
            series.setdefault(r[0], []).append((float(r[1]), float(r[2])))
        for name, pts in series.items():
            pts.sort()
            marker = "o" if name.endswith("sim") else None
            ls = "" if name.endswith("sim") else "-"
            ax.plot([p[0] for p in pts], [p[1] for p in pts], label=name, marker=marker, linestyle=ls, ms=3)
        ax.set_xlabel(header[1])
    else:
        xs = [float(r[0]) for r in rows]
        err = {}
        vals = {}
        for c, name in enumerate(header[1:], start=1):
            col = [float(r[c]) for r in rows]
            base = name.rsplit("_", 1)[0]
            if name.endswith(("_hw", "_std")):
                err[base] = col
            else:
                vals[name] = col
        for name, col in vals.items():
            ax.errorbar(xs, col, yerr=err.get(name), label=name, capsize=2)
        ax.set_xlabel(header[0])
    ax.set_ylabel("value")
    ax.legend(fontsize=8)
    ax.set_title(os.path.basename(path))

if __name__ == "__main__":
    paths = sys.argv[1:]
    if not paths:
        sys.exit("usage: plot.py file.csv [more.csv ...]")
    fig, axes = plt.subplots(1, len(paths), figsize=(6 * len(paths), 4.5), squeeze=False)
    for path, ax in zip(paths, axes[0]):
        plot(path, ax)
    fig.tight_layout()
    out = "plots.png"
    fig.savefig(out, dpi=130)
    print("wrote", out)
)";
}

} // namespace dlmimo
