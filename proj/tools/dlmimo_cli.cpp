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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "dlmimo/dlmimo.hpp"

namespace {

using dlmimo::ExperimentConfig;

void load_config_file(const std::string& path, ExperimentConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path);
    nlohmann::json j;
    in >> j;
    dlmimo::from_json(j, cfg);
}

struct CliOverrides {
    ExperimentConfig values;
    // CLI11 keeps count() per option; we re-apply only the flags the user set
};

void add_common_flags(CLI::App* app, ExperimentConfig& cfg) {
    app->add_option("--config", [&cfg](const std::vector<std::string>& paths) {
        load_config_file(paths.back(), cfg);
        return true;
    }, "JSON config file (flags override file values)");
    app->add_option_function<double>("--alpha", [&cfg](double v) { cfg.alpha = v; }, "path-loss exponent (> 2)");
    app->add_option_function<double>("--snr-db", [&cfg](double v) { cfg.snr_db = v; }, "P_t/N0 in dB");
    app->add_option_function<int>("--users", [&cfg](int v) { cfg.users = v; }, "users per cell K");
    app->add_option_function<int>("--clusters", [&cfg](int v) { cfg.clusters = v; }, "antenna clusters per cell L");
    app->add_option_function<int>("--user-antennas", [&cfg](int v) { cfg.user_antennas = v; },
                                  "antennas per user N");
    app->add_option_function<std::string>("--layout", [&cfg](const std::string& v) { cfg.layout = v; },
                                          "layout: ca, da or smallcell")
        ->check(CLI::IsMember({"ca", "da", "smallcell"}));
    app->add_option_function<std::uint64_t>("--trials-pos", [&cfg](std::uint64_t v) { cfg.trials_pos = v; },
                                            "user-position draws");
    app->add_option_function<std::uint64_t>("--trials-layout", [&cfg](std::uint64_t v) { cfg.trials_layout = v; },
                                            "antenna-layout draws");
    app->add_option_function<std::uint64_t>("--trials-chan", [&cfg](std::uint64_t v) { cfg.trials_chan = v; },
                                            "small-scale channel draws");
    app->add_option("--seed", cfg.seed, "base RNG seed");
    app->add_option("--out", cfg.out_dir, "output directory");
    app->add_flag("--full", cfg.full_scale, "full-scale configuration (heaviest figures)");
    app->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    app->add_option("--shards", cfg.shards, "total shards for sweep splitting");
    app->add_option("--shard-index", cfg.shard_index, "this shard's index");
    app->add_option("--l-list", cfg.l_grid, "cluster-count grid")->delimiter(',');
    app->add_option("--k-list", cfg.k_grid, "user-count grid")->delimiter(',');
    app->add_option("--n-list", cfg.n_grid, "user-antenna grid")->delimiter(',');
    app->add_option("--alpha-list", cfg.alpha_grid, "path-loss grid")->delimiter(',');
    app->add_option("--snr-db-list", cfg.snr_db_grid, "SNR grid in dB")->delimiter(',');
}

void write_outputs(const dlmimo::ResultTable& table, const ExperimentConfig& cfg, const std::string& stem,
                   double wall_ms) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string csv_path = (fs::path(cfg.out_dir) / (stem + ".csv")).string();
    dlmimo::write_text_file(csv_path, table.to_csv());

    nlohmann::json meta;
    meta["result"] = table.meta;
    nlohmann::json cfg_echo;
    dlmimo::to_json(cfg_echo, cfg);
    meta["config"] = cfg_echo;
    meta["wall_ms"] = wall_ms;
    dlmimo::write_text_file((fs::path(cfg.out_dir) / (stem + ".meta.json")).string(), meta.dump(2) + "\n");

    const std::string plot_path = (fs::path(cfg.out_dir) / "plot.py").string();
    if (!fs::exists(plot_path)) dlmimo::write_text_file(plot_path, dlmimo::plot_script());
    std::cout << "wrote " << csv_path << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"downlink MIMO cellular rate experiments: co-located vs distributed vs small-cell layouts"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string figure_id;

    CLI::App* fig = app.add_subcommand("figure", "reproduce one named figure as CSV");
    fig->add_option("id", figure_id, "fig2 fig3 fig4 fig5a fig5b fig6 fig8 fig9")->required();
    add_common_flags(fig, cfg);

    CLI::App* sweep = app.add_subcommand("sweep", "free-form parameter sweep");
    sweep->add_option("--target", cfg.target,
                      "psi_c psi_d upsilon ca_su_avg ca_su_avg_large_l da_su_avg_lb ca_mu_avg "
                      "ca_mu_avg_large_l da_mu_avg_lb sc_avg_lb sc_avg_lb_exact avg_rate");
    add_common_flags(sweep, cfg);

    CLI::App* validate = app.add_subcommand("validate", "run the library invariant suite");
    validate->add_option("--threads", cfg.threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto start = std::chrono::steady_clock::now();
        if (fig->parsed()) {
            cfg.figure = figure_id;
            const auto table = dlmimo::run_figure(figure_id, cfg);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            write_outputs(table, cfg, figure_id, ms);
        } else if (sweep->parsed()) {
            const auto table = dlmimo::run_sweep(cfg);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            const std::string stem = cfg.shards > 1 ? "sweep_" + cfg.target + "_shard" + std::to_string(cfg.shard_index)
                                                    : "sweep_" + cfg.target;
            write_outputs(table, cfg, stem, ms);
        } else if (validate->parsed()) {
            const auto checks = dlmimo::validate_invariants();
            bool all = true;
            for (const auto& c : checks) {
                std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
                if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
                std::cout << "\n";
                all = all && c.pass;
            }
            return all ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
