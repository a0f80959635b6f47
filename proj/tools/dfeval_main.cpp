// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dfeval/errors.hpp"
#include "dfeval/evaluation.hpp"
#include "dfeval/flightreplay.hpp"
#include "dfeval/modeselect.hpp"

namespace {

using namespace dfeval;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

PortSet parse_ports(const std::string& spec) {
    if (spec.rfind("fourier:", 0) == 0)
        return fourier_port_set(std::stoul(spec.substr(8)));
    if (spec == "cupola-analytic")
        return cupola_analytic_port_set();
    if (spec.rfind("file:", 0) == 0)
        return load_pattern_file(spec.substr(5));
    throw std::invalid_argument("unknown ports spec '" + spec +
                                "' (expected fourier:<P>, cupola-analytic or file:<path>)");
}

DoaGrid parse_grid(const std::string& spec) {
    if (spec.rfind("hemisphere:", 0) == 0)
        return hemisphere_grid(std::stoul(spec.substr(11)));
    if (spec.rfind("equiangular:", 0) == 0)
        return equiangular_grid(std::stod(spec.substr(12)));
    throw std::invalid_argument("unknown grid spec '" + spec +
                                "' (expected hemisphere:<n> or equiangular:<step>)");
}

std::string out_path(const std::string& dir, const std::string& file) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / file).string();
}

struct CommonOpts {
    std::string ports = "fourier:3";
    std::string grid = "hemisphere:341";
    std::string candidate_grid; // defaults to --grid
    double snr_db = -10.0;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::string out_dir = "dfeval_out";
    std::size_t workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_ports = true) {
    if (with_ports)
        cmd->add_option("--ports", o.ports, "fourier:<P>, cupola-analytic or file:<path>");
    cmd->add_option("--grid", o.grid, "hemisphere:<n> or equiangular:<step_deg>");
    cmd->add_option("--candidate-grid", o.candidate_grid, "search grid (default: --grid)");
    cmd->add_option("--snr", o.snr_db, "SNR in dB");
    cmd->add_option("--trials", o.trials, "Monte-Carlo trials per DoA");
    cmd->add_option("--seed", o.seed, "master seed (always recorded in outputs)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--workers", o.workers, "worker thread count")
        ->envname("DFEVAL_WORKERS");
}

int cmd_eval(const CommonOpts& o, bool keep_trials, bool adaptive_stop) {
    PortSet ports = parse_ports(o.ports);
    DoaGrid true_grid = parse_grid(o.grid);
    DoaGrid cand_grid = o.candidate_grid.empty() ? true_grid : parse_grid(o.candidate_grid);

    MonteCarloConfig cfg;
    cfg.snr_db = o.snr_db;
    cfg.trials_per_doa = o.trials;
    cfg.master_seed = o.seed;
    cfg.workers = std::max<std::size_t>(1, o.workers);
    cfg.keep_trials = keep_trials;
    cfg.ports_label = o.ports;

    EvalReport report = adaptive_stop
                            ? run_monte_carlo_adaptive(ports, true_grid, cand_grid, cfg)
                            : run_monte_carlo(ports, true_grid, cand_grid, cfg);
    write_report_json(report, out_path(o.out_dir, "report.json"));
    write_report_csv(report, out_path(o.out_dir, "report.csv"));
    write_histogram_csv(report, out_path(o.out_dir, "histogram.csv"));
    if (keep_trials)
        write_trials_csv(report, out_path(o.out_dir, "trials.csv"));
    std::cout << "eval: rmse_az=" << report.rmse_az << " rmse_el=" << report.rmse_el
              << " rmse_gc=" << report.rmse_gc << " deg (" << report.per_doa.size()
              << " DoAs, seed " << o.seed << ")\n";
    if (report.skipped_doas > 0)
        std::cerr << "warning: " << report.skipped_doas
                  << " true DoAs skipped (vanishing steering vector)\n";
    return kExitOk;
}

int cmd_rank_modes(const CommonOpts& o, const std::string& structure_path,
                   double max_eigenvalue) {
    StructureRecord s = load_structure_json(structure_path);
    DoaGrid true_grid = parse_grid(o.grid);
    DoaGrid cand_grid = o.candidate_grid.empty() ? true_grid : parse_grid(o.candidate_grid);

    std::vector<ModeSet> sets = enumerate_admissible_sets(s, max_eigenvalue);
    if (sets.empty())
        std::cerr << "warning: no admissible mode set for structure " << s.name << "\n";
    RankConfig rc;
    rc.snr_db = o.snr_db;
    rc.trials_per_doa = o.trials;
    rc.master_seed = o.seed;
    rc.workers = std::max<std::size_t>(1, o.workers);
    std::vector<ModeSet> ranked = rank_sets(s, std::move(sets), true_grid, cand_grid, rc);
    save_ranking_csv(s, ranked, out_path(o.out_dir, "ranking.csv"),
                     {"structure=" + structure_path + " grid=" + true_grid.describe() +
                      " candidate_grid=" + cand_grid.describe() + " snr_db=" +
                      std::to_string(o.snr_db) + " trials=" + std::to_string(o.trials) +
                      " seed=" + std::to_string(o.seed) +
                      " max_eigenvalue=" + std::to_string(max_eigenvalue)});
    std::cout << "rank-modes: " << ranked.size() << " admissible sets ranked\n";
    return kExitOk;
}

int cmd_replay(const CommonOpts& o, const std::string& track_path, double outlier_threshold) {
    Track track = load_track_csv(track_path);
    std::vector<DoaPair> pairs;
    if (track.steering_mode) {
        PortSet ports = parse_ports(o.ports);
        if (ports.port_count() != track.port_count)
            throw std::invalid_argument("replay: port count of --ports does not match track");
        DoaGrid grid = o.candidate_grid.empty() ? equiangular_grid(5.0)
                                                : parse_grid(o.candidate_grid);
        pairs = replay_track(track.samples, ports, grid);
    } else {
        pairs = replay_track(track.samples, PortSet{}, DoaGrid{});
    }
    auto [corrected, offset] = apply_azimuth_offset(pairs);
    TrackReport report = filtered_stats(corrected, outlier_threshold);
    report.offset_deg = offset;
    report.bins = elevation_binned_boxplots(corrected, default_elevation_bins());
    const std::string echo = "track=" + track_path +
                             " mode=" + (track.steering_mode ? "steering" : "estimated") +
                             " threshold=" + std::to_string(outlier_threshold) +
                             " seed=" + std::to_string(o.seed);
    write_track_report_json(report, out_path(o.out_dir, "track_report.json"), echo);
    write_track_bins_csv(report, out_path(o.out_dir, "track_bins.csv"), echo);
    std::cout << "replay: offset=" << offset << " deg, rmse_az=" << report.rmse_az
              << " rmse_el=" << report.rmse_el << " deg, excluded "
              << 100.0 * report.excluded_fraction << "%\n";
    return kExitOk;
}

int cmd_gen_pattern(const std::string& kind, double step_deg, const std::string& out_file) {
    PortSet ports = parse_ports(kind);
    PortSet sampled = sample_port_set(ports, step_deg);
    char step_buf[32];
    std::snprintf(step_buf, sizeof(step_buf), "%g", step_deg);
    save_pattern_file(sampled, out_file,
                      {"config kind=" + kind + " step_deg=" + step_buf});
    std::cout << "gen-pattern: wrote " << sampled.port_count() << " ports to " << out_file
              << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Statistical evaluation toolkit for direction-finding antennas"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file (flags take precedence)");

    CommonOpts eval_opts;
    bool keep_trials = false, adaptive_stop = false;
    auto* eval = app.add_subcommand("eval", "Monte-Carlo RMSE evaluation");
    add_common(eval, eval_opts);
    eval->add_flag("--keep-trials", keep_trials, "export per-trial errors");
    eval->add_flag("--adaptive-stop", adaptive_stop,
                   "double trials until histograms stabilize");

    CommonOpts rank_opts;
    std::string structure_path;
    double max_eigenvalue = 3.0;
    auto* rank = app.add_subcommand("rank-modes", "rank admissible characteristic-mode sets");
    add_common(rank, rank_opts, false);
    rank->add_option("--structure", structure_path, "structure JSON file")->required();
    rank->add_option("--max-eigenvalue", max_eigenvalue, "admissibility threshold on |lambda|");

    CommonOpts replay_opts;
    std::string track_path;
    double outlier_threshold = 90.0;
    auto* replay = app.add_subcommand("replay", "post-process a flight track");
    add_common(replay, replay_opts);
    replay->add_option("--track", track_path, "track CSV file")->required();
    replay->add_option("--outlier-threshold", outlier_threshold,
                       "azimuth outlier threshold in deg");

    std::string gen_kind = "fourier:3", gen_out = "pattern.csv";
    double gen_step = 5.0;
    auto* gen = app.add_subcommand("gen-pattern", "write an analytic pattern file");
    gen->add_option("kind", gen_kind, "fourier:<P> or cupola-analytic");
    gen->add_option("--step", gen_step, "lattice step in deg");
    gen->add_option("--out", gen_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (eval->parsed())
            return cmd_eval(eval_opts, keep_trials, adaptive_stop);
        if (rank->parsed())
            return cmd_rank_modes(rank_opts, structure_path, max_eigenvalue);
        if (replay->parsed())
            return cmd_replay(replay_opts, track_path, outlier_threshold);
        if (gen->parsed())
            return cmd_gen_pattern(gen_kind, gen_step, gen_out);
    } catch (const dfeval::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
