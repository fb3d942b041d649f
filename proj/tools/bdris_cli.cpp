// SPDX-License-Identifier: Apache-2.0
//
// bdris: individual channel estimation for beyond-diagonal RIS
// Copyright (C) 2026 The bdris authors
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

// bdris command line: run experiments, render plots, check configs.

#include "bdris/harness/config.hpp"
#include "bdris/harness/experiment.hpp"
#include "bdris/harness/metrics.hpp"
#include "bdris/harness/plot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>

namespace
{

using namespace bdris::harness;

enum Exit : int
{
    ok = 0,
    config_error = 1,
    runtime_failure = 2
};

void print_summary(const ExperimentConfig &cfg, const std::vector<MetricsRecord> &records)
{
    struct Acc
    {
        std::vector<double> nmse;
        long errors = 0;
        long slots = 0;
    };
    std::map<std::tuple<long, double, std::string>, Acc> acc;
    for (const auto &r : records)
    {
        auto &a = acc[{long(r.N), r.P_dBm, r.estimator}];
        a.slots = long(r.pilot_slots);
        if (r.error)
            ++a.errors;
        else if (std::isfinite(r.nmse))
            a.nmse.push_back(r.nmse);
    }
    std::printf("%6s %8s %-9s %12s %12s %12s %7s\n", "N", "P_dBm", "estimator", "mean_nmse", "median_nmse", "pilot_slots", "errors");
    for (auto &[key, a] : acc)
    {
        const auto &[n, p, est] = key;
        double med = NAN, avg = NAN;
        if (!a.nmse.empty())
        {
            avg = std::accumulate(a.nmse.begin(), a.nmse.end(), 0.0) / double(a.nmse.size());
            std::sort(a.nmse.begin(), a.nmse.end());
            const std::size_t m = a.nmse.size();
            med = m % 2 ? a.nmse[m / 2] : 0.5 * (a.nmse[m / 2 - 1] + a.nmse[m / 2]);
        }
        std::printf("%6ld %8g %-9s %12.4e %12.4e %12ld %7ld\n", n, p, est.c_str(), avg, med, a.slots, a.errors);
    }
    if (cfg.mode == Mode::overhead)
    {
        std::printf("\nclosed-form reference L min(log2 M, log2 N^2) + gamma K ceil(N/M):\n");
        for (const auto &r : cfg.ris_sizes)
            std::printf("%6ld %12.1f\n", long(r.N()), closed_form_overhead(cfg.L, cfg.M, r.N(), cfg.K, cfg.gamma));
    }
}

int cmd_run(const std::optional<std::string> &config_path, const std::optional<std::string> &preset_name,
            std::optional<long> trials, std::optional<unsigned long long> seed, const std::optional<std::string> &out_dir,
            unsigned threads, bool no_timing, bool quiet)
{
    ExperimentConfig cfg;
    try
    {
        cfg = config_path ? load_config(*config_path) : preset(*preset_name);
        if (trials)
            cfg.trials = *trials;
        if (seed)
            cfg.seed = *seed;
        if (out_dir)
            cfg.output_dir = *out_dir;
        if (no_timing)
            cfg.record_timing = false;
        cfg.validate();
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }

    std::vector<MetricsRecord> records;
    try
    {
        records = run_experiment(cfg, RunOptions{threads, true});
    }
    catch (const std::exception &e)
    {
        std::cerr << "run failed: " << e.what() << "\n";
        return runtime_failure;
    }

    std::size_t failed = 0;
    for (const auto &r : records)
        if (r.error)
        {
            ++failed;
            if (!quiet)
                std::cerr << "trial " << r.trial << " N=" << r.N << " P=" << r.P_dBm << " " << r.estimator << ": " << r.message << "\n";
        }
    if (!quiet)
        print_summary(cfg, records);
    std::cout << "wrote " << records.size() << " rows to " << cfg.csv_path() << "\n";
    if (!records.empty() && failed == records.size())
    {
        std::cerr << "all trials failed\n";
        return runtime_failure;
    }
    return ok;
}

int cmd_plot(const std::string &csv, const std::string &out)
{
    try
    {
        for (const auto &p : emit_plots(csv, out))
            std::cout << "wrote " << p << "\n";
    }
    catch (const std::exception &e)
    {
        std::cerr << "plot failed: " << e.what() << "\n";
        return config_error;
    }
    return ok;
}

int cmd_validate(const std::string &path, bool print)
{
    try
    {
        const auto cfg = load_config(path);
        if (print)
            std::cout << config_to_json(cfg);
        else
            std::cout << "valid: " << cfg.experiment_id << "\n";
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
    return ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"bdris: BD-RIS channel estimation experiments"};
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "run an experiment and write its CSV");
    std::optional<std::string> config_path, preset_name, out_dir;
    std::optional<long> trials;
    std::optional<unsigned long long> seed;
    unsigned threads = 0;
    bool no_timing = false, quiet = false;
    auto *opt_config = run->add_option("--config", config_path, "JSON config file");
    auto *opt_preset = run->add_option("--preset", preset_name, "built-in preset")->check(CLI::IsMember(preset_names()));
    opt_config->excludes(opt_preset);
    opt_preset->excludes(opt_config);
    run->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "override the base seed");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--threads", threads, "worker threads (0: all cores, capped by BDRIS_THREADS)");
    run->add_flag("--no-timing", no_timing, "write 0 for wall_time_ms (byte-reproducible CSV)");
    run->add_flag("-q,--quiet", quiet, "suppress the summary table");

    auto *plot = app.add_subcommand("plot", "render SVG figures from a results CSV");
    std::string csv, plot_out;
    plot->add_option("--csv", csv, "results CSV")->required();
    plot->add_option("--out", plot_out, "output directory")->required();

    auto *validate = app.add_subcommand("validate-config", "check a config file");
    std::string validate_path;
    bool print = false;
    validate->add_option("--config", validate_path, "JSON config file")->required();
    validate->add_flag("--print", print, "print the normalized config with defaults filled in");

    auto *show = app.add_subcommand("preset", "print a built-in preset as JSON");
    std::string show_name;
    show->add_option("name", show_name, "preset name")->required()->check(CLI::IsMember(preset_names()));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    if (*run)
    {
        if (!config_path && !preset_name)
        {
            std::cerr << "run: one of --config or --preset is required\n";
            return config_error;
        }
        return cmd_run(config_path, preset_name, trials, seed, out_dir, threads, no_timing, quiet);
    }
    if (*plot)
        return cmd_plot(csv, plot_out);
    if (*validate)
        return cmd_validate(validate_path, print);
    if (*show)
    {
        std::cout << config_to_json(preset(show_name));
        return ok;
    }
    return config_error;
}
