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

#include "bdris/harness/experiment.hpp"

#include "bdris/baseline.hpp"
#include "bdris/scattering.hpp"
#include "bdris/user_estimator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <thread>

namespace bdris::harness
{

void snap_to_grid(PathParams<double> &paths, const ArrayGeometry &g, Index grid_iota, Index grid_phi, Rng &rng)
{
    std::vector<Index> valid;
    for (Index m = 0; m < g.M_R; ++m)
    {
        double num = double(m);
        if (double(m) / double(g.M_R) > g.d_over_lambda)
            num -= double(g.M_R);
        if (std::abs(num / (double(g.M_R) * g.d_over_lambda)) <= 1.0)
            valid.push_back(m);
    }
    const Index L = Index(paths.bs_ris.size());
    if (L > Index(valid.size()))
        throw std::invalid_argument("snap_to_grid: more paths than distinct beamspace bins");
    const Index step = Index(valid.size()) / L;
    const Index offset = std::uniform_int_distribution<Index>(0, Index(valid.size()) - 1)(rng);
    std::uniform_int_distribution<Index> pick_i(0, grid_iota - 1), pick_j(0, grid_phi - 1);
    for (Index l = 0; l < L; ++l)
    {
        auto &p = paths.bs_ris[std::size_t(l)];
        const Index bin = valid[std::size_t((offset + l * step) % Index(valid.size()))];
        p.iota_b = std::acos(elevation_cosine(bin, 0.0, g.M_R, g.d_over_lambda));
        p.iota_r = std::numbers::pi * double(pick_i(rng)) / double(grid_iota - 1);
        p.phi_r = std::numbers::pi * double(pick_j(rng)) / double(grid_phi - 1);
    }
}

ChannelRealization<double> draw_channel(const ExperimentConfig &cfg, const RisSize &ris, Index trial)
{
    const std::uint64_t seed = cfg.seed + std::uint64_t(trial);
    Rng rng = make_rng(seed, channel_stream);
    const ArrayGeometry g = cfg.geometry(ris);
    auto paths = sample_paths<double>(cfg.scenario(), rng);
    if (cfg.on_grid)
        snap_to_grid(paths, g, cfg.stage1.grid_iota, cfg.stage1.grid_phi, rng);
    auto ch = assemble_channels(paths, g);
    ch.seed = seed;
    return ch;
}

std::vector<CMatrix<double>> cascaded_channels(const std::vector<CVector<double>> &h, const CMatrix<double> &e)
{
    std::vector<CMatrix<double>> out;
    out.reserve(h.size());
    for (const auto &hk : h)
        out.push_back(cascaded_channel(hk, e));
    return out;
}

std::vector<CMatrix<double>> run_baseline(const ChannelRealization<double> &ch, const ExperimentConfig &cfg, const ArrayGeometry &g,
                                          double power_w, double noise_w, Rng &rng)
{
    const Index N = g.N();
    const auto sched = build_schedule<double>(Stage::baseline, N, N * N, cfg.K, rng);
    const CMatrix<double> pilots = dft_matrix<double>(cfg.K);
    const auto meas = simulate_baseline_uplink(ch, sched, pilots, power_w, noise_w, rng);
    return estimate_cascaded_ls(meas);
}

EstimateBundle run_proposed(const ChannelRealization<double> &ch, const ExperimentConfig &cfg, const ArrayGeometry &g,
                            const RisAngleGrid<double> &grid, double power_w, double noise_w, Rng &rng)
{
    EstimateBundle out;
    out.budget = proposed_budget(cfg, {g.N1, g.N2});

    // stage 1: full-duplex reflection of the BS's own pilots
    FdStage1Config s1;
    s1.B = out.budget.B;
    s1.T = out.budget.T;
    s1.power = power_w;
    s1.noise_var = cfg.stage1.effective_noise_dBm ? dbm_to_watts(*cfg.stage1.effective_noise_dBm) : noise_w;
    s1.grid_iota = cfg.stage1.grid_iota;
    s1.grid_phi = cfg.stage1.grid_phi;
    s1.rotation_step = cfg.stage1.rotation_step;
    s1.peak_threshold = cfg.stage1.peak_threshold;
    s1.known_L = cfg.stage1.known_L ? cfg.L : 0;

    const auto sched1 = build_schedule<double>(Stage::stage1, g.N(), s1.B, s1.T, rng);
    const CMatrix<double> S = fd_pilot_matrix<double>(g.M_T, s1.T);
    const auto ys = simulate_fd_rx(ch, sched1, S, power_w, s1.noise_var, rng);
    out.stage1 = estimate_bs_ris(decorrelate_pilots(ys, S), sched1, s1, g, grid);
    const CMatrix<double> &e_hat = out.stage1.E_hat;

    // stage 2: per-user LS given E-hat
    const auto draw = draw_stage2_schedule(e_hat, out.budget.C, out.budget.T2, rng, cfg.stage2.kappa_max, cfg.stage2.max_redraws);
    out.stage2_draws = draw.attempts;
    const CMatrix<double> pilots = dft_matrix<double>(out.budget.T2).leftCols(cfg.K);
    const auto yc = simulate_stage2_uplink(ch, draw.schedule, pilots, power_w, noise_w, rng);
    for (Index k = 0; k < cfg.K; ++k)
    {
        std::vector<CVector<double>> yk;
        yk.reserve(yc.size());
        for (const auto &y : yc)
            yk.push_back(decorrelate_user<double>(y, pilots.col(k)));
        out.h_hat.push_back(ls_estimate_h(yk, e_hat, draw.schedule, power_w, cfg.stage2.kappa_max));
    }
    out.H_hat = cascaded_channels(out.h_hat, e_hat);
    return out;
}

unsigned worker_count(unsigned requested)
{
    unsigned n = requested;
    if (n == 0)
        n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("BDRIS_THREADS"))
    {
        char *end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1)
            n = std::min<unsigned>(n, unsigned(cap));
    }
    return n;
}

namespace
{

struct SweepPoint
{
    std::size_t ris_index;
    RisSize ris;
    double P_dBm;
};

std::vector<Estimator> selected(EstimatorSet s)
{
    switch (s)
    {
    case EstimatorSet::baseline:
        return {Estimator::baseline};
    case EstimatorSet::proposed:
        return {Estimator::proposed};
    case EstimatorSet::both:
        return {Estimator::baseline, Estimator::proposed};
    }
    return {};
}

MetricsRecord base_record(const ExperimentConfig &cfg, const SweepPoint &pt, Index trial, Estimator e)
{
    MetricsRecord r;
    r.experiment_id = cfg.experiment_id;
    r.trial = trial;
    r.M = cfg.M;
    r.N = pt.ris.N();
    r.K = cfg.K;
    r.P_dBm = pt.P_dBm;
    r.estimator = to_string(e);
    r.nmse = std::numeric_limits<double>::quiet_NaN();
    r.pilot_slots = pilot_overhead(cfg, pt.ris, e);
    return r;
}

} // namespace

std::vector<MetricsRecord> run_experiment(const ExperimentConfig &cfg, const RunOptions &opts)
{
    cfg.validate();
    std::vector<SweepPoint> points;
    for (std::size_t i = 0; i < cfg.ris_sizes.size(); ++i)
        for (double p : cfg.P_dBm)
            points.push_back({i, cfg.ris_sizes[i], p});
    const auto estimators = selected(cfg.estimators);
    const std::size_t n_est = estimators.size();
    const std::size_t n_trials = std::size_t(cfg.trials);
    std::vector<MetricsRecord> records(points.size() * n_trials * n_est);

    if (cfg.mode == Mode::overhead)
    {
        std::size_t i = 0;
        for (const auto &pt : points)
            for (Index t = 0; t < cfg.trials; ++t)
                for (Estimator e : estimators)
                    records[i++] = base_record(cfg, pt, t, e);
    }
    else
    {
        // dictionaries are shared read-only between workers
        std::vector<std::unique_ptr<RisAngleGrid<double>>> grids(cfg.ris_sizes.size());
        if (cfg.estimators != EstimatorSet::baseline)
            for (std::size_t i = 0; i < grids.size(); ++i)
                grids[i] = std::make_unique<RisAngleGrid<double>>(cfg.geometry(cfg.ris_sizes[i]), cfg.stage1.grid_iota,
                                                                  cfg.stage1.grid_phi);

        const double noise_w = cfg.noise_dBm ? dbm_to_watts(*cfg.noise_dBm) : 0.0;
        const std::size_t n_tasks = points.size() * n_trials;
        std::atomic<std::size_t> next{0};

        const auto worker = [&] {
            for (std::size_t task = next++; task < n_tasks; task = next++)
            {
                const SweepPoint &pt = points[task / n_trials];
                const Index trial = Index(task % n_trials);
                const ArrayGeometry g = cfg.geometry(pt.ris);
                const double power_w = dbm_to_watts(pt.P_dBm);
                const std::uint64_t seed = cfg.seed + std::uint64_t(trial);

                std::optional<ChannelRealization<double>> ch;
                std::vector<CMatrix<double>> truth;
                std::string channel_error;
                try
                {
                    ch = draw_channel(cfg, pt.ris, trial);
                    truth = cascaded_channels(ch->h, ch->E);
                }
                catch (const std::exception &ex)
                {
                    channel_error = ex.what();
                }

                for (std::size_t ei = 0; ei < n_est; ++ei)
                {
                    const Estimator e = estimators[ei];
                    MetricsRecord r = base_record(cfg, pt, trial, e);
                    const auto t0 = std::chrono::steady_clock::now();
                    try
                    {
                        if (!ch)
                            throw Error(channel_error);
                        if (e == Estimator::baseline)
                        {
                            Rng rng = make_rng(seed, baseline_stream);
                            r.nmse = nmse(truth, run_baseline(*ch, cfg, g, power_w, noise_w, rng));
                        }
                        else
                        {
                            Rng rng = make_rng(seed, proposed_stream);
                            const auto est = run_proposed(*ch, cfg, g, *grids[pt.ris_index], power_w, noise_w, rng);
                            r.nmse = nmse(truth, est.H_hat);
                            r.pilot_slots = est.budget.slots();
                        }
                        if (!std::isfinite(r.nmse))
                            throw Error("non-finite NMSE");
                    }
                    catch (const std::exception &ex)
                    {
                        r.error = true;
                        r.message = ex.what();
                        r.nmse = std::numeric_limits<double>::quiet_NaN();
                    }
                    if (cfg.record_timing)
                        r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                    records[task * n_est + ei] = std::move(r);
                }
            }
        };

        const unsigned n_workers = std::min<unsigned>(worker_count(opts.threads), unsigned(std::max<std::size_t>(1, n_tasks)));
        if (n_workers <= 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (unsigned i = 0; i < n_workers; ++i)
                pool.emplace_back(worker);
            for (auto &t : pool)
                t.join();
        }
    }

    if (opts.write_csv)
        write_csv_atomic(cfg.csv_path(), records);
    return records;
}

} // namespace bdris::harness
