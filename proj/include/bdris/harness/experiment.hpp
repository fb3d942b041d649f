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

#pragma once

#include "bdris/channel.hpp"
#include "bdris/fd_estimator.hpp"
#include "bdris/harness/config.hpp"
#include "bdris/harness/metrics.hpp"
#include "bdris/random.hpp"

#include <vector>

namespace bdris::harness
{

/// Per-trial RNG substreams; all derive from (base seed + trial index).
enum Stream : std::uint64_t
{
    channel_stream = 0,
    baseline_stream = 1,
    proposed_stream = 2
};

/// Moves BS elevations onto distinct beamspace bins of the receive subarray (spread
/// evenly from a random offset) and RIS angles onto random points of the search grid.
void snap_to_grid(PathParams<double> &paths, const ArrayGeometry &g, Index grid_iota, Index grid_phi, Rng &rng);

ChannelRealization<double> draw_channel(const ExperimentConfig &cfg, const RisSize &ris, Index trial);

/// Cascaded channels for every user, H_k = h_k^T kron E.
std::vector<CMatrix<double>> cascaded_channels(const std::vector<CVector<double>> &h, const CMatrix<double> &e);

std::vector<CMatrix<double>> run_baseline(const ChannelRealization<double> &ch, const ExperimentConfig &cfg, const ArrayGeometry &g,
                                          double power_w, double noise_w, Rng &rng);

struct EstimateBundle
{
    Stage1Result<double> stage1;
    std::vector<CVector<double>> h_hat;
    std::vector<CMatrix<double>> H_hat;
    ProposedBudget budget;
    Index stage2_draws = 0;
};

/// Both stages end to end; `grid` must match the geometry and cfg.stage1 grid sizes.
EstimateBundle run_proposed(const ChannelRealization<double> &ch, const ExperimentConfig &cfg, const ArrayGeometry &g,
                            const RisAngleGrid<double> &grid, double power_w, double noise_w, Rng &rng);

struct RunOptions
{
    unsigned threads = 0;  ///< 0: BDRIS_THREADS or hardware concurrency
    bool write_csv = true;
};

/// Worker count honoring the BDRIS_THREADS cap.
unsigned worker_count(unsigned requested);

/// Every sweep point (RIS size outer, power inner) times every trial times every selected
/// estimator, in that order. Estimator failures become error rows.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig &cfg, const RunOptions &opts = {});

} // namespace bdris::harness
