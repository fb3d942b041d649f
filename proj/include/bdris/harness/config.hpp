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
#include "bdris/numerics.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdris::harness
{

/// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

enum class Mode
{
    simulate, ///< Monte Carlo NMSE runs
    overhead  ///< pilot counting only, no channel draws
};

enum class EstimatorSet
{
    baseline,
    proposed,
    both
};

/// How the stage-2 subframe count C is chosen.
enum class SubframePolicy
{
    fixed,     ///< configured C
    minimal,   ///< ceil(N / M)
    rank_aware ///< max(ceil(N / M), ceil(N / L))
};

struct RisSize
{
    Index N1 = 4;
    Index N2 = 4;
    Index N() const { return N1 * N2; }
};

struct Stage1Settings
{
    Index B = 0; ///< 0: default
    Index T = 0; ///< 0: default
    Index grid_iota = 180;
    Index grid_phi = 180;
    double rotation_step = 0.0; ///< 0: default
    double peak_threshold = 0.2;
    bool known_L = false;
    std::optional<double> effective_noise_dBm; ///< unset: same as noise_dBm
};

struct Stage2Settings
{
    SubframePolicy policy = SubframePolicy::minimal;
    Index C = 0; ///< used by SubframePolicy::fixed
    Index T2 = 0; ///< 0: K
    double kappa_max = 1e6;
    Index max_redraws = 8;
};

struct ExperimentConfig
{
    std::string experiment_id = "experiment";
    Mode mode = Mode::simulate;

    Index M = 32;
    Index M_T = 16;
    double d_over_lambda = 0.5;
    std::vector<RisSize> ris_sizes{{4, 4}};

    Index K = 4;
    Index L = 3;
    Index U_k = 4;

    std::vector<double> P_dBm{20.0};
    std::optional<double> noise_dBm = -100.0; ///< unset: noiseless
    double fc_GHz = 28.0;
    double d_BR_m = 10.0;
    double d_RU_m = 50.0;
    double beta_BR = 2.2;
    double beta_RU = 2.2;
    double shadow_sigma_dB = 2.0;
    bool on_grid = false; ///< snap sampled BS-RIS angles onto the estimator grids

    Index gamma = 2; ///< stage-2 rounds per frame
    Stage1Settings stage1;
    Stage2Settings stage2;
    EstimatorSet estimators = EstimatorSet::both;

    Index trials = 50;
    std::uint64_t seed = 1;
    bool record_timing = true;
    std::string output_dir = "results";
    std::string csv_name; ///< empty: <experiment_id>.csv

    ArrayGeometry geometry(const RisSize &r) const;
    ScenarioParams scenario() const;
    std::string csv_path() const;

    /// Throws ConfigError on the first violated invariant.
    void validate() const;
};

double dbm_to_watts(double dbm);

/// Parses a JSON document. Unknown keys are rejected at every level.
ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::string &path);
std::string config_to_json(const ExperimentConfig &cfg);

/// fig3, fig4, fig5, smoke.
ExperimentConfig preset(const std::string &name);
std::vector<std::string> preset_names();

const char *to_string(Mode m);
const char *to_string(EstimatorSet e);

} // namespace bdris::harness
