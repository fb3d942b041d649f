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

#include "bdris/harness/config.hpp"
#include "bdris/numerics.hpp"

#include <string>
#include <vector>

namespace bdris::harness
{

enum class Estimator
{
    baseline,
    proposed
};

const char *to_string(Estimator e);

/// One CSV row: a single estimator on a single trial of a single sweep point.
struct MetricsRecord
{
    std::string experiment_id;
    Index trial = 0;
    Index M = 0;
    Index N = 0;
    Index K = 0;
    double P_dBm = 0.0;
    std::string estimator;
    double nmse = 0.0; ///< NaN when not computed (error row or overhead mode)
    Index pilot_slots = 0;
    double wall_time_ms = 0.0;
    bool error = false;
    std::string message; ///< not serialized
};

/// sum_k ||H_k - H^_k||_F^2 / sum_k ||H_k||_F^2.
double nmse(const std::vector<CMatrix<double>> &truth, const std::vector<CMatrix<double>> &estimate);

/// Stage parameters as actually used for one sweep point.
struct ProposedBudget
{
    Index B = 0;
    Index T = 0;
    Index C = 0;
    Index T2 = 0;
    Index gamma = 0;

    Index slots() const { return B * T + gamma * C * T2; }
};

ProposedBudget proposed_budget(const ExperimentConfig &cfg, const RisSize &ris);

/// K N^2 for the baseline, B T + gamma C T2 for the proposed method.
Index pilot_overhead(const ExperimentConfig &cfg, const RisSize &ris, Estimator e);

/// Order-of-magnitude reference L min(log2 M, log2 N^2) + gamma K ceil(N / M).
double closed_form_overhead(Index L, Index M, Index N, Index K, Index gamma);

inline constexpr const char *csv_header = "experiment_id,trial,M,N,K,P_dBm,estimator,nmse,pilot_slots,wall_time_ms,error_flag";

std::string to_csv(const std::vector<MetricsRecord> &records);

/// Writes through a temporary file in the same directory and renames it into place.
void write_csv_atomic(const std::string &path, const std::vector<MetricsRecord> &records);

/// Parses a CSV produced by to_csv(). Throws std::runtime_error naming any missing column.
std::vector<MetricsRecord> read_csv(const std::string &path);

} // namespace bdris::harness
