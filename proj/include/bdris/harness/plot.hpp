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

#include "bdris/harness/metrics.hpp"

#include <map>
#include <string>
#include <vector>

namespace bdris::harness
{

enum class PlotKind
{
    nmse_vs_N,
    nmse_vs_power,
    pilots_vs_N
};

struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y; ///< mean over trials, sorted by x
};

/// Trial-averaged series for one figure. Rows flagged as errors and non-finite
/// values are skipped. Series are keyed by estimator, plus the swept quantity that is
/// not on the x axis when it takes more than one value.
std::vector<Series> aggregate_series(const std::vector<MetricsRecord> &rows, PlotKind kind);

/// Self-contained SVG line plot.
std::string render_svg(const std::vector<Series> &series, const std::string &title, const std::string &x_label,
                       const std::string &y_label, bool log_y);

/// Reads the CSV and writes one SVG per figure that has data. Returns the written
/// paths. An empty CSV is an error and writes nothing.
std::vector<std::string> emit_plots(const std::string &csv_path, const std::string &out_dir,
                                    const std::vector<PlotKind> &kinds = {PlotKind::nmse_vs_N, PlotKind::nmse_vs_power,
                                                                          PlotKind::pilots_vs_N});

} // namespace bdris::harness
