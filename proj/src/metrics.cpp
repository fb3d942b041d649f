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

#include "bdris/harness/metrics.hpp"

#include "bdris/fd_estimator.hpp"
#include "bdris/user_estimator.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bdris::harness
{

const char *to_string(Estimator e) { return e == Estimator::baseline ? "baseline" : "proposed"; }

double nmse(const std::vector<CMatrix<double>> &truth, const std::vector<CMatrix<double>> &estimate)
{
    if (truth.size() != estimate.size() || truth.empty())
        throw std::invalid_argument("nmse: channel lists must be non-empty and of equal length");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k)
    {
        if (truth[k].rows() != estimate[k].rows() || truth[k].cols() != estimate[k].cols())
            throw std::invalid_argument("nmse: shape mismatch for user " + std::to_string(k));
        num += (truth[k] - estimate[k]).squaredNorm();
        den += truth[k].squaredNorm();
    }
    if (!(den > 0.0))
        throw DegenerateInputError("nmse: true channels have zero energy");
    return num / den;
}

ProposedBudget proposed_budget(const ExperimentConfig &cfg, const RisSize &ris)
{
    const ArrayGeometry g = cfg.geometry(ris);
    ProposedBudget b;
    b.B = cfg.stage1.B > 0 ? cfg.stage1.B : default_fd_subframes(g);
    b.T = cfg.stage1.T > 0 ? cfg.stage1.T : default_fd_slots(g, cfg.L);
    switch (cfg.stage2.policy)
    {
    case SubframePolicy::fixed:
        b.C = cfg.stage2.C;
        break;
    case SubframePolicy::minimal:
        b.C = default_stage2_subframes(g);
        break;
    case SubframePolicy::rank_aware:
        b.C = rank_aware_stage2_subframes(g, cfg.L);
        break;
    }
    b.T2 = cfg.stage2.T2 > 0 ? cfg.stage2.T2 : cfg.K;
    b.gamma = cfg.gamma;
    return b;
}

Index pilot_overhead(const ExperimentConfig &cfg, const RisSize &ris, Estimator e)
{
    if (e == Estimator::baseline)
        return cfg.K * ris.N() * ris.N();
    return proposed_budget(cfg, ris).slots();
}

double closed_form_overhead(Index L, Index M, Index N, Index K, Index gamma)
{
    const double logs = std::min(std::log2(double(M)), std::log2(double(N) * double(N)));
    return double(L) * logs + double(gamma * K * ((N + M - 1) / M));
}

namespace
{
std::string format_double(const char *fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}
} // namespace

std::string to_csv(const std::vector<MetricsRecord> &records)
{
    std::string out = std::string(csv_header) + "\n";
    for (const auto &r : records)
    {
        out += r.experiment_id;
        out += ',' + std::to_string(r.trial);
        out += ',' + std::to_string(r.M);
        out += ',' + std::to_string(r.N);
        out += ',' + std::to_string(r.K);
        out += ',' + format_double("%.6g", r.P_dBm);
        out += ',' + r.estimator;
        out += ',' + (std::isfinite(r.nmse) ? format_double("%.9e", r.nmse) : std::string("nan"));
        out += ',' + std::to_string(r.pilot_slots);
        out += ',' + format_double("%.3f", r.wall_time_ms);
        out += ',' + std::string(r.error ? "1" : "0");
        out += '\n';
    }
    return out;
}

void write_csv_atomic(const std::string &path, const std::vector<MetricsRecord> &records)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << to_csv(records);
        out.flush();
        if (!out)
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
}

namespace
{
std::vector<std::string> split(const std::string &line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_double(const std::string &s)
{
    if (s == "nan" || s.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw std::runtime_error("read_csv: malformed number '" + s + "'");
    return v;
}
} // namespace

std::vector<MetricsRecord> read_csv(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_csv: '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i)
        col[header[i]] = i;
    const std::vector<std::string> required = split(csv_header);
    std::string missing;
    for (const auto &name : required)
        if (!col.count(name))
            missing += (missing.empty() ? "" : ", ") + name;
    if (!missing.empty())
        throw std::runtime_error("read_csv: missing column(s): " + missing);

    std::vector<MetricsRecord> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw std::runtime_error("read_csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                     " fields, expected " + std::to_string(header.size()));
        const auto at = [&](const char *name) -> const std::string & { return cells[col.at(name)]; };
        MetricsRecord r;
        r.experiment_id = at("experiment_id");
        r.trial = std::stoll(at("trial"));
        r.M = std::stoll(at("M"));
        r.N = std::stoll(at("N"));
        r.K = std::stoll(at("K"));
        r.P_dBm = parse_double(at("P_dBm"));
        r.estimator = at("estimator");
        r.nmse = parse_double(at("nmse"));
        r.pilot_slots = std::stoll(at("pilot_slots"));
        r.wall_time_ms = parse_double(at("wall_time_ms"));
        r.error = at("error_flag") == "1";
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace bdris::harness
