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

#include "bdris/harness/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bdris::harness
{

using nlohmann::json;

namespace
{

void reject_unknown(const json &obj, const std::set<std::string> &known, const std::string &where)
{
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto &[key, _] : obj.items())
        if (!known.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json &obj, const char *key, T &out, const std::string &where)
{
    if (!obj.contains(key))
        return;
    try
    {
        out = obj.at(key).get<T>();
    }
    catch (const json::exception &e)
    {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

void read_index(const json &obj, const char *key, Index &out, const std::string &where)
{
    if (!obj.contains(key))
        return;
    const auto &v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    out = v.get<Index>();
}

// scalar or non-empty list of numbers
std::vector<double> read_sweep(const json &v, const std::string &where)
{
    std::vector<double> out;
    if (v.is_number())
        out.push_back(v.get<double>());
    else if (v.is_array())
        for (const auto &x : v)
        {
            if (!x.is_number())
                throw ConfigError(where + ": sweep entries must be numbers");
            out.push_back(x.get<double>());
        }
    else
        throw ConfigError(where + ": expected a number or a list of numbers");
    return out;
}

std::vector<RisSize> read_ris_sizes(const json &v)
{
    if (!v.is_array())
        throw ConfigError("ris_sizes: expected a list of [N1, N2] pairs");
    std::vector<RisSize> out;
    for (const auto &p : v)
    {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
            throw ConfigError("ris_sizes: every entry must be an [N1, N2] integer pair");
        out.push_back({p[0].get<Index>(), p[1].get<Index>()});
    }
    return out;
}

Stage1Settings read_stage1(const json &v)
{
    const std::string w = "stage1";
    reject_unknown(v, {"B", "T", "grid_iota", "grid_phi", "rotation_step", "peak_threshold", "known_L", "effective_noise_dBm"}, w);
    Stage1Settings s;
    read_index(v, "B", s.B, w);
    read_index(v, "T", s.T, w);
    read_index(v, "grid_iota", s.grid_iota, w);
    read_index(v, "grid_phi", s.grid_phi, w);
    read(v, "rotation_step", s.rotation_step, w);
    read(v, "peak_threshold", s.peak_threshold, w);
    read(v, "known_L", s.known_L, w);
    if (v.contains("effective_noise_dBm"))
    {
        const auto &x = v.at("effective_noise_dBm");
        if (x.is_null())
            s.effective_noise_dBm.reset();
        else if (x.is_number())
            s.effective_noise_dBm = x.get<double>();
        else
            throw ConfigError("stage1.effective_noise_dBm: expected a number or null");
    }
    return s;
}

Stage2Settings read_stage2(const json &v)
{
    const std::string w = "stage2";
    reject_unknown(v, {"C", "T2", "kappa_max", "max_redraws"}, w);
    Stage2Settings s;
    if (v.contains("C"))
    {
        const auto &c = v.at("C");
        if (c.is_number_integer())
        {
            s.policy = SubframePolicy::fixed;
            s.C = c.get<Index>();
        }
        else if (c == "min")
            s.policy = SubframePolicy::minimal;
        else if (c == "rank")
            s.policy = SubframePolicy::rank_aware;
        else
            throw ConfigError("stage2.C: expected an integer, \"min\" or \"rank\"");
    }
    read_index(v, "T2", s.T2, w);
    read(v, "kappa_max", s.kappa_max, w);
    read_index(v, "max_redraws", s.max_redraws, w);
    return s;
}

json stage2_c_json(const Stage2Settings &s)
{
    switch (s.policy)
    {
    case SubframePolicy::fixed:
        return s.C;
    case SubframePolicy::minimal:
        return "min";
    case SubframePolicy::rank_aware:
        return "rank";
    }
    return "min";
}

} // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

const char *to_string(Mode m) { return m == Mode::simulate ? "simulate" : "overhead"; }

const char *to_string(EstimatorSet e)
{
    switch (e)
    {
    case EstimatorSet::baseline:
        return "baseline";
    case EstimatorSet::proposed:
        return "proposed";
    case EstimatorSet::both:
        return "both";
    }
    return "both";
}

ArrayGeometry ExperimentConfig::geometry(const RisSize &r) const
{
    ArrayGeometry g;
    g.M = M;
    g.M_T = M_T;
    g.M_R = M - M_T;
    g.N1 = r.N1;
    g.N2 = r.N2;
    g.d_over_lambda = d_over_lambda;
    return g;
}

ScenarioParams ExperimentConfig::scenario() const
{
    ScenarioParams s;
    s.K = K;
    s.L = L;
    s.U_k = U_k;
    s.fc_GHz = fc_GHz;
    s.d_BR_m = d_BR_m;
    s.d_RU_m = d_RU_m;
    s.beta_BR = beta_BR;
    s.beta_RU = beta_RU;
    s.shadow_sigma_db = shadow_sigma_dB;
    return s;
}

std::string ExperimentConfig::csv_path() const
{
    const std::string name = csv_name.empty() ? experiment_id + ".csv" : csv_name;
    return output_dir.empty() ? name : output_dir + "/" + name;
}

void ExperimentConfig::validate() const
{
    const auto fail = [](const std::string &msg) { throw ConfigError(msg); };
    if (experiment_id.empty() || experiment_id.find_first_of(",\"\n\r") != std::string::npos)
        fail("experiment_id must be non-empty and free of commas, quotes and line breaks");
    if (M_T < 1 || M - M_T < 1)
        fail("M and M_T must leave at least one antenna in each subarray");
    if (!(d_over_lambda > 0.0 && d_over_lambda <= 0.5))
        fail("d_over_lambda must lie in (0, 0.5]");
    if (ris_sizes.empty())
        fail("ris_sizes must not be empty");
    for (const auto &r : ris_sizes)
        if (r.N1 < 1 || r.N2 < 1)
            fail("ris_sizes entries must be >= 1");
    if (K < 1 || L < 1 || U_k < 1)
        fail("K, L and U_k must be >= 1");
    if (P_dBm.empty())
        fail("P_dBm must not be empty");
    for (double p : P_dBm)
        if (!std::isfinite(p))
            fail("P_dBm entries must be finite");
    if (noise_dBm && !std::isfinite(*noise_dBm))
        fail("noise_dBm must be finite or null");
    if (!(fc_GHz > 0.0) || !(d_BR_m > 0.0) || !(d_RU_m > 0.0))
        fail("fc_GHz, d_BR_m and d_RU_m must be positive");
    if (!(shadow_sigma_dB >= 0.0) || !std::isfinite(beta_BR) || !std::isfinite(beta_RU))
        fail("shadow_sigma_dB must be >= 0 and beta coefficients finite");
    if (gamma < 0)
        fail("gamma must be >= 0");
    if (stage1.B < 0 || stage1.T < 0)
        fail("stage1.B and stage1.T must be >= 0 (0 selects the default)");
    if (stage1.T > 0 && stage1.T < M_T)
        fail("stage1.T must be >= M_T");
    if (stage1.grid_iota < 2 || stage1.grid_phi < 2)
        fail("stage1 grids need at least two points per axis");
    if (!(stage1.rotation_step >= 0.0))
        fail("stage1.rotation_step must be >= 0 (0 selects the default)");
    if (!(stage1.peak_threshold > 0.0 && stage1.peak_threshold < 1.0))
        fail("stage1.peak_threshold must lie in (0, 1)");
    if (stage2.policy == SubframePolicy::fixed && stage2.C < 1)
        fail("stage2.C must be >= 1");
    if (stage2.T2 != 0 && stage2.T2 < K)
        fail("stage2.T2 must be >= K (0 selects K)");
    if (!(stage2.kappa_max >= 1.0))
        fail("stage2.kappa_max must be >= 1");
    if (stage2.max_redraws < 1)
        fail("stage2.max_redraws must be >= 1");
    if (trials < 1)
        fail("trials must be >= 1");
}

ExperimentConfig parse_config(const std::string &json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    const std::string w = "config";
    reject_unknown(doc,
                   {"experiment_id", "mode", "M", "M_T", "d_over_lambda", "ris_sizes", "K", "L", "U_k", "P_dBm", "noise_dBm", "fc_GHz",
                    "d_BR_m", "d_RU_m", "beta_BR", "beta_RU", "shadow_sigma_dB", "on_grid", "gamma", "stage1", "stage2", "estimators",
                    "trials", "seed", "record_timing", "output_dir", "csv_name"},
                   w);
    ExperimentConfig c;
    read(doc, "experiment_id", c.experiment_id, w);
    if (doc.contains("mode"))
    {
        const auto m = doc.at("mode");
        if (m == "simulate")
            c.mode = Mode::simulate;
        else if (m == "overhead")
            c.mode = Mode::overhead;
        else
            throw ConfigError("mode: expected \"simulate\" or \"overhead\"");
    }
    read_index(doc, "M", c.M, w);
    read_index(doc, "M_T", c.M_T, w);
    read(doc, "d_over_lambda", c.d_over_lambda, w);
    if (doc.contains("ris_sizes"))
        c.ris_sizes = read_ris_sizes(doc.at("ris_sizes"));
    read_index(doc, "K", c.K, w);
    read_index(doc, "L", c.L, w);
    read_index(doc, "U_k", c.U_k, w);
    if (doc.contains("P_dBm"))
        c.P_dBm = read_sweep(doc.at("P_dBm"), "P_dBm");
    if (doc.contains("noise_dBm"))
    {
        const auto &x = doc.at("noise_dBm");
        if (x.is_null())
            c.noise_dBm.reset();
        else if (x.is_number())
            c.noise_dBm = x.get<double>();
        else
            throw ConfigError("noise_dBm: expected a number or null");
    }
    read(doc, "fc_GHz", c.fc_GHz, w);
    read(doc, "d_BR_m", c.d_BR_m, w);
    read(doc, "d_RU_m", c.d_RU_m, w);
    read(doc, "beta_BR", c.beta_BR, w);
    read(doc, "beta_RU", c.beta_RU, w);
    read(doc, "shadow_sigma_dB", c.shadow_sigma_dB, w);
    read(doc, "on_grid", c.on_grid, w);
    read_index(doc, "gamma", c.gamma, w);
    if (doc.contains("stage1"))
        c.stage1 = read_stage1(doc.at("stage1"));
    if (doc.contains("stage2"))
        c.stage2 = read_stage2(doc.at("stage2"));
    if (doc.contains("estimators"))
    {
        const auto e = doc.at("estimators");
        if (e == "baseline")
            c.estimators = EstimatorSet::baseline;
        else if (e == "proposed")
            c.estimators = EstimatorSet::proposed;
        else if (e == "both")
            c.estimators = EstimatorSet::both;
        else
            throw ConfigError("estimators: expected \"baseline\", \"proposed\" or \"both\"");
    }
    read_index(doc, "trials", c.trials, w);
    if (doc.contains("seed"))
    {
        const auto &s = doc.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError("seed: expected a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    read(doc, "record_timing", c.record_timing, w);
    read(doc, "output_dir", c.output_dir, w);
    read(doc, "csv_name", c.csv_name, w);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig &c)
{
    json sizes = json::array();
    for (const auto &r : c.ris_sizes)
        sizes.push_back({r.N1, r.N2});
    json s1 = {{"B", c.stage1.B},
               {"T", c.stage1.T},
               {"grid_iota", c.stage1.grid_iota},
               {"grid_phi", c.stage1.grid_phi},
               {"rotation_step", c.stage1.rotation_step},
               {"peak_threshold", c.stage1.peak_threshold},
               {"known_L", c.stage1.known_L},
               {"effective_noise_dBm", c.stage1.effective_noise_dBm ? json(*c.stage1.effective_noise_dBm) : json(nullptr)}};
    json s2 = {{"C", stage2_c_json(c.stage2)},
               {"T2", c.stage2.T2},
               {"kappa_max", c.stage2.kappa_max},
               {"max_redraws", c.stage2.max_redraws}};
    json doc = {{"experiment_id", c.experiment_id},
                {"mode", to_string(c.mode)},
                {"M", c.M},
                {"M_T", c.M_T},
                {"d_over_lambda", c.d_over_lambda},
                {"ris_sizes", sizes},
                {"K", c.K},
                {"L", c.L},
                {"U_k", c.U_k},
                {"P_dBm", c.P_dBm},
                {"noise_dBm", c.noise_dBm ? json(*c.noise_dBm) : json(nullptr)},
                {"fc_GHz", c.fc_GHz},
                {"d_BR_m", c.d_BR_m},
                {"d_RU_m", c.d_RU_m},
                {"beta_BR", c.beta_BR},
                {"beta_RU", c.beta_RU},
                {"shadow_sigma_dB", c.shadow_sigma_dB},
                {"on_grid", c.on_grid},
                {"gamma", c.gamma},
                {"stage1", s1},
                {"stage2", s2},
                {"estimators", to_string(c.estimators)},
                {"trials", c.trials},
                {"seed", c.seed},
                {"record_timing", c.record_timing},
                {"output_dir", c.output_dir},
                {"csv_name", c.csv_name}};
    return doc.dump(2) + "\n";
}

ExperimentConfig preset(const std::string &name)
{
    ExperimentConfig c;
    c.experiment_id = name;
    if (name == "fig3")
    {
        c.ris_sizes = {{4, 4}, {6, 6}, {8, 8}};
        c.P_dBm = {20.0};
        c.stage2.policy = SubframePolicy::rank_aware;
    }
    else if (name == "fig4")
    {
        c.ris_sizes = {{6, 6}};
        c.P_dBm = {0.0, 10.0, 20.0, 30.0};
        c.stage2.policy = SubframePolicy::rank_aware;
    }
    else if (name == "fig5")
    {
        // pilot counting at the full array size; nothing is simulated
        c.mode = Mode::overhead;
        c.M = 80;
        c.M_T = 40;
        c.ris_sizes = {{4, 4}, {10, 10}, {40, 25}, {100, 100}};
        c.trials = 1;
        c.stage2.policy = SubframePolicy::minimal;
    }
    else if (name == "smoke")
    {
        c.M = 16;
        c.M_T = 8;
        c.ris_sizes = {{2, 2}, {4, 4}};
        // single BS-RIS path: with two on-grid paths the rotation search is pulled
        // off nu = 0 by inter-path leakage, so exactness only holds for L = 1
        c.K = 2;
        c.L = 1;
        c.U_k = 2;
        c.noise_dBm.reset();
        c.on_grid = true;
        c.stage1.known_L = true;
        c.stage2.policy = SubframePolicy::rank_aware;
        c.trials = 3;
    }
    else
        throw ConfigError("unknown preset '" + name + "' (expected fig3, fig4, fig5 or smoke)");
    c.validate();
    return c;
}

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5", "smoke"}; }

} // namespace bdris::harness
