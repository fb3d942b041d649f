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

#include "support.hpp"

#include "bdris/harness/config.hpp"
#include "bdris/harness/experiment.hpp"
#include "bdris/harness/metrics.hpp"
#include "bdris/harness/plot.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace bdris;
using namespace bdris::harness;
using namespace bdris::test;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace fs = std::filesystem;

namespace
{
struct TempDir
{
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("bdris_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small fast sweep: coarse grids, few trials.
ExperimentConfig tiny()
{
    ExperimentConfig c;
    c.experiment_id = "tiny";
    c.M = 16;
    c.M_T = 8;
    c.ris_sizes = {{2, 2}};
    c.K = 2;
    c.L = 1;
    c.U_k = 2;
    c.P_dBm = {0.0, 10.0};
    c.stage1.grid_iota = c.stage1.grid_phi = 30;
    c.trials = 2;
    c.record_timing = false;
    return c;
}

MetricsRecord row(const std::string &est, Index N, double P, double nmse_v, Index slots = 0)
{
    MetricsRecord r;
    r.experiment_id = "x";
    r.M = 32;
    r.N = N;
    r.K = 4;
    r.P_dBm = P;
    r.estimator = est;
    r.nmse = nmse_v;
    r.pilot_slots = slots;
    return r;
}
} // namespace

TEST_CASE("nmse examples", "[harness]")
{
    const Mat h = Mat::Constant(2, 3, C(1.0, -1.0));
    CHECK(nmse({h}, {h}) == 0.0);
    CHECK(nmse({h}, {Mat(Mat::Zero(2, 3))}) == 1.0);
    CHECK_THAT(nmse({h}, {Mat(-h)}), WithinAbs(4.0, 1e-15));
    CHECK_THAT(nmse({h, h}, {h, Mat(Mat::Zero(2, 3))}), WithinAbs(0.5, 1e-15));
    CHECK_THROWS_AS(nmse({Mat(Mat::Zero(2, 3))}, {h}), DegenerateInputError);
    CHECK_THROWS_AS(nmse({h}, {Mat(Mat::Zero(3, 2))}), std::invalid_argument);
    CHECK_THROWS_AS(nmse({}, {}), std::invalid_argument);
}

TEST_CASE("pilot overhead counts", "[harness]")
{
    ExperimentConfig c;
    c.stage2.policy = SubframePolicy::minimal;
    CHECK(pilot_overhead(c, {4, 4}, Estimator::baseline) == 1024);
    CHECK(pilot_overhead(c, {4, 4}, Estimator::proposed) == 136);
    c.gamma = 0;
    const auto b = proposed_budget(c, {4, 4});
    CHECK(pilot_overhead(c, {4, 4}, Estimator::proposed) == b.B * b.T);
    c.gamma = 2;
    c.stage2.policy = SubframePolicy::rank_aware;
    CHECK(proposed_budget(c, {4, 4}).C == 6);
    c.stage2.policy = SubframePolicy::fixed;
    c.stage2.C = 3;
    c.stage2.T2 = 5;
    CHECK(pilot_overhead(c, {4, 4}, Estimator::proposed) == 128 + 2 * 3 * 5);
    // 3 min(5, 8) + 2 * 4 * 1
    CHECK_THAT(closed_form_overhead(3, 32, 16, 4, 2), WithinAbs(23.0, 1e-12));
}

TEST_CASE("fig5 overhead sweep", "[harness]")
{
    auto c = preset("fig5");
    RunOptions o;
    o.write_csv = false;
    const auto rows = run_experiment(c, o);
    REQUIRE(rows.size() == 8);
    const std::vector<Index> proposed{328, 576, 904, 2080};
    const std::vector<Index> baseline{1024, 40000, 4000000, 400000000};
    for (std::size_t i = 0; i < 4; ++i)
    {
        CHECK(rows[2 * i].estimator == "baseline");
        CHECK(rows[2 * i].pilot_slots == baseline[i]);
        CHECK(rows[2 * i + 1].pilot_slots == proposed[i]);
        CHECK(std::isnan(rows[2 * i].nmse));
    }
    const auto series = aggregate_series(rows, PlotKind::pilots_vs_N);
    REQUIRE(series.size() == 2);
    for (const auto &s : series)
    {
        REQUIRE(s.x.size() == 4);
        for (std::size_t i = 1; i < 4; ++i)
        {
            CHECK(s.x[i] > s.x[i - 1]);
            CHECK(s.y[i] > s.y[i - 1]);
        }
    }
    const auto &base = series[0].label == "baseline" ? series[0] : series[1];
    const auto &prop = series[0].label == "baseline" ? series[1] : series[0];
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(base.y[i] > prop.y[i]);
}

TEST_CASE("config parsing", "[harness][config]")
{
    const auto c = parse_config(R"({"experiment_id": "a", "P_dBm": 10, "noise_dBm": null, "ris_sizes": [[2, 3]],
                                     "stage2": {"C": "rank"}, "estimators": "proposed", "seed": 7})");
    CHECK(c.experiment_id == "a");
    CHECK(c.P_dBm == std::vector<double>{10.0});
    CHECK_FALSE(c.noise_dBm.has_value());
    CHECK(c.ris_sizes.size() == 1);
    CHECK(c.ris_sizes[0].N() == 6);
    CHECK(c.stage2.policy == SubframePolicy::rank_aware);
    CHECK(c.estimators == EstimatorSet::proposed);
    CHECK(c.seed == 7);
    CHECK(c.M == 32); // default kept

    CHECK(parse_config(R"({"stage2": {"C": 4}})").stage2.policy == SubframePolicy::fixed);
    CHECK(parse_config(R"({"stage2": {"C": "min"}})").stage2.policy == SubframePolicy::minimal);

    CHECK_THROWS_WITH(parse_config(R"({"bogus": 1})"), ContainsSubstring("bogus"));
    CHECK_THROWS_WITH(parse_config(R"({"stage1": {"Bee": 1}})"), ContainsSubstring("Bee"));
    CHECK_THROWS_AS(parse_config(R"({"stage2": {"C": "many"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"M": 4.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"trials": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"M": 16, "M_T": 16})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"ris_sizes": [[0, 4]]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"ris_sizes": []})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"P_dBm": []})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"d_over_lambda": 0.6})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"seed": -1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"mode": "fast"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"stage1": {"peak_threshold": 1.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"stage2": {"T2": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"experiment_id": "a,b"})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/bdris.json"), ConfigError);
}

TEST_CASE("presets validate and round-trip through JSON", "[harness][config]")
{
    for (const auto &name : preset_names())
    {
        const auto c = preset(name);
        CHECK(c.experiment_id == name);
        const auto text = config_to_json(c);
        CHECK(config_to_json(parse_config(text)) == text);
    }
    CHECK_THROWS_AS(preset("fig9"), ConfigError);
    const auto f3 = preset("fig3");
    CHECK(f3.ris_sizes.size() == 3);
    CHECK(f3.trials == 50);
    CHECK(preset("fig4").P_dBm == std::vector<double>{0.0, 10.0, 20.0, 30.0});
}

TEST_CASE("dbm_to_watts", "[harness]")
{
    CHECK_THAT(dbm_to_watts(30.0), WithinRel(1.0, 1e-15));
    CHECK_THAT(dbm_to_watts(20.0), WithinRel(0.1, 1e-15));
    CHECK_THAT(dbm_to_watts(-100.0), WithinRel(1e-13, 1e-12));
}

TEST_CASE("snap_to_grid places paths on bins and grid points", "[harness]")
{
    ArrayGeometry g;
    Rng rng = make_rng(101);
    ScenarioParams s;
    s.L = 3;
    for (int trial = 0; trial < 20; ++trial)
    {
        auto p = sample_paths<double>(s, rng);
        snap_to_grid(p, g, 37, 19, rng);
        std::vector<Index> bins;
        for (const auto &path : p.bs_ris)
        {
            // (d / lambda) cos(iota) M_R lands on an integer (mod M_R)
            const double f = 0.5 * std::cos(path.iota_b) * 16.0;
            CHECK(std::abs(f - std::round(f)) < 1e-9);
            bins.push_back((Index(std::llround(f)) + 16) % 16);
            const double i = path.iota_r * 36.0 / std::numbers::pi, j = path.phi_r * 18.0 / std::numbers::pi;
            CHECK(std::abs(i - std::round(i)) < 1e-9);
            CHECK(std::abs(j - std::round(j)) < 1e-9);
        }
        std::sort(bins.begin(), bins.end());
        CHECK(std::adjacent_find(bins.begin(), bins.end()) == bins.end());
    }
    s.L = 17;
    auto p = sample_paths<double>(s, rng);
    CHECK_THROWS_AS(snap_to_grid(p, g, 37, 19, rng), std::invalid_argument);
}

TEST_CASE("draw_channel depends only on seed and trial", "[harness]")
{
    auto c = tiny();
    const auto a = draw_channel(c, {2, 2}, 3);
    const auto b = draw_channel(c, {2, 2}, 3);
    CHECK(max_abs(a.E - b.E) == 0.0);
    CHECK(max_abs(a.E - draw_channel(c, {2, 2}, 4).E) > 0.0);
    c.P_dBm = {30.0};
    CHECK(max_abs(a.E - draw_channel(c, {2, 2}, 3).E) == 0.0);
}

TEST_CASE("run_experiment record layout and determinism", "[harness][experiment]")
{
    TempDir dir;
    auto c = tiny();
    c.output_dir = dir.path.string();
    const auto rows = run_experiment(c);
    REQUIRE(rows.size() == 8);
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        CHECK(rows[i].P_dBm == (i < 4 ? 0.0 : 10.0));
        CHECK(rows[i].trial == Index(i / 2 % 2));
        CHECK(rows[i].estimator == (i % 2 == 0 ? "baseline" : "proposed"));
        CHECK(rows[i].wall_time_ms == 0.0);
    }
    const std::string first = slurp(c.csv_path());
    CHECK_FALSE(fs::exists(c.csv_path() + ".tmp"));
    run_experiment(c);
    CHECK(slurp(c.csv_path()) == first);

    // thread count does not change the output
    RunOptions one;
    one.threads = 1;
    one.write_csv = false;
    RunOptions three = one;
    three.threads = 3;
    CHECK(to_csv(run_experiment(c, one)) == to_csv(run_experiment(c, three)));
}

TEST_CASE("smoke preset is exact in the noiseless on-grid case", "[harness][experiment]")
{
    auto c = preset("smoke");
    RunOptions o;
    o.write_csv = false;
    const auto rows = run_experiment(c, o);
    REQUIRE(rows.size() == 12);
    for (const auto &r : rows)
    {
        INFO(r.estimator << " N=" << r.N << " trial " << r.trial << " " << r.message);
        REQUIRE_FALSE(r.error);
        CHECK(r.nmse <= (r.estimator == "baseline" ? 1e-10 : 1e-6));
    }
}

TEST_CASE("failing trials become error rows", "[harness][experiment]")
{
    auto c = tiny();
    c.ris_sizes = {{6, 6}};
    c.P_dBm = {10.0};
    c.stage2.policy = SubframePolicy::fixed;
    c.stage2.C = 1; // C M = 16 < N = 36
    c.noise_dBm.reset();
    c.on_grid = true;
    c.stage1.known_L = true;
    c.estimators = EstimatorSet::proposed;
    RunOptions o;
    o.write_csv = false;
    const auto rows = run_experiment(c, o);
    REQUIRE(rows.size() == 2);
    for (const auto &r : rows)
    {
        CHECK(r.error);
        CHECK(std::isnan(r.nmse));
        CHECK_THAT(r.message, ContainsSubstring("C M"));
        CHECK(r.pilot_slots == proposed_budget(c, {6, 6}).slots());
    }
    CHECK_THAT(to_csv(rows), ContainsSubstring(",nan,"));
}

TEST_CASE("CSV round trip and missing columns", "[harness]")
{
    TempDir dir;
    std::vector<MetricsRecord> rows{row("baseline", 16, 20.0, 1.25e-3, 1024), row("proposed", 16, 20.0, NAN, 136)};
    rows[1].error = true;
    rows[1].wall_time_ms = 12.5;
    const auto path = (dir.path / "sub" / "r.csv").string();
    write_csv_atomic(path, rows);
    const auto back = read_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].estimator == "baseline");
    CHECK_THAT(back[0].nmse, WithinRel(1.25e-3, 1e-9));
    CHECK(back[0].pilot_slots == 1024);
    CHECK(std::isnan(back[1].nmse));
    CHECK(back[1].error);
    CHECK(back[1].wall_time_ms == 12.5);
    CHECK(to_csv(back) == to_csv(rows));

    const auto bad = (dir.path / "bad.csv").string();
    std::ofstream(bad) << "experiment_id,trial,M,N,K,P_dBm,estimator,pilot_slots,wall_time_ms,error_flag\n";
    CHECK_THROWS_WITH(read_csv(bad), ContainsSubstring("nmse"));
}

TEST_CASE("aggregate_series averages per-trial ratios and skips error rows", "[harness][plot]")
{
    std::vector<MetricsRecord> rows{row("baseline", 16, 20.0, 1.0), row("baseline", 16, 20.0, 3.0), row("baseline", 16, 20.0, 100.0),
                                    row("baseline", 36, 20.0, 2.0), row("proposed", 16, 20.0, NAN)};
    rows.push_back(row("baseline", 36, 20.0, 1e9));
    rows.back().error = true;
    const auto s = aggregate_series(rows, PlotKind::nmse_vs_N);
    REQUIRE(s.size() == 1);
    CHECK(s[0].label == "baseline");
    CHECK(s[0].x == std::vector<double>{16.0, 36.0});
    REQUIRE(s[0].y.size() == 2);
    CHECK_THAT(s[0].y[0], WithinRel(104.0 / 3.0, 1e-15));
    CHECK(s[0].y[1] == 2.0);

    rows.push_back(row("baseline", 16, 30.0, 5.0));
    const auto by_p = aggregate_series(rows, PlotKind::nmse_vs_N);
    CHECK(by_p.size() == 2);
    CHECK_THAT(by_p[0].label, ContainsSubstring("dBm"));
}

TEST_CASE("emit_plots", "[harness][plot]")
{
    TempDir dir;
    const auto empty = (dir.path / "empty.csv").string();
    write_csv_atomic(empty, {});
    CHECK_THROWS(emit_plots(empty, (dir.path / "out").string()));
    CHECK_FALSE(fs::exists(dir.path / "out" / "nmse_vs_N.svg"));

    const auto single = (dir.path / "single.csv").string();
    write_csv_atomic(single, {row("baseline", 16, 20.0, 0.5, 1024)});
    const auto written = emit_plots(single, (dir.path / "out").string());
    CHECK_FALSE(written.empty());
    for (const auto &p : written)
    {
        const auto svg = slurp(p);
        CHECK_THAT(svg, ContainsSubstring("<svg"));
        CHECK_THAT(svg, ContainsSubstring("</svg>"));
    }
}
