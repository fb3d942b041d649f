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

#include "bdris/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace bdris::harness
{

namespace
{

// NMSE is the average of per-trial ratios
double mean(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

std::string fmt(const char *f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string escape(const std::string &s)
{
    std::string out;
    for (char c : s)
    {
        switch (c)
        {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

} // namespace

std::vector<Series> aggregate_series(const std::vector<MetricsRecord> &rows, PlotKind kind)
{
    const bool nmse_plot = kind != PlotKind::pilots_vs_N;
    std::set<double> powers;
    std::set<Index> sizes;
    for (const auto &r : rows)
    {
        powers.insert(r.P_dBm);
        sizes.insert(r.N);
    }

    // label -> x -> samples
    std::map<std::string, std::map<double, std::vector<double>>> groups;
    for (const auto &r : rows)
    {
        double y;
        if (nmse_plot)
        {
            if (r.error || !std::isfinite(r.nmse))
                continue;
            y = r.nmse;
        }
        else
            y = double(r.pilot_slots);
        std::string label = r.estimator;
        double x = 0.0;
        switch (kind)
        {
        case PlotKind::nmse_vs_N:
            x = double(r.N);
            if (powers.size() > 1)
                label += " @ " + fmt("%g", r.P_dBm) + " dBm";
            break;
        case PlotKind::nmse_vs_power:
            x = r.P_dBm;
            if (sizes.size() > 1)
                label += " @ N=" + std::to_string(r.N);
            break;
        case PlotKind::pilots_vs_N:
            x = double(r.N);
            break;
        }
        groups[label][x].push_back(y);
    }

    std::vector<Series> out;
    for (auto &[label, by_x] : groups)
    {
        Series s{label, {}, {}};
        for (auto &[x, ys] : by_x)
        {
            s.x.push_back(x);
            s.y.push_back(mean(ys));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string render_svg(const std::vector<Series> &series, const std::string &title, const std::string &x_label,
                       const std::string &y_label, bool log_y)
{
    const double W = 640, H = 420, left = 80, right = 180, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto &s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
        {
            if (log_y && !(s.y[i] > 0.0))
                continue;
            const double y = log_y ? std::log10(s.y[i]) : s.y[i];
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (!std::isfinite(x0))
    {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 - x0 <= 0.0)
    {
        const double pad = std::max(1.0, std::abs(x0) * 0.1);
        x0 -= pad;
        x1 += pad;
    }
    else
    {
        const double pad = 0.05 * (x1 - x0);
        x0 -= pad;
        x1 += pad;
    }
    if (log_y)
    {
        y0 = std::floor(y0);
        y1 = std::ceil(y1);
        if (y1 - y0 < 1.0)
            y1 = y0 + 1.0;
    }
    else
    {
        const double span = y1 - y0 > 0.0 ? y1 - y0 : std::max(1.0, std::abs(y0));
        y0 -= 0.05 * span;
        y1 += 0.05 * span;
    }
    const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return top + ph - ((log_y ? std::log10(y) : y) - y0) / (y1 - y0) * ph; };
    const auto py_raw = [&](double ly) { return top + ph - (ly - y0) / (y1 - y0) * ph; };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%g", W) + "\" height=\"" + fmt("%g", H) + "\" viewBox=\"0 0 " +
         fmt("%g", W) + " " + fmt("%g", H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt("%g", left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) + "</text>\n";
    s += "<rect x=\"" + fmt("%g", left) + "\" y=\"" + fmt("%g", top) + "\" width=\"" + fmt("%g", pw) + "\" height=\"" + fmt("%g", ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

    // y ticks
    if (log_y)
    {
        const int step = std::max(1, int(std::ceil((y1 - y0) / 8.0)));
        for (int e = int(y0); e <= int(y1); e += step)
        {
            const double y = py_raw(e);
            s += "<line x1=\"" + fmt("%g", left) + "\" x2=\"" + fmt("%g", left + pw) + "\" y1=\"" + fmt("%.2f", y) + "\" y2=\"" +
                 fmt("%.2f", y) + "\" stroke=\"#ddd\"/>\n";
            s += "<text x=\"" + fmt("%g", left - 6) + "\" y=\"" + fmt("%.2f", y + 4) + "\" text-anchor=\"end\">1e" + std::to_string(e) +
                 "</text>\n";
        }
    }
    else
    {
        for (int i = 0; i <= 5; ++i)
        {
            const double v = y0 + (y1 - y0) * i / 5.0;
            const double y = py_raw(v);
            s += "<line x1=\"" + fmt("%g", left) + "\" x2=\"" + fmt("%g", left + pw) + "\" y1=\"" + fmt("%.2f", y) + "\" y2=\"" +
                 fmt("%.2f", y) + "\" stroke=\"#ddd\"/>\n";
            s += "<text x=\"" + fmt("%g", left - 6) + "\" y=\"" + fmt("%.2f", y + 4) + "\" text-anchor=\"end\">" + fmt("%.3g", v) +
                 "</text>\n";
        }
    }
    // x ticks at the data points
    std::set<double> xs;
    for (const auto &ser : series)
        xs.insert(ser.x.begin(), ser.x.end());
    for (double x : xs)
        s += "<text x=\"" + fmt("%.2f", px(x)) + "\" y=\"" + fmt("%g", top + ph + 18) + "\" text-anchor=\"middle\">" + fmt("%g", x) +
             "</text>\n";
    s += "<text x=\"" + fmt("%g", left + pw / 2) + "\" y=\"" + fmt("%g", H - 15) + "\" text-anchor=\"middle\">" + escape(x_label) +
         "</text>\n";
    s += "<text transform=\"translate(18," + fmt("%g", top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label) +
         "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k)
    {
        const auto &ser = series[k];
        const char *color = palette[k % (sizeof palette / sizeof *palette)];
        std::string pts;
        for (std::size_t i = 0; i < ser.x.size(); ++i)
        {
            if (log_y && !(ser.y[i] > 0.0))
                continue;
            pts += fmt("%.2f", px(ser.x[i])) + "," + fmt("%.2f", py(ser.y[i])) + " ";
            s += "<circle cx=\"" + fmt("%.2f", px(ser.x[i])) + "\" cy=\"" + fmt("%.2f", py(ser.y[i])) + "\" r=\"4\" fill=\"" + color +
                 "\"/>\n";
        }
        if (ser.x.size() > 1)
            s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        const double ly = top + 10 + 18.0 * double(k);
        s += "<line x1=\"" + fmt("%g", left + pw + 12) + "\" x2=\"" + fmt("%g", left + pw + 32) + "\" y1=\"" + fmt("%g", ly) + "\" y2=\"" +
             fmt("%g", ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + fmt("%g", left + pw + 38) + "\" y=\"" + fmt("%g", ly + 4) + "\">" + escape(ser.label) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::vector<std::string> emit_plots(const std::string &csv_path, const std::string &out_dir, const std::vector<PlotKind> &kinds)
{
    namespace fs = std::filesystem;
    const auto rows = read_csv(csv_path);
    if (rows.empty())
        throw std::runtime_error("emit_plots: '" + csv_path + "' has no data rows");

    struct Figure
    {
        const char *file, *title, *x_label, *y_label;
        bool log_y;
    };
    const auto figure = [](PlotKind k) -> Figure {
        switch (k)
        {
        case PlotKind::nmse_vs_N:
            return {"nmse_vs_N.svg", "NMSE vs RIS size", "N (RIS elements)", "NMSE", true};
        case PlotKind::nmse_vs_power:
            return {"nmse_vs_power.svg", "NMSE vs transmit power", "P [dBm]", "NMSE", true};
        case PlotKind::pilots_vs_N:
            return {"pilots_vs_N.svg", "Pilot overhead vs RIS size", "N (RIS elements)", "pilot slots", true};
        }
        return {"plot.svg", "", "", "", false};
    };

    std::vector<std::string> written;
    for (PlotKind k : kinds)
    {
        const auto series = aggregate_series(rows, k);
        if (series.empty())
            continue;
        const Figure f = figure(k);
        fs::create_directories(out_dir);
        const fs::path target = fs::path(out_dir) / f.file;
        const fs::path tmp = target.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("emit_plots: cannot write '" + tmp.string() + "'");
            out << render_svg(series, f.title, f.x_label, f.y_label, f.log_y);
        }
        fs::rename(tmp, target);
        written.push_back(target.string());
    }
    return written;
}

} // namespace bdris::harness
