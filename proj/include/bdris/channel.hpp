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

#include "bdris/numerics.hpp"
#include "bdris/random.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bdris
{

// Bistatic BS: the first M_R antennas receive, the remaining M_T transmit.
// Both subarrays use a local index origin 0 for their steering vectors.
struct ArrayGeometry
{
    Index M = 32;
    Index M_R = 16;
    Index M_T = 16;
    Index N1 = 4;
    Index N2 = 4;
    double d_over_lambda = 0.5;

    Index N() const { return N1 * N2; }

    void validate() const
    {
        if (M < 1 || M_R < 1 || M_T < 1 || N1 < 1 || N2 < 1)
            throw std::invalid_argument("ArrayGeometry: all antenna and element counts must be >= 1");
        if (M != M_R + M_T)
            throw std::invalid_argument("ArrayGeometry: M must equal M_R + M_T");
        if (!(d_over_lambda > 0.0 && d_over_lambda <= 0.5))
            throw std::invalid_argument("ArrayGeometry: d_over_lambda must lie in (0, 0.5]");
    }
};

template <typename Real>
struct BsRisPath
{
    Complex<Real> gain;
    Real iota_b; ///< elevation at the BS
    Real iota_r; ///< elevation at the RIS
    Real phi_r;  ///< azimuth at the RIS
};

template <typename Real>
struct UserPath
{
    Complex<Real> gain;
    Real iota;
    Real phi;
};

template <typename Real>
struct PathParams
{
    std::vector<BsRisPath<Real>> bs_ris;             ///< L paths
    std::vector<std::vector<UserPath<Real>>> users;  ///< K users, U_k paths each
};

template <typename Real>
struct ChannelRealization
{
    CMatrix<Real> E;              ///< M x N, BS-RIS
    CMatrix<Real> E_R;            ///< M_R x N, receive subarray
    CMatrix<Real> E_T;            ///< M_T x N, transmit subarray
    std::vector<CVector<Real>> h; ///< N x 1 per user, RIS-user
    PathParams<Real> paths;
    std::uint64_t seed = 0;
};

/// Large-scale and multipath parameters for one scenario.
struct ScenarioParams
{
    Index K = 4;
    Index L = 3;
    Index U_k = 4;
    double fc_GHz = 28.0;
    double d_BR_m = 10.0;
    double d_RU_m = 50.0;
    double beta_BR = 2.2;
    double beta_RU = 2.2;
    double shadow_sigma_db = 2.0;
};

namespace detail
{
template <typename Real>
void check_angle(Real a, const char *what)
{
    if (!(a >= Real(0) && a <= std::numbers::pi_v<Real>))
        throw std::invalid_argument(std::string(what) + ": angle outside [0, pi]");
}

template <typename Real>
CVector<Real> phase_ramp(Real spatial_freq, Index n)
{
    CVector<Real> v(n);
    const Real w = Real(-2) * std::numbers::pi_v<Real> * spatial_freq;
    for (Index m = 0; m < n; ++m)
        v(m) = std::polar(Real(1), w * Real(m));
    return v;
}
} // namespace detail

/// ULA response at the BS, element m = exp(-j 2 pi (d/lambda) cos(iota) m).
template <typename Real>
CVector<Real> steering_bs(Real iota, Index m_count, Real d_over_lambda = Real(0.5))
{
    detail::check_angle(iota, "steering_bs");
    return detail::phase_ramp(d_over_lambda * std::cos(iota), m_count);
}

/// UPA response at the RIS: the n1 factor (sin(phi) cos(iota)) Kronecker the n2 factor (sin(iota)).
template <typename Real>
CVector<Real> steering_ris(Real iota, Real phi, Index n1, Index n2, Real d_over_lambda = Real(0.5))
{
    detail::check_angle(iota, "steering_ris");
    detail::check_angle(phi, "steering_ris");
    const auto f1 = detail::phase_ramp(d_over_lambda * std::sin(phi) * std::cos(iota), n1);
    const auto f2 = detail::phase_ramp(d_over_lambda * std::sin(iota), n2);
    return kron(f1, f2);
}

/// PL = 32.4 + 20 log10(fc[GHz]) + 10 beta log10(d[m]) + xi, xi ~ N(0, sigma^2), in dB.
template <typename Gen>
double path_loss_db(double fc_GHz, double dist_m, double beta, double shadow_sigma_db, Gen &rng)
{
    if (!(fc_GHz > 0.0) || !(dist_m > 0.0))
        throw std::invalid_argument("path_loss_db: frequency and distance must be positive");
    double xi = 0.0;
    if (shadow_sigma_db > 0.0)
        xi = std::normal_distribution<double>(0.0, shadow_sigma_db)(rng);
    return 32.4 + 20.0 * std::log10(fc_GHz) + 10.0 * beta * std::log10(dist_m) + xi;
}

/// Uniform draw on the open interval (0, pi).
template <typename Real, typename Gen>
Real sample_angle(Gen &rng)
{
    std::uniform_real_distribution<Real> dist(Real(0), std::numbers::pi_v<Real>);
    Real a;
    do
        a = dist(rng);
    while (a <= Real(0) || a >= std::numbers::pi_v<Real>);
    return a;
}

/// Draws L BS-RIS paths and U_k paths per user. Gains are CN(0, 10^(-PL/10)) with one
/// shadowing draw per link.
template <typename Real, typename Gen>
PathParams<Real> sample_paths(const ScenarioParams &s, Gen &rng)
{
    if (s.L < 1 || s.U_k < 1 || s.K < 1)
        throw std::invalid_argument("sample_paths: L, U_k and K must be >= 1");
    PathParams<Real> p;
    const double pl_b = path_loss_db(s.fc_GHz, s.d_BR_m, s.beta_BR, s.shadow_sigma_db, rng);
    const Real var_b = Real(std::pow(10.0, -pl_b / 10.0));
    for (Index l = 0; l < s.L; ++l)
    {
        BsRisPath<Real> path;
        path.gain = complex_gaussian<Real>(var_b, rng);
        path.iota_b = sample_angle<Real>(rng);
        path.iota_r = sample_angle<Real>(rng);
        path.phi_r = sample_angle<Real>(rng);
        p.bs_ris.push_back(path);
    }
    p.users.resize(s.K);
    for (Index k = 0; k < s.K; ++k)
    {
        const double pl_k = path_loss_db(s.fc_GHz, s.d_RU_m, s.beta_RU, s.shadow_sigma_db, rng);
        const Real var_k = Real(std::pow(10.0, -pl_k / 10.0));
        for (Index l = 0; l < s.U_k; ++l)
        {
            UserPath<Real> path;
            path.gain = complex_gaussian<Real>(var_k, rng);
            path.iota = sample_angle<Real>(rng);
            path.phi = sample_angle<Real>(rng);
            p.users[k].push_back(path);
        }
    }
    return p;
}

template <typename Real>
CMatrix<Real> bs_ris_channel(const std::vector<BsRisPath<Real>> &paths, Index rows, const ArrayGeometry &g)
{
    const Real dl = Real(g.d_over_lambda);
    CMatrix<Real> e = CMatrix<Real>::Zero(rows, g.N());
    for (const auto &p : paths)
        e.noalias() += p.gain * steering_bs(p.iota_b, rows, dl) * steering_ris(p.iota_r, p.phi_r, g.N1, g.N2, dl).transpose();
    return e;
}

template <typename Real>
ChannelRealization<Real> assemble_channels(const PathParams<Real> &p, const ArrayGeometry &g)
{
    g.validate();
    ChannelRealization<Real> ch;
    ch.paths = p;
    ch.E = bs_ris_channel(p.bs_ris, g.M, g);
    ch.E_R = bs_ris_channel(p.bs_ris, g.M_R, g);
    ch.E_T = bs_ris_channel(p.bs_ris, g.M_T, g);
    const Real dl = Real(g.d_over_lambda);
    for (const auto &user : p.users)
    {
        CVector<Real> h = CVector<Real>::Zero(g.N());
        for (const auto &path : user)
            h += path.gain * steering_ris(path.iota, path.phi, g.N1, g.N2, dl);
        ch.h.push_back(std::move(h));
    }
    return ch;
}

/// H_k = h_k^T kron E, the M x N^2 map acting on vec(Theta).
template <typename Real>
CMatrix<Real> cascaded_channel(const CVector<Real> &h, const CMatrix<Real> &E)
{
    if (h.size() != E.cols())
        throw std::invalid_argument("cascaded_channel: h length must equal the column count of E");
    return kron(h.transpose(), E);
}

} // namespace bdris
