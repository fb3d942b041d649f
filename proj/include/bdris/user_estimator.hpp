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
#include "bdris/random.hpp"
#include "bdris/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bdris
{

/// Fewer stacked observations than unknowns (C M < N).
struct IdentifiabilityError : Error
{
    using Error::Error;
};

struct Stage2Config
{
    Index C = 0;             ///< subframes; 0 selects ceil(N / M)
    Index T2 = 0;            ///< slots per subframe; 0 selects K
    double power = 1.0;      ///< P [W]
    double noise_var = 0.0;  ///< sigma^2 [W]
    double kappa_max = 1e6;  ///< largest accepted condition number of the stacked F
    Index max_redraws = 8;
};

/// ceil(N / M), the smallest C with C M >= N.
inline Index default_stage2_subframes(const ArrayGeometry &g) { return (g.N() + g.M - 1) / g.M; }

/// Smallest C for which the stacked F = [E Theta_1; ..; E Theta_C] can reach full column
/// rank when E has rank L: C >= ceil(N / M) and C L >= N.
inline Index rank_aware_stage2_subframes(const ArrayGeometry &g, Index L)
{
    L = std::max<Index>(1, std::min(L, g.M));
    return std::max(default_stage2_subframes(g), (g.N() + L - 1) / L);
}

/// Y_c = sum_k sqrt(P) E Theta_c h_k x_k^T + N_c, one M x T2 block per subframe.
template <typename Real, typename Gen>
std::vector<CMatrix<Real>> simulate_stage2_uplink(const ChannelRealization<Real> &ch, const ScatteringSchedule<Real> &sched,
                                                  const CMatrix<Real> &pilots, Real power, Real noise_var, Gen &rng)
{
    const Index K = Index(ch.h.size());
    if (pilots.cols() != K)
        throw std::invalid_argument("simulate_stage2_uplink: one pilot column per user is required");
    if (sched.dim() != ch.E.cols())
        throw std::invalid_argument("simulate_stage2_uplink: schedule dimension must equal N");
    const Real amp = std::sqrt(power);
    std::vector<CMatrix<Real>> out;
    out.reserve(std::size_t(sched.size()));
    for (Index c = 0; c < sched.size(); ++c)
    {
        const CMatrix<Real> f = ch.E * sched.matrix(c);
        CMatrix<Real> y = complex_gaussian_matrix<Real>(ch.E.rows(), pilots.rows(), noise_var, rng);
        for (Index k = 0; k < K; ++k)
            y.noalias() += (amp * (f * ch.h[std::size_t(k)])) * pilots.col(k).transpose();
        out.push_back(std::move(y));
    }
    return out;
}

/// y_(c,k) = Y_c x_k^*.
template <typename Real>
CVector<Real> decorrelate_user(const CMatrix<Real> &y, const CVector<Real> &pilot)
{
    if (y.cols() != pilot.size())
        throw std::invalid_argument("decorrelate_user: pilot length must equal the slot count");
    return y * pilot.conjugate();
}

/// F = [E Theta_1; ..; E Theta_C].
template <typename Real>
CMatrix<Real> stacked_sensing(const CMatrix<Real> &e, const ScatteringSchedule<Real> &sched)
{
    const Index m = e.rows();
    CMatrix<Real> f(m * sched.size(), e.cols());
    for (Index c = 0; c < sched.size(); ++c)
        f.middleRows(c * m, m) = e * sched.matrix(c);
    return f;
}

/// LS estimate h = (1 / sqrt(P)) F^+ [y_1; ..; y_C] with F built from E-hat. Reports,
/// never regularizes, a stacked F whose condition number exceeds kappa_max.
template <typename Real>
CVector<Real> ls_estimate_h(const std::vector<CVector<Real>> &ys, const CMatrix<Real> &e_hat, const ScatteringSchedule<Real> &sched,
                            Real power, Real kappa_max = Real(1e6))
{
    const Index m = e_hat.rows();
    const Index n = e_hat.cols();
    if (Index(ys.size()) != sched.size())
        throw std::invalid_argument("ls_estimate_h: one observation per subframe is required");
    if (sched.size() * m < n)
        throw IdentifiabilityError("ls_estimate_h: C M = " + std::to_string(sched.size() * m) + " < N = " + std::to_string(n));
    if (!(power > Real(0)))
        throw std::invalid_argument("ls_estimate_h: transmit power must be positive");
    CVector<Real> y(m * sched.size());
    for (Index c = 0; c < sched.size(); ++c)
    {
        if (ys[std::size_t(c)].size() != m)
            throw std::invalid_argument("ls_estimate_h: observation length must equal M");
        y.segment(c * m, m) = ys[std::size_t(c)];
    }
    return solve_ls(stacked_sensing(e_hat, sched), y, Real(1) / kappa_max) / std::sqrt(power);
}

template <typename Real>
struct Stage2Draw
{
    ScatteringSchedule<Real> schedule;
    Real inverse_condition = Real(0); ///< of the stacked F-hat for the returned schedule
    Index attempts = 0; ///< draws made
};

/// Random stage-2 schedule, re-drawn while the stacked F-hat is worse conditioned than
/// kappa_max. Returns the best draw after `max_attempts`.
template <typename Real, typename Gen>
Stage2Draw<Real> draw_stage2_schedule(const CMatrix<Real> &e_hat, Index C, Index slot_span, Gen &rng, Real kappa_max = Real(1e6),
                                      Index max_attempts = 8)
{
    const Index n = e_hat.cols();
    std::optional<Stage2Draw<Real>> best;
    Index made = 0;
    while (made < std::max<Index>(1, max_attempts))
    {
        auto sched = build_schedule<Real>(Stage::stage2, n, C, slot_span, rng);
        ++made;
        const Real ratio = inverse_condition(stacked_sensing(e_hat, sched));
        if (!best || ratio > best->inverse_condition)
            best = Stage2Draw<Real>{std::move(sched), ratio, 0};
        if (ratio * kappa_max >= Real(1))
            break;
    }
    best->attempts = made;
    return std::move(*best);
}

} // namespace bdris
