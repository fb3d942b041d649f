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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bdris
{

/// Largest deviation of X^H X from the identity; X holds one pilot sequence per column.
template <typename Real>
Real pilot_orthogonality_error(const CMatrix<Real> &pilots)
{
    return (pilots.adjoint() * pilots - CMatrix<Real>::Identity(pilots.cols(), pilots.cols())).cwiseAbs().maxCoeff();
}

/// Decorrelated cascaded-channel observations. Column tau of y[k] is
/// sqrt(P) H_k vec(Theta_tau) + noise.
template <typename Real>
struct BaselineMeasurement
{
    std::vector<CMatrix<Real>> y; ///< per user, M x N^2
    ScatteringSchedule<Real> schedule;
    Real power = Real(1);     ///< P in watts
    Real noise_var = Real(0); ///< sigma^2 in watts
    Index pilot_slots = 0;
};

/// Uplink training for the cascaded estimator. Slots are grouped into N^2 blocks; the
/// scattering matrix is fixed within a block while the K users send orthonormal pilot
/// sequences (columns of `pilots`, block length = pilots.rows()).
template <typename Real, typename Gen>
BaselineMeasurement<Real> simulate_baseline_uplink(const ChannelRealization<Real> &ch, const ScatteringSchedule<Real> &sched,
                                                   const CMatrix<Real> &pilots, Real power, Real noise_var, Gen &rng)
{
    const Index M = ch.E.rows();
    const Index N = ch.E.cols();
    const Index K = Index(ch.h.size());
    if (sched.dim() != N || sched.size() != N * N)
        throw std::invalid_argument("simulate_baseline_uplink: schedule must hold N^2 matrices of size N x N");
    if (pilots.cols() != K || pilots.rows() != sched.slot_span())
        throw std::invalid_argument("simulate_baseline_uplink: pilots must be (slot span) x K");
    if (pilot_orthogonality_error(pilots) > Real(1e-9))
        throw std::invalid_argument("simulate_baseline_uplink: pilots are not orthonormal");

    const Real amp = std::sqrt(power);
    BaselineMeasurement<Real> meas{std::vector<CMatrix<Real>>(std::size_t(K), CMatrix<Real>(M, N * N)), sched, power, noise_var,
                                   sched.total_slots()};
    CMatrix<Real> contrib(M, K);
    for (Index tau = 0; tau < sched.size(); ++tau)
    {
        for (Index k = 0; k < K; ++k)
            contrib.col(k) = amp * (ch.E * sched.apply(tau, ch.h[std::size_t(k)]));
        // received block, one column per slot
        CMatrix<Real> block = contrib * pilots.transpose();
        block += complex_gaussian_matrix<Real>(M, pilots.rows(), noise_var, rng);
        const CMatrix<Real> decorrelated = block * pilots.conjugate();
        for (Index k = 0; k < K; ++k)
            meas.y[std::size_t(k)].col(tau) = decorrelated.col(k);
    }
    return meas;
}

/// Cascaded LS estimate per user, H_k = (1 / (sqrt(P) N)) sum_tau y_tau vec(Theta_tau)^H.
/// Requires a schedule whose vectorization Gram matrix is N I (N^2 matrices).
template <typename Real>
std::vector<CMatrix<Real>> estimate_cascaded_ls(const BaselineMeasurement<Real> &meas)
{
    const auto &sched = meas.schedule;
    const Index N = sched.dim();
    if (sched.size() != N * N)
        throw std::invalid_argument("estimate_cascaded_ls: schedule must hold N^2 matrices");
    if (!(meas.power > Real(0)))
        throw std::invalid_argument("estimate_cascaded_ls: transmit power must be positive");

    // The complete clock-and-shift family is orthogonal by construction; anything else is checked.
    if (!sched.is_clock_shift())
    {
        const CMatrix<Real> gram = sched.vectorization_gram();
        const Real dev = (gram - Real(N) * CMatrix<Real>::Identity(N * N, N * N)).cwiseAbs().maxCoeff();
        if (dev > Real(1e-6))
            throw DegenerateInputError("estimate_cascaded_ls: schedule is not vectorization-orthogonal (Gram deviation " +
                                       std::to_string(double(dev)) + ")");
    }

    const Real scale = Real(1) / (std::sqrt(meas.power) * Real(N));
    std::vector<CMatrix<Real>> out;
    out.reserve(meas.y.size());
    const Real w = Real(2) * std::numbers::pi_v<Real> / Real(N);
    for (const auto &y : meas.y)
    {
        const Index M = y.rows();
        CMatrix<Real> h = CMatrix<Real>::Zero(M, N * N);
        if (sched.is_clock_shift())
        {
            // vec(Theta_(p,q)) is nonzero only at j N + (j + q) mod N with value w^(p i)
            for (Index tau = 0; tau < sched.size(); ++tau)
            {
                const auto [p, q] = sched.clock_shift_index(tau);
                for (Index j = 0; j < N; ++j)
                {
                    const Index i = (j + q) % N;
                    const Complex<Real> c = std::polar(Real(1), -w * Real((p * i) % N));
                    h.col(j * N + i) += c * y.col(tau);
                }
            }
        }
        else
        {
            for (Index tau = 0; tau < sched.size(); ++tau)
                h.noalias() += y.col(tau) * vec(sched.matrix(tau)).adjoint();
        }
        out.push_back(scale * h);
    }
    return out;
}

} // namespace bdris
