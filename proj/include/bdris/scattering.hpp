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

#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bdris
{

enum class Stage
{
    baseline,
    stage1,
    stage2
};

/// Clock-and-shift matrix D^p * Pi^q with D = diag(w^0 .. w^(N-1)), w = exp(j 2 pi / N),
/// and Pi the cyclic shift (Pi e_j = e_(j+1 mod N)). Column j holds a single entry
/// w^(p i) at row i = (j + q) mod N.
template <typename Real>
CMatrix<Real> clock_shift(Index N, Index p, Index q)
{
    CMatrix<Real> t = CMatrix<Real>::Zero(N, N);
    const Real w = Real(2) * std::numbers::pi_v<Real> / Real(N);
    for (Index j = 0; j < N; ++j)
    {
        const Index i = (j + q) % N;
        t(i, j) = std::polar(Real(1), w * Real((p * i) % N));
    }
    return t;
}

/// All N^2 clock-and-shift matrices, ordered by tau = p * N + q.
/// trace(Theta_a^H Theta_b) = N delta_ab.
template <typename Real>
std::vector<CMatrix<Real>> weyl_heisenberg_basis(Index N)
{
    if (N < 1)
        throw std::invalid_argument("weyl_heisenberg_basis: N must be >= 1");
    std::vector<CMatrix<Real>> out;
    out.reserve(std::size_t(N * N));
    for (Index p = 0; p < N; ++p)
        for (Index q = 0; q < N; ++q)
            out.push_back(clock_shift<Real>(N, p, q));
    return out;
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the phases of diag(R) removed.
template <typename Real, typename Gen>
CMatrix<Real> random_unitary(Index N, Gen &rng)
{
    if (N < 1)
        throw std::invalid_argument("random_unitary: N must be >= 1");
    const CMatrix<Real> g = complex_gaussian_matrix<Real>(N, N, Real(1), rng);
    Eigen::HouseholderQR<CMatrix<Real>> qr(g);
    CMatrix<Real> q = qr.householderQ();
    const CMatrix<Real> r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Index i = 0; i < N; ++i)
    {
        const Real mag = std::abs(r(i, i));
        if (mag > Real(0))
            q.col(i) *= r(i, i) / mag;
    }
    return q;
}

/// Sequence of unitary scattering matrices, each held for slot_span() consecutive slots.
///
/// The baseline family is stored implicitly as (p, q) clock-and-shift indices; at N = 64
/// the dense form would need N^4 complex entries.
template <typename Real>
class ScatteringSchedule
{
public:
    static ScatteringSchedule clock_shift_family(Index N, Index slot_span)
    {
        ScatteringSchedule s(Stage::baseline, N, slot_span);
        s.indices_.reserve(std::size_t(N * N));
        for (Index p = 0; p < N; ++p)
            for (Index q = 0; q < N; ++q)
                s.indices_.emplace_back(p, q);
        return s;
    }

    static ScatteringSchedule dense(Stage stage, std::vector<CMatrix<Real>> matrices, Index slot_span)
    {
        if (matrices.empty())
            throw std::invalid_argument("ScatteringSchedule: at least one matrix is required");
        const Index n = matrices.front().rows();
        for (const auto &m : matrices)
            if (m.rows() != n || m.cols() != n)
                throw std::invalid_argument("ScatteringSchedule: matrices must be square and equally sized");
        ScatteringSchedule s(stage, n, slot_span);
        s.dense_ = std::move(matrices);
        return s;
    }

    Stage stage() const { return stage_; }
    Index dim() const { return n_; }
    Index slot_span() const { return span_; }
    Index size() const { return is_clock_shift() ? Index(indices_.size()) : Index(dense_.size()); }
    Index total_slots() const { return size() * span_; }
    bool is_clock_shift() const { return !indices_.empty(); }

    std::pair<Index, Index> clock_shift_index(Index i) const { return indices_.at(std::size_t(i)); }

    CMatrix<Real> matrix(Index i) const
    {
        if (is_clock_shift())
        {
            const auto [p, q] = indices_.at(std::size_t(i));
            return clock_shift<Real>(n_, p, q);
        }
        return dense_.at(std::size_t(i));
    }

    /// Theta_i * x without forming Theta_i for the clock-and-shift family.
    CVector<Real> apply(Index i, const CVector<Real> &x) const
    {
        if (!is_clock_shift())
            return dense_.at(std::size_t(i)) * x;
        const auto [p, q] = indices_.at(std::size_t(i));
        const Real w = Real(2) * std::numbers::pi_v<Real> / Real(n_);
        CVector<Real> y(n_);
        for (Index r = 0; r < n_; ++r)
            y(r) = std::polar(Real(1), w * Real((p * r) % n_)) * x((r - q % n_ + n_) % n_);
        return y;
    }

    /// Gram matrix of the vectorizations, G(a, b) = vec(Theta_a)^H vec(Theta_b). O(size^2 N^2).
    CMatrix<Real> vectorization_gram() const
    {
        const Index n2 = n_ * n_;
        CMatrix<Real> phi(n2, size());
        for (Index i = 0; i < size(); ++i)
            phi.col(i) = vec(matrix(i));
        return phi.adjoint() * phi;
    }

private:
    ScatteringSchedule(Stage stage, Index n, Index span) : stage_(stage), n_(n), span_(span)
    {
        if (n < 1 || span < 1)
            throw std::invalid_argument("ScatteringSchedule: dimension and slot span must be >= 1");
    }

    Stage stage_;
    Index n_;
    Index span_;
    std::vector<std::pair<Index, Index>> indices_;
    std::vector<CMatrix<Real>> dense_;
};

/// Baseline: the N^2 clock-and-shift matrices in fixed order, `count` must equal N^2.
/// stage1 / stage2: `count` independent random unitaries.
template <typename Real, typename Gen>
ScatteringSchedule<Real> build_schedule(Stage stage, Index N, Index count, Index slot_span, Gen &rng)
{
    if (N < 1 || count < 1)
        throw std::invalid_argument("build_schedule: N and count must be >= 1");
    if (stage == Stage::baseline)
    {
        if (count != N * N)
            throw std::invalid_argument("build_schedule: the baseline schedule needs exactly N^2 matrices");
        return ScatteringSchedule<Real>::clock_shift_family(N, slot_span);
    }
    std::vector<CMatrix<Real>> m;
    m.reserve(std::size_t(count));
    for (Index i = 0; i < count; ++i)
        m.push_back(random_unitary<Real>(N, rng));
    return ScatteringSchedule<Real>::dense(stage, std::move(m), slot_span);
}

} // namespace bdris
