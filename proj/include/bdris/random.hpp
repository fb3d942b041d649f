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

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace bdris
{

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream id); used to split one trial seed into
/// separate channel / noise generators.
inline Rng make_rng(std::uint64_t seed, std::uint32_t stream = 0)
{
    std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32), stream};
    return Rng(seq);
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
template <typename Real, typename Gen>
Complex<Real> complex_gaussian(Real variance, Gen &rng)
{
    if (variance <= Real(0))
        return {};
    std::normal_distribution<Real> n(Real(0), std::sqrt(variance / Real(2)));
    const Real re = n(rng);
    const Real im = n(rng);
    return {re, im};
}

template <typename Real, typename Gen>
CMatrix<Real> complex_gaussian_matrix(Index rows, Index cols, Real variance, Gen &rng)
{
    CMatrix<Real> out(rows, cols);
    if (variance <= Real(0))
        return out.setZero();
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            out(i, j) = complex_gaussian<Real>(variance, rng);
    return out;
}

} // namespace bdris
