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

// Shared helpers for the unit tests: seeded generators and brute-force oracles.

#pragma once

#include "bdris/numerics.hpp"
#include "bdris/random.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

namespace bdris::test
{

using C = std::complex<double>;
using Mat = CMatrix<double>;
using Vec = CVector<double>;

inline Mat random_matrix(Index r, Index c, Rng &rng) { return complex_gaussian_matrix<double>(r, c, 1.0, rng); }

inline Vec random_vector(Index n, Rng &rng) { return random_matrix(n, 1, rng); }

inline Index random_dim(Rng &rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

inline double random_real(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline double max_abs(const Mat &a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// Element-by-element Kronecker product, written independently of bdris::kron.
inline Mat kron_oracle(const Mat &a, const Mat &b)
{
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            for (Index k = 0; k < b.rows(); ++k)
                for (Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

/// Column-major stacking by explicit loops.
inline Vec vec_oracle(const Mat &a)
{
    Vec v(a.size());
    Index k = 0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            v(k++) = a(i, j);
    return v;
}

} // namespace bdris::test
