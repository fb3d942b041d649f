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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bdris
{

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// ----- Errors ------------------------------------------------------------

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Least-squares system or projection basis lost column rank.
struct RankDeficientError : Error
{
    double smallest_ratio = 0.0; ///< sigma_min / sigma_max at detection
    RankDeficientError(const std::string &what, double ratio) : Error(what), smallest_ratio(ratio) {}
};

/// A numerical precondition of an estimator was not met (zero signal, flat objective, ...).
struct DegenerateInputError : Error
{
    using Error::Error;
};

// ----- Basic contracts ---------------------------------------------------

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived> &a)
{
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
        {
            const auto v = a(i, j);
            if (!std::isfinite(std::real(v)) || !std::isfinite(std::imag(v)))
                return false;
        }
    return true;
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived> &a, const char *what)
{
    if (!all_finite(a))
        throw std::invalid_argument(std::string(what) + ": matrix contains NaN or Inf");
}

/// Unitary n x n DFT matrix, entry (m1, m2) = exp(-j 2 pi m1 m2 / n) / sqrt(n), 0-based.
template <typename Real = double>
CMatrix<Real> dft_matrix(Index n)
{
    if (n < 1)
        throw std::invalid_argument("dft_matrix: n must be >= 1");
    CMatrix<Real> u(n, n);
    const Real scale = Real(1) / std::sqrt(Real(n));
    const Real step = Real(-2) * std::numbers::pi_v<Real> / Real(n);
    for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r)
        {
            // reduce the exponent modulo n before the trig call to keep large n exact
            const Index k = (r * c) % n;
            u(r, c) = std::polar(scale, step * Real(k));
        }
    return u;
}

/// Kronecker product; block (i, j) of the result is a(i, j) * b.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA> &a, const Eigen::MatrixBase<DerivedB> &b)
{
    using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar, typename DerivedB::Scalar>::ReturnType;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = Scalar(a(i, j)) * b.template cast<Scalar>();
    return out;
}

/// Column-major vectorization: vec(a)[j * rows + i] = a(i, j).
template <typename Derived>
auto vec(const Eigen::MatrixBase<Derived> &a)
{
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m = a; // column-major storage
    return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(m.data(), m.size()));
}

// ----- SVD-backed routines -----------------------------------------------

template <typename Real>
struct Svd
{
    CMatrix<Real> u;      ///< left singular vectors (thin)
    RVector<Real> values; ///< descending, nonnegative
    CMatrix<Real> v;      ///< right singular vectors (thin); a = u * diag(values) * v^H
};

template <typename Real>
Svd<Real> svd(const CMatrix<Real> &a)
{
    if (a.size() == 0)
        return {CMatrix<Real>(a.rows(), 0), RVector<Real>(0), CMatrix<Real>(a.cols(), 0)};
    Eigen::BDCSVD<CMatrix<Real>> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Moore-Penrose pseudo-inverse. Singular values <= tol are treated as zero;
/// a negative tol selects max(rows, cols) * eps * sigma_max.
template <typename Real>
CMatrix<Real> pinv(const CMatrix<Real> &a, Real tol = Real(-1))
{
    const auto dec = svd(a);
    CMatrix<Real> out = CMatrix<Real>::Zero(a.cols(), a.rows());
    if (dec.values.size() == 0)
        return out;
    const Real smax = dec.values(0);
    if (tol < Real(0))
        tol = Real(std::max(a.rows(), a.cols())) * std::numeric_limits<Real>::epsilon() * smax;
    for (Index i = 0; i < dec.values.size(); ++i)
    {
        const Real s = dec.values(i);
        if (s > tol && s > Real(0))
            out.noalias() += (dec.v.col(i) / s) * dec.u.col(i).adjoint();
    }
    return out;
}

/// Ratio sigma_min / sigma_max; zero for an all-zero matrix.
template <typename Real>
Real inverse_condition(const CMatrix<Real> &a)
{
    const auto dec = svd(a);
    const Index n = dec.values.size();
    if (n == 0 || dec.values(0) <= Real(0))
        return Real(0);
    // a wide matrix never has full column rank
    if (a.rows() < a.cols())
        return Real(0);
    return dec.values(n - 1) / dec.values(0);
}

/// Least-squares solution of min ||a x - y||_2 for a tall matrix of full column rank.
/// Throws RankDeficientError when sigma_min < rank_tol * sigma_max.
template <typename Real>
CVector<Real> solve_ls(const CMatrix<Real> &a, const CVector<Real> &y, Real rank_tol = Real(1e-10))
{
    if (a.rows() != y.rows())
        throw std::invalid_argument("solve_ls: row count of a and y differ");
    if (a.rows() < a.cols())
        throw RankDeficientError("solve_ls: system has fewer rows than unknowns", 0.0);
    const auto dec = svd(a);
    const Index n = a.cols();
    const Real smax = n > 0 ? dec.values(0) : Real(0);
    const Real smin = n > 0 ? dec.values(n - 1) : Real(0);
    if (smax <= Real(0) || smin < rank_tol * smax)
    {
        const double ratio = smax > Real(0) ? double(smin / smax) : 0.0;
        throw RankDeficientError("solve_ls: matrix is rank deficient (sigma_min / sigma_max = " + std::to_string(ratio) + ")", ratio);
    }
    CVector<Real> coeff = dec.u.adjoint() * y;
    coeff.array() /= dec.values.array().template cast<Complex<Real>>();
    return dec.v * coeff;
}

/// Frobenius distance of a^H a from the identity.
template <typename Real>
Real unitarity_error(const CMatrix<Real> &a)
{
    return (a.adjoint() * a - CMatrix<Real>::Identity(a.cols(), a.cols())).norm();
}

} // namespace bdris
