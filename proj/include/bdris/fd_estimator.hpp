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

// Full-duplex estimation of the BS-RIS channel E from the reflected pilots
// Y_b = sqrt(P) E_R Theta_b E_T^T S + N_b, b = 1..B:
//
//   1. beamspace row powers of U^H [Z_1 .. Z_B] give the BS elevation bins,
//   2. a phase-ramp rotation refines each bin to an off-grid elevation,
//   3. projecting onto the estimated BS steering subspaces leaves
//      sqrt(P) Gamma A^T Theta_b A Gamma, whose diagonals identify the RIS
//      angles by dictionary correlation,
//   4. the matrix of gain products alpha_m alpha_n is factored to recover
//      the gains up to a global sign, and E = B Gamma A^T is rebuilt.

#pragma once

#include "bdris/channel.hpp"
#include "bdris/numerics.hpp"
#include "bdris/random.hpp"
#include "bdris/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdris
{

struct FdStage1Config
{
    Index B = 0;                  ///< subframes; 0 selects default_fd_subframes()
    Index T = 0;                  ///< slots per subframe; 0 selects max(M_T, L)
    double power = 1.0;           ///< P [W]
    double noise_var = 0.0;       ///< effective noise incl. residual self-interference [W]
    Index grid_iota = 180;        ///< RIS elevation grid points over [0, pi]
    Index grid_phi = 180;         ///< RIS azimuth grid points over [0, pi]
    double rotation_step = 0.0;   ///< epsilon; 0 selects 1 / (16 M_R)
    double peak_threshold = 0.2;  ///< rho
    Index known_L = 0;            ///< > 0 keeps exactly the top-L peaks
};

/// B = max(ceil(log2 M), ceil(log2 N^2)).
inline Index default_fd_subframes(const ArrayGeometry &g)
{
    const auto clog2 = [](double x) { return Index(std::ceil(std::log2(x) - 1e-12)); };
    return std::max<Index>({Index(1), clog2(double(g.M)), clog2(double(g.N()) * double(g.N()))});
}

inline Index default_fd_slots(const ArrayGeometry &g, Index L) { return std::max(g.M_T, L); }

inline double default_rotation_step(Index M_R) { return 1.0 / (16.0 * double(M_R)); }

/// First M_T rows of the T-point DFT matrix, so S S^H = I_(M_T). Requires T >= M_T.
template <typename Real>
CMatrix<Real> fd_pilot_matrix(Index M_T, Index T)
{
    if (T < M_T)
        throw std::invalid_argument("fd_pilot_matrix: T must be >= M_T for S S^H = I");
    return dft_matrix<Real>(T).topRows(M_T);
}

template <typename Real, typename Gen>
std::vector<CMatrix<Real>> simulate_fd_rx(const ChannelRealization<Real> &ch, const ScatteringSchedule<Real> &sched,
                                          const CMatrix<Real> &S, Real power, Real noise_var, Gen &rng)
{
    if (sched.dim() != ch.E_R.cols() || S.rows() != ch.E_T.rows())
        throw std::invalid_argument("simulate_fd_rx: dimension mismatch between channel, schedule and pilots");
    const Real amp = std::sqrt(power);
    const CMatrix<Real> tx = ch.E_T.transpose() * S; // N x T
    std::vector<CMatrix<Real>> out;
    out.reserve(std::size_t(sched.size()));
    for (Index b = 0; b < sched.size(); ++b)
    {
        CMatrix<Real> y = amp * (ch.E_R * (sched.matrix(b) * tx));
        y += complex_gaussian_matrix<Real>(y.rows(), y.cols(), noise_var, rng);
        out.push_back(std::move(y));
    }
    return out;
}

/// Z_b = Y_b S^H = sqrt(P) E_R Theta_b E_T^T + noise.
template <typename Real>
std::vector<CMatrix<Real>> decorrelate_pilots(const std::vector<CMatrix<Real>> &ys, const CMatrix<Real> &S)
{
    std::vector<CMatrix<Real>> out;
    out.reserve(ys.size());
    for (const auto &y : ys)
    {
        if (y.cols() != S.cols())
            throw std::invalid_argument("decorrelate_pilots: received block and pilot length differ");
        out.push_back(y * S.adjoint());
    }
    return out;
}

namespace detail
{
template <typename Real>
CMatrix<Real> hstack(const std::vector<CMatrix<Real>> &blocks)
{
    if (blocks.empty())
        throw std::invalid_argument("hstack: no blocks");
    Index cols = 0;
    for (const auto &b : blocks)
        cols += b.cols();
    CMatrix<Real> out(blocks.front().rows(), cols);
    Index c = 0;
    for (const auto &b : blocks)
    {
        out.middleCols(c, b.cols()) = b;
        c += b.cols();
    }
    return out;
}
} // namespace detail

// ----- BS elevation ------------------------------------------------------

template <typename Real>
struct ElevationDetection
{
    std::vector<Index> bins;  ///< 0-based beamspace rows, strongest first
    RVector<Real> row_power;  ///< power of every row of U^H [Z_1 .. Z_B]
};

/// Beamspace peak picking on the received-subarray DFT rows.
template <typename Real>
ElevationDetection<Real> detect_bs_elevations(const std::vector<CMatrix<Real>> &zs, double peak_threshold, Index known_L = 0)
{
    const CMatrix<Real> z = detail::hstack(zs);
    const Index m_r = z.rows();
    const CMatrix<Real> ybar = dft_matrix<Real>(m_r).adjoint() * z;

    ElevationDetection<Real> det;
    det.row_power = ybar.rowwise().squaredNorm();
    const Real pmax = det.row_power.maxCoeff();
    if (!(pmax > std::numeric_limits<Real>::min()) || !std::isfinite(pmax))
        throw DegenerateInputError("detect_bs_elevations: no signal power in any beamspace row");

    const auto &p = det.row_power;
    std::vector<Index> peaks;
    if (m_r == 1)
        peaks.push_back(0);
    for (Index m = 0; m_r > 1 && m < m_r; ++m)
    {
        const Real left = p((m + m_r - 1) % m_r);
        const Real right = p((m + 1) % m_r);
        if (p(m) > left && p(m) >= right)
            peaks.push_back(m);
    }
    const auto by_power = [&](Index a, Index b) { return p(a) > p(b) || (p(a) == p(b) && a < b); };
    std::stable_sort(peaks.begin(), peaks.end(), by_power);

    if (known_L > 0)
    {
        // top-L peaks, topped up with the strongest remaining rows when there are too few maxima
        if (Index(peaks.size()) < known_L)
        {
            std::vector<Index> rest;
            for (Index m = 0; m < m_r; ++m)
                if (std::find(peaks.begin(), peaks.end(), m) == peaks.end())
                    rest.push_back(m);
            std::stable_sort(rest.begin(), rest.end(), by_power);
            for (Index m : rest)
                if (Index(peaks.size()) < known_L)
                    peaks.push_back(m);
        }
        peaks.resize(std::size_t(std::min<Index>(known_L, Index(peaks.size()))));
    }
    else
    {
        const Real floor = Real(peak_threshold) * pmax;
        std::erase_if(peaks, [&](Index m) { return p(m) < floor; });
    }
    det.bins = std::move(peaks);
    return det;
}

/// cos(iota) for a beamspace bin shifted by the rotation nu, using the two-branch
/// alias map and clipped to [-1, 1].
template <typename Real>
Real elevation_cosine(Index bin, Real nu, Index M_R, Real d_over_lambda)
{
    const Real mr = Real(M_R);
    Real num = Real(bin) - mr * nu;
    // branch on the refined frequency so the Nyquist bin can fold either way
    if (num / mr > d_over_lambda)
        num -= mr;
    return std::clamp(num / (mr * d_over_lambda), Real(-1), Real(1));
}

/// Symmetric rotation grid {0, +-eps, +-2 eps, ...} covering [-1/(2 M_R), 1/(2 M_R)].
template <typename Real>
std::vector<Real> rotation_grid(Index M_R, Real step)
{
    if (!(step > Real(0)))
        throw std::invalid_argument("rotation_grid: step must be positive");
    const Real half = Real(1) / (Real(2) * Real(M_R));
    const Index n = Index(std::floor(half / step + Real(1e-9)));
    std::vector<Real> g;
    g.reserve(std::size_t(2 * n + 1));
    for (Index i = -n; i <= n; ++i)
        g.push_back(Real(i) * step);
    return g;
}

/// ||row `bin` of U^H Lambda(nu)^H Z||^2 with Lambda(nu) = diag(exp(j 2 pi x nu)).
template <typename Real>
Real rotation_objective(const CMatrix<Real> &z, Index bin, Real nu)
{
    const Index m_r = z.rows();
    CVector<Real> w(m_r);
    const Real scale = Real(1) / std::sqrt(Real(m_r));
    for (Index x = 0; x < m_r; ++x)
    {
        // exponent reduced modulo 1 cycle before the trig call
        const Real cyc = Real((x * bin) % m_r) / Real(m_r) - Real(x) * nu;
        w(x) = std::polar(scale, Real(2) * std::numbers::pi_v<Real> * cyc);
    }
    return (w.transpose() * z).squaredNorm();
}

template <typename Real>
struct ElevationRefinement
{
    Index bin = 0;
    Real nu = Real(0);
    Real cos_iota = Real(0);
    Real iota = Real(0);
    bool at_boundary = false;    ///< optimum on the edge of the rotation grid
    std::vector<Real> nu_grid;
    std::vector<Real> objective; ///< objective at every nu_grid point
};

template <typename Real>
ElevationRefinement<Real> refine_elevation_stacked(const CMatrix<Real> &z, Index bin, Real step, Real d_over_lambda)
{
    const Index m_r = z.rows();
    if (bin < 0 || bin >= m_r)
        throw std::invalid_argument("refine_elevation: bin outside [0, M_R)");
    ElevationRefinement<Real> r;
    r.bin = bin;
    r.nu_grid = rotation_grid<Real>(m_r, step);
    r.objective.reserve(r.nu_grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < r.nu_grid.size(); ++i)
    {
        r.objective.push_back(rotation_objective(z, bin, r.nu_grid[i]));
        if (r.objective[i] > r.objective[best])
            best = i;
    }
    r.nu = r.nu_grid[best];
    r.at_boundary = r.nu_grid.size() > 1 && (best == 0 || best + 1 == r.nu_grid.size());
    r.cos_iota = elevation_cosine(bin, r.nu, m_r, d_over_lambda);
    // Exactly on the fold frequency both branches give the same response; the
    // objective slope says which side the path lies on.
    const Real mr = Real(m_r);
    if (std::abs((Real(bin) - mr * r.nu) / mr - d_over_lambda) < Real(1e-12) && best > 0 && best + 1 < r.nu_grid.size() &&
        r.objective[best - 1] > r.objective[best + 1])
        r.cos_iota = std::clamp((Real(bin) - mr * r.nu - mr) / (mr * d_over_lambda), Real(-1), Real(1));
    r.iota = std::acos(r.cos_iota);
    return r;
}

template <typename Real>
ElevationRefinement<Real> refine_elevation(const std::vector<CMatrix<Real>> &zs, Index bin, Real step, Real d_over_lambda)
{
    return refine_elevation_stacked(detail::hstack(zs), bin, step, d_over_lambda);
}

/// Truncated BS steering matrices at the estimated elevations (local origin 0 on both subarrays).
template <typename Real>
std::pair<CMatrix<Real>, CMatrix<Real>> reconstruct_B(const std::vector<Real> &iota_b, const ArrayGeometry &g)
{
    if (iota_b.empty())
        throw std::invalid_argument("reconstruct_B: at least one elevation is required");
    const Index l = Index(iota_b.size());
    CMatrix<Real> br(g.M_R, l), bt(g.M_T, l);
    for (Index i = 0; i < l; ++i)
    {
        br.col(i) = steering_bs(iota_b[std::size_t(i)], g.M_R, Real(g.d_over_lambda));
        bt.col(i) = steering_bs(iota_b[std::size_t(i)], g.M_T, Real(g.d_over_lambda));
    }
    return {br, bt};
}

/// Y~_b = B_R^+ Z_b (B_T^T)^+, approximately sqrt(P) Gamma A^T Theta_b A Gamma.
template <typename Real>
std::vector<CMatrix<Real>> project_to_path_domain(const std::vector<CMatrix<Real>> &zs, const CMatrix<Real> &b_r,
                                                  const CMatrix<Real> &b_t, Real rank_tol = Real(1e-10))
{
    for (const auto *b : {&b_r, &b_t})
    {
        const Real ratio = inverse_condition(*b);
        if (ratio < rank_tol)
            throw RankDeficientError("project_to_path_domain: BS steering basis is rank deficient", double(ratio));
    }
    const CMatrix<Real> left = pinv(b_r);
    const CMatrix<Real> right = pinv(CMatrix<Real>(b_t.transpose()));
    std::vector<CMatrix<Real>> out;
    out.reserve(zs.size());
    for (const auto &z : zs)
        out.push_back(left * z * right);
    return out;
}

// ----- RIS angles --------------------------------------------------------

/// Search dictionary of RIS steering vectors over a G_iota x G_phi grid on [0, pi]^2.
/// Grid index g = i_iota * G_phi + i_phi.
template <typename Real>
class RisAngleGrid
{
public:
    RisAngleGrid(const ArrayGeometry &g, Index grid_iota, Index grid_phi) : n1_(g.N1), n2_(g.N2), gi_(grid_iota), gp_(grid_phi)
    {
        if (grid_iota < 2 || grid_phi < 2)
            throw std::invalid_argument("RisAngleGrid: at least two points per axis are required");
        steering_.resize(g.N(), gi_ * gp_);
        for (Index i = 0; i < gi_; ++i)
            for (Index j = 0; j < gp_; ++j)
                steering_.col(i * gp_ + j) = steering_ris(iota(i), phi(j), n1_, n2_, Real(g.d_over_lambda));
    }

    Real iota(Index i) const { return std::numbers::pi_v<Real> * Real(i) / Real(gi_ - 1); }
    Real phi(Index j) const { return std::numbers::pi_v<Real> * Real(j) / Real(gp_ - 1); }
    Index size() const { return gi_ * gp_; }
    Index iota_points() const { return gi_; }
    Index phi_points() const { return gp_; }
    std::pair<Real, Real> angles(Index g) const { return {iota(g / gp_), phi(g % gp_)}; }
    const CMatrix<Real> &steering() const { return steering_; }

    bool matches(const ArrayGeometry &g, Index grid_iota, Index grid_phi) const
    {
        return g.N1 == n1_ && g.N2 == n2_ && grid_iota == gi_ && grid_phi == gp_;
    }

private:
    Index n1_, n2_, gi_, gp_;
    CMatrix<Real> steering_; // N x (G_iota G_phi)
};

/// Phi = [theta_1^T; ..; theta_B^T] with theta_b = vec(Theta_b) (column-major), so that
/// a^T Theta_b a' = theta_b^T (a' kron a).
template <typename Real>
CMatrix<Real> sensing_matrix(const ScatteringSchedule<Real> &sched)
{
    const Index n = sched.dim();
    CMatrix<Real> phi(sched.size(), n * n);
    for (Index b = 0; b < sched.size(); ++b)
        phi.row(b) = vec(sched.matrix(b)).transpose();
    return phi;
}

/// Phi (a_g kron a_g) for every dictionary entry, returned as B x G. Uses
/// theta_b^T (a kron a) = a^T Theta_b a to avoid forming the N^2-length atoms.
template <typename Real>
CMatrix<Real> dictionary_response(const ScatteringSchedule<Real> &sched, const RisAngleGrid<Real> &grid)
{
    const auto &a = grid.steering();
    CMatrix<Real> out(sched.size(), grid.size());
    CMatrix<Real> ta(a.rows(), a.cols());
    for (Index b = 0; b < sched.size(); ++b)
    {
        ta.noalias() = sched.matrix(b) * a;
        out.row(b) = a.cwiseProduct(ta).colwise().sum();
    }
    return out;
}

template <typename Real>
struct RisAngleEstimate
{
    Real iota = Real(0);
    Real phi = Real(0);
    Index grid_index = 0;
    Real correlation = Real(0); ///< normalized correlation at the optimum, in [0, 1]
};

/// Normalized-correlation grid search on q_mm = [Y~_1(m, m) .. Y~_B(m, m)]^T for every
/// detected path m. Ties go to the smallest grid index.
template <typename Real>
std::vector<RisAngleEstimate<Real>> estimate_ris_angles(const std::vector<CMatrix<Real>> &ytilde, const CMatrix<Real> &response,
                                                        const RisAngleGrid<Real> &grid)
{
    if (ytilde.empty() || Index(ytilde.size()) != response.rows())
        throw std::invalid_argument("estimate_ris_angles: one projected block per subframe is required");
    const Index l = ytilde.front().rows();
    const RVector<Real> col_norm = response.colwise().norm().transpose();
    std::vector<RisAngleEstimate<Real>> out;
    for (Index m = 0; m < l; ++m)
    {
        CVector<Real> q(Index(ytilde.size()));
        for (std::size_t b = 0; b < ytilde.size(); ++b)
            q(Index(b)) = ytilde[b](m, m);
        const Real qn = q.norm();
        if (!(qn > Real(0)))
            throw DegenerateInputError("estimate_ris_angles: zero observation vector for path " + std::to_string(m));
        const CVector<Real> corr = response.adjoint() * q; // conj of q^H Phi a~
        Index best = 0;
        Real best_val = Real(-1);
        for (Index g = 0; g < grid.size(); ++g)
        {
            const Real den = qn * col_norm(g);
            if (!(den > Real(0)))
                continue;
            const Real v = std::abs(corr(g)) / den;
            if (v > best_val * (Real(1) + Real(64) * std::numeric_limits<Real>::epsilon()))
            {
                best_val = v;
                best = g;
            }
        }
        if (best_val < Real(0.1))
            throw DegenerateInputError("estimate_ris_angles: flat correlation objective (max " + std::to_string(double(best_val)) + ")");
        const auto [iota, phi] = grid.angles(best);
        out.push_back({iota, phi, best, best_val});
    }
    return out;
}

/// D(m, n) = (sqrt(P) Phi a~_mn)^+ q_mn with a~_mn = a_n kron a_m built from the
/// per-path angle estimates.
template <typename Real>
CMatrix<Real> estimate_gain_products(const std::vector<CMatrix<Real>> &ytilde, const ScatteringSchedule<Real> &sched,
                                     const std::vector<RisAngleEstimate<Real>> &angles, Real power, const ArrayGeometry &g)
{
    const Index l = Index(angles.size());
    const Index nb = sched.size();
    if (Index(ytilde.size()) != nb)
        throw std::invalid_argument("estimate_gain_products: one projected block per subframe is required");
    if (!(power > Real(0)))
        throw std::invalid_argument("estimate_gain_products: transmit power must be positive");
    CMatrix<Real> a(g.N(), l);
    for (Index m = 0; m < l; ++m)
        a.col(m) = steering_ris(angles[std::size_t(m)].iota, angles[std::size_t(m)].phi, g.N1, g.N2, Real(g.d_over_lambda));

    // atoms(b)(m, n) = a_m^T Theta_b a_n
    std::vector<CMatrix<Real>> atoms;
    atoms.reserve(std::size_t(nb));
    for (Index b = 0; b < nb; ++b)
        atoms.push_back(a.transpose() * (sched.matrix(b) * a));

    const Real amp = std::sqrt(power);
    CMatrix<Real> d(l, l);
    CVector<Real> v(nb), q(nb);
    for (Index m = 0; m < l; ++m)
        for (Index n = 0; n < l; ++n)
        {
            for (Index b = 0; b < nb; ++b)
            {
                v(b) = amp * atoms[std::size_t(b)](m, n);
                q(b) = ytilde[std::size_t(b)](m, n);
            }
            const Real vn = v.squaredNorm();
            if (!(vn > std::numeric_limits<Real>::min()))
                throw DegenerateInputError("estimate_gain_products: vanishing sensing response");
            d(m, n) = v.dot(q) / vn; // Eigen's dot conjugates the first argument
        }
    return d;
}

/// Rank-1 factorization D ~ alpha alpha^T of a complex-symmetric gain-product matrix.
/// The matrix is symmetrized as (D + D^T) / 2, the leading singular pair gives
/// |alpha| and direction, and the remaining phase is fixed with a principal-branch
/// square root. The result is exact up to a global sign.
template <typename Real>
CVector<Real> resolve_gains_svd(const CMatrix<Real> &d)
{
    if (d.rows() != d.cols() || d.rows() == 0)
        throw std::invalid_argument("resolve_gains_svd: square matrix required");
    const CMatrix<Real> sym = (d + d.transpose()) / Real(2);
    const auto dec = svd(sym);
    const Real s1 = dec.values(0);
    if (!(s1 > std::numeric_limits<Real>::min()))
        throw DegenerateInputError("resolve_gains_svd: leading singular value vanishes");
    const CVector<Real> u = dec.u.col(0);
    const Complex<Real> c2 = (u.adjoint() * sym * u.conjugate())(0, 0) / s1;
    const Complex<Real> c = std::sqrt(c2) / std::sqrt(std::abs(c2));
    return std::sqrt(s1) * c * u;
}

/// E = B Gamma A^T with full-length (M) BS steering vectors.
template <typename Real>
CMatrix<Real> reconstruct_E(const std::vector<Real> &iota_b, const std::vector<RisAngleEstimate<Real>> &ris,
                            const CVector<Real> &alpha, const ArrayGeometry &g)
{
    const Index l = Index(iota_b.size());
    if (Index(ris.size()) != l || alpha.size() != l)
        throw std::invalid_argument("reconstruct_E: path counts disagree");
    CMatrix<Real> e = CMatrix<Real>::Zero(g.M, g.N());
    const Real dl = Real(g.d_over_lambda);
    for (Index i = 0; i < l; ++i)
    {
        const auto &r = ris[std::size_t(i)];
        e.noalias() += alpha(i) * steering_bs(iota_b[std::size_t(i)], g.M, dl) * steering_ris(r.iota, r.phi, g.N1, g.N2, dl).transpose();
    }
    return e;
}

// ----- Full stage-1 pipeline ---------------------------------------------

template <typename Real>
struct Stage1Result
{
    Index L_hat = 0;
    std::vector<Real> iota_b;
    std::vector<RisAngleEstimate<Real>> ris;
    CVector<Real> alpha;
    CMatrix<Real> E_hat;

    // diagnostics
    RVector<Real> row_power;
    std::vector<ElevationRefinement<Real>> refinements;
    CMatrix<Real> gain_products;
    std::vector<std::string> warnings;
};

/// Algorithm from decorrelated observations Z_b to E-hat. `grid` must match the geometry
/// and cfg grid sizes.
template <typename Real>
Stage1Result<Real> estimate_bs_ris(const std::vector<CMatrix<Real>> &zs, const ScatteringSchedule<Real> &sched, const FdStage1Config &cfg,
                                   const ArrayGeometry &g, const RisAngleGrid<Real> &grid)
{
    g.validate();
    if (Index(zs.size()) != sched.size())
        throw std::invalid_argument("estimate_bs_ris: one observation per subframe is required");
    if (!grid.matches(g, cfg.grid_iota, cfg.grid_phi))
        throw std::invalid_argument("estimate_bs_ris: angle grid does not match the configuration");
    const Real dl = Real(g.d_over_lambda);
    const Real step = Real(cfg.rotation_step > 0.0 ? cfg.rotation_step : default_rotation_step(g.M_R));

    Stage1Result<Real> res;
    const CMatrix<Real> z = detail::hstack(zs);
    auto det = detect_bs_elevations(zs, cfg.peak_threshold, cfg.known_L);
    res.row_power = det.row_power;
    for (Index bin : det.bins)
    {
        auto r = refine_elevation_stacked(z, bin, step, dl);
        if (r.at_boundary)
            res.warnings.push_back("rotation optimum at search boundary for bin " + std::to_string(bin));
        res.iota_b.push_back(r.iota);
        res.refinements.push_back(std::move(r));
    }
    res.L_hat = Index(res.iota_b.size());

    const auto [b_r, b_t] = reconstruct_B(res.iota_b, g);
    const auto ytilde = project_to_path_domain(zs, b_r, b_t);
    const CMatrix<Real> response = dictionary_response(sched, grid);
    res.ris = estimate_ris_angles(ytilde, response, grid);
    res.gain_products = estimate_gain_products(ytilde, sched, res.ris, Real(cfg.power), g);
    res.alpha = resolve_gains_svd(res.gain_products);
    res.E_hat = reconstruct_E(res.iota_b, res.ris, res.alpha, g);
    return res;
}

} // namespace bdris
