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

#include "bdris/channel.hpp"
#include "bdris/scattering.hpp"

using namespace bdris;
using namespace bdris::test;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
const double pi = std::numbers::pi;

// exp(-j 2 pi d cos(iota) m), scalar loop
Vec bs_oracle(double iota, Index m, double dl)
{
    Vec v(m);
    for (Index i = 0; i < m; ++i)
        v(i) = std::exp(C(0, -2.0 * pi * dl * std::cos(iota) * double(i)));
    return v;
}

// element n1 * N2 + n2 carries exp(-j 2 pi d (sin(phi) cos(iota) n1 + sin(iota) n2))
Vec ris_oracle(double iota, double phi, Index N1, Index N2, double dl)
{
    Vec v(N1 * N2);
    for (Index a = 0; a < N1; ++a)
        for (Index b = 0; b < N2; ++b)
            v(a * N2 + b) = std::exp(C(0, -2.0 * pi * dl * (std::sin(phi) * std::cos(iota) * double(a) + std::sin(iota) * double(b))));
    return v;
}
} // namespace

TEST_CASE("steering_bs examples", "[channel]")
{
    CHECK(max_abs(steering_bs(pi / 2, 4) - Vec::Ones(4)) < 1e-15);
    Vec alt(4);
    alt << 1.0, -1.0, 1.0, -1.0;
    CHECK(max_abs(steering_bs(0.0, 4, 0.5) - alt) < 1e-14);
    CHECK(max_abs(steering_bs(pi / 3, 8) - bs_oracle(pi / 3, 8, 0.5)) < 1e-14);
    CHECK_THROWS_AS(steering_bs(-0.1, 4), std::invalid_argument);
    CHECK_THROWS_AS(steering_bs(pi + 0.1, 4), std::invalid_argument);
}

TEST_CASE("steering_ris examples", "[channel]")
{
    // iota = 0: the n2 factor is all ones, so entries only vary with n1
    const Vec a0 = steering_ris(0.0, 1.1, 3, 4);
    for (Index n1 = 0; n1 < 3; ++n1)
        for (Index n2 = 0; n2 < 4; ++n2)
            CHECK(std::abs(a0(n1 * 4 + n2) - a0(n1 * 4)) < 1e-15);
    // phi = 0: the n1 factor is all ones
    const Vec b0 = steering_ris(0.7, 0.0, 3, 4);
    for (Index n1 = 0; n1 < 3; ++n1)
        for (Index n2 = 0; n2 < 4; ++n2)
            CHECK(std::abs(b0(n1 * 4 + n2) - b0(n2)) < 1e-15);

    CHECK(max_abs(steering_ris(pi / 4, pi / 3, 2, 2) - ris_oracle(pi / 4, pi / 3, 2, 2, 0.5)) < 1e-14);
    CHECK_THROWS_AS(steering_ris(0.5, 4.0, 2, 2), std::invalid_argument);
}

TEST_CASE("property: steering vectors have unit-modulus entries and match the oracles", "[channel][property]")
{
    Rng rng = make_rng(21);
    for (int trial = 0; trial < 100; ++trial)
    {
        const double iota = random_real(rng, 0.0, pi), phi = random_real(rng, 0.0, pi), dl = random_real(rng, 0.05, 0.5);
        const Index m = random_dim(rng, 1, 40), n1 = random_dim(rng, 1, 8), n2 = random_dim(rng, 1, 8);
        const Vec b = steering_bs(iota, m, dl);
        const Vec a = steering_ris(iota, phi, n1, n2, dl);
        CHECK((b.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
        CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
        CHECK(max_abs(b - bs_oracle(iota, m, dl)) < 1e-12);
        CHECK(max_abs(a - ris_oracle(iota, phi, n1, n2, dl)) < 1e-12);
    }
}

TEST_CASE("path_loss_db", "[channel]")
{
    Rng rng = make_rng(22);
    CHECK_THAT(path_loss_db(28.0, 10.0, 2.2, 0.0, rng), WithinAbs(83.34, 0.01));
    CHECK_THAT(path_loss_db(28.0, 50.0, 2.2, 0.0, rng), WithinAbs(98.72, 0.01));
    for (double beta : {1.8, 2.2, 3.5})
        CHECK_THAT(path_loss_db(28.0, 100.0, beta, 0.0, rng) - path_loss_db(28.0, 10.0, beta, 0.0, rng), WithinAbs(10.0 * beta, 1e-12));
    CHECK_THROWS_AS(path_loss_db(28.0, 0.0, 2.2, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_db(-1.0, 10.0, 2.2, 0.0, rng), std::invalid_argument);

    // shadowing: xi ~ N(0, 2^2)
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
    {
        const double xi = path_loss_db(28.0, 10.0, 2.2, 2.0, rng) - 83.3425;
        sum += xi;
        sq += xi * xi;
    }
    CHECK(std::abs(sum / n) < 3.0 * 2.0 / std::sqrt(double(n)) + 1e-3);
    CHECK_THAT(std::sqrt(sq / n), WithinRel(2.0, 0.03));
}

TEST_CASE("sample_paths is deterministic per seed", "[channel]")
{
    ScenarioParams s;
    Rng r1 = make_rng(99), r2 = make_rng(99), r3 = make_rng(100);
    const auto p1 = sample_paths<double>(s, r1);
    const auto p2 = sample_paths<double>(s, r2);
    const auto p3 = sample_paths<double>(s, r3);
    REQUIRE(p1.bs_ris.size() == std::size_t(s.L));
    REQUIRE(p1.users.size() == std::size_t(s.K));
    for (std::size_t l = 0; l < p1.bs_ris.size(); ++l)
    {
        CHECK(p1.bs_ris[l].gain == p2.bs_ris[l].gain);
        CHECK(p1.bs_ris[l].iota_b == p2.bs_ris[l].iota_b);
        CHECK(p1.bs_ris[l].phi_r == p2.bs_ris[l].phi_r);
    }
    CHECK(p1.bs_ris[0].gain != p3.bs_ris[0].gain);
    for (const auto &u : p1.users)
        CHECK(u.size() == std::size_t(s.U_k));
}

TEST_CASE("sample_paths moments", "[channel]")
{
    ScenarioParams s;
    s.L = 10000;
    s.K = 1;
    s.U_k = 1;
    s.shadow_sigma_db = 0.0;
    Rng rng = make_rng(23);
    const auto p = sample_paths<double>(s, rng);

    double angle_sum = 0.0, power = 0.0;
    for (const auto &path : p.bs_ris)
    {
        angle_sum += path.iota_b;
        power += std::norm(path.gain);
        CHECK(path.iota_b > 0.0);
        CHECK(path.iota_b < pi);
    }
    const double n = double(p.bs_ris.size());
    const double sigma_mean = pi / std::sqrt(12.0) / std::sqrt(n);
    CHECK(std::abs(angle_sum / n - pi / 2) < 3.0 * sigma_mean);

    Rng dummy = make_rng(0);
    const double var = std::pow(10.0, -path_loss_db(28.0, 10.0, 2.2, 0.0, dummy) / 10.0);
    CHECK_THAT(power / n, WithinRel(var, 0.05));
}

TEST_CASE("assemble_channels structure", "[channel]")
{
    ArrayGeometry g;
    g.M = 12;
    g.M_R = 7;
    g.M_T = 5;
    g.N1 = 3;
    g.N2 = 2;
    ScenarioParams s;
    s.L = 3;
    Rng rng = make_rng(24);
    const auto p = sample_paths<double>(s, rng);
    const auto ch = assemble_channels(p, g);

    REQUIRE(ch.E.rows() == 12);
    REQUIRE(ch.E.cols() == 6);
    REQUIRE(ch.E_R.rows() == 7);
    REQUIRE(ch.E_T.rows() == 5);
    // local index origin 0 on both subarrays
    CHECK(max_abs(ch.E_R - ch.E.topRows(7)) < 1e-15);
    CHECK(max_abs(ch.E_T - ch.E.topRows(5)) < 1e-15);

    // factor-and-multiply oracle
    Mat B(12, 3), A(6, 3), Gamma = Mat::Zero(3, 3);
    for (Index l = 0; l < 3; ++l)
    {
        const auto &path = p.bs_ris[std::size_t(l)];
        B.col(l) = bs_oracle(path.iota_b, 12, 0.5);
        A.col(l) = ris_oracle(path.iota_r, path.phi_r, 3, 2, 0.5);
        Gamma(l, l) = path.gain;
    }
    const Mat ref = B * Gamma * A.transpose();
    CHECK(max_abs(ch.E - ref) <= 1e-12 * max_abs(ref));

    const auto sv = svd(Mat(ch.E / ch.E.norm()));
    for (Index i = 3; i < sv.values.size(); ++i)
        CHECK(sv.values(i) < 1e-12);

    REQUIRE(ch.h.size() == std::size_t(s.K));
    Vec h0 = Vec::Zero(6);
    for (const auto &up : p.users[0])
        h0 += up.gain * ris_oracle(up.iota, up.phi, 3, 2, 0.5);
    CHECK(max_abs(ch.h[0] - h0) < 1e-12 * max_abs(h0));

    const auto again = assemble_channels(p, g);
    CHECK(max_abs(again.E - ch.E) == 0.0);
}

TEST_CASE("ArrayGeometry validation", "[channel]")
{
    ArrayGeometry g;
    CHECK_NOTHROW(g.validate());
    g.M = 31;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = ArrayGeometry{};
    g.d_over_lambda = 0.6;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = ArrayGeometry{};
    g.N1 = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("cascaded_channel", "[channel]")
{
    Rng rng = make_rng(25);
    const Mat e = random_matrix(4, 3, rng);
    Vec e1 = Vec::Zero(3);
    e1(0) = 1.0;
    const Mat h1 = cascaded_channel(e1, e);
    REQUIRE(h1.cols() == 9);
    CHECK(max_abs(h1.leftCols(3) - e) == 0.0);
    CHECK(max_abs(h1.rightCols(6)) == 0.0);

    const Vec h = random_vector(3, rng);
    const Mat H = cascaded_channel(h, e);
    CHECK_THAT(H.norm(), WithinRel(h.norm() * e.norm(), 1e-12));
    CHECK_THROWS_AS(cascaded_channel(random_vector(2, rng), e), std::invalid_argument);
}

TEST_CASE("property: E Theta h = H vec(Theta) for random unitary Theta", "[channel][property]")
{
    ArrayGeometry g;
    g.M = 8;
    g.M_R = 4;
    g.M_T = 4;
    g.N1 = 2;
    g.N2 = 3;
    ScenarioParams s;
    Rng rng = make_rng(26);
    const auto ch = assemble_channels(sample_paths<double>(s, rng), g);
    // rescale so the 1e-10 tolerance is meaningful against path-loss magnitudes
    const Mat e = ch.E / ch.E.norm();
    const Vec h = ch.h[0] / ch.h[0].norm();
    const Mat H = cascaded_channel(h, e);
    for (int trial = 0; trial < 100; ++trial)
    {
        const Mat theta = random_unitary<double>(g.N(), rng);
        CHECK(max_abs(e * theta * h - H * vec(theta)) < 1e-10);
    }
}
