// SPDX-License-Identifier: Apache-2.0
//
// beamalign: iterative beam alignment for reciprocal TDD MIMO links
// Copyright (C) 2026 The beamalign authors
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


#include "oracles.hpp"

#include <beamalign/numerics.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace beamalign;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

double rel_err(const CMat &a, const CMat &b) { return oracle::frob_diff(a, b) / oracle::frob(b); }

CMat random_mat(std::size_t r, std::size_t c, std::uint64_t seed)
{
    Rng rng(seed);
    return cgauss_mat(r, c, rng);
}

} // namespace

TEST_CASE("oracles agree with each other on a known spectrum", "[oracle]")
{
    const double d[] = {5.0, 3.0, 1.0, 0.5};
    const CMat g = CMat::diagonal(d);
    CHECK_THAT(oracle::lambda_max_charpoly(g), WithinRel(5.0, 1e-10));
    CHECK_THAT(oracle::lambda_max_trace_power(g), WithinRel(5.0, 1e-10));
    const auto sv = oracle::singular_values_jacobi(CMat::diagonal(d));
    CHECK_THAT(sv[0], WithinRel(5.0, 1e-14));
    CHECK_THAT(sv[3], WithinRel(0.5, 1e-14));
}

TEST_CASE("cgauss_vec", "[numerics]")
{
    SECTION("zero length is rejected")
    {
        Rng rng(1);
        CHECK_THROWS_AS(cgauss_vec(0, rng), InvalidDimension);
    }
    SECTION("same seed gives the same vector")
    {
        Rng a(42), b(42);
        CHECK(cgauss_vec(3, a) == cgauss_vec(3, b));
    }
    SECTION("unit variance per entry over many draws")
    {
        Rng rng(7);
        double acc = 0.0;
        const int draws = 20000;
        for (int i = 0; i < draws; ++i)
            acc += norm_sq(cgauss_vec(3, rng));
        CHECK_THAT(acc / draws, WithinAbs(3.0, 0.05));
    }
    SECTION("large draw sample mean of |v_i|^2")
    {
        Rng rng(11);
        const CVec v = cgauss_vec(100000, rng);
        CHECK_THAT(norm_sq(v) / 1e5, WithinAbs(1.0, 0.05));
    }
    SECTION("real and imaginary parts have variance 1/2")
    {
        Rng rng(12);
        const CVec v = cgauss_vec(100000, rng);
        double re = 0.0, im = 0.0;
        for (const auto &x : v)
        {
            re += x.real() * x.real();
            im += x.imag() * x.imag();
        }
        CHECK_THAT(re / 1e5, WithinAbs(0.5, 0.01));
        CHECK_THAT(im / 1e5, WithinAbs(0.5, 0.01));
    }
}

TEST_CASE("Rng sub-streams", "[numerics]")
{
    Rng a = Rng::substream(5, {1, 2});
    Rng b = Rng::substream(5, {1, 2});
    Rng c = Rng::substream(5, {2, 1});
    const auto x = a.bits();
    CHECK(x == b.bits());
    CHECK(x != c.bits());
}

TEST_CASE("unit_random", "[numerics]")
{
    Rng rng(3);
    const CVec one = unit_random(1, rng);
    CHECK_THAT(std::abs(one[0]), WithinAbs(1.0, 1e-15));
    const CVec v = unit_random(8, rng);
    CHECK_THAT(norm(v), WithinAbs(1.0, 1e-12));

    double worst = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s)
    {
        Rng r1(2 * s + 100), r2(2 * s + 101);
        worst = std::max(worst, std::abs(dot(unit_random(32, r1), unit_random(32, r2))));
    }
    CHECK(worst < 0.99);
}

TEST_CASE("lstsq_min_norm examples", "[numerics]")
{
    SECTION("identity")
    {
        const CMat b = random_mat(3, 2, 1);
        CHECK(oracle::frob_diff(lstsq_min_norm(CMat::identity(3), b), b) < 1e-14);
    }
    SECTION("projection discards the orthogonal residual")
    {
        const CMat a{{1.0}, {0.0}};
        const CMat b{{4.0}, {7.0}};
        const CMat x = lstsq_min_norm(a, b);
        REQUIRE(x.rows() == 1);
        CHECK_THAT(std::abs(x(0, 0) - 4.0), WithinAbs(0.0, 1e-15));
    }
    SECTION("consistent tall system recovers the generator")
    {
        const CMat a = random_mat(5, 3, 2);
        const CMat x0 = random_mat(3, 2, 3);
        CHECK(rel_err(lstsq_min_norm(a, a * x0), x0) < 1e-10);
    }
    SECTION("wide system gives the minimum-norm solution")
    {
        const CMat a = random_mat(2, 5, 4);
        const CMat b = random_mat(2, 3, 5);
        const CMat x = lstsq_min_norm(a, b);
        CHECK(rel_err(a * x, b) < 1e-12);
        // minimum norm <=> columns of X lie in the row space of A
        const CMat p = a.adjoint() * lstsq_min_norm(a * a.adjoint(), CMat::identity(2)) * a;
        CHECK(rel_err(p * x, x) < 1e-10);
    }
}

TEST_CASE("lstsq_min_norm matches explicit normal equations for small sizes", "[numerics]")
{
    for (std::size_t cols = 1; cols <= 3; ++cols)
        for (std::uint64_t seed = 0; seed < 10; ++seed)
        {
            const CMat a = random_mat(cols + 2, cols, 100 + seed);
            const CMat b = random_mat(cols + 2, 2, 200 + seed);
            CHECK(rel_err(lstsq_min_norm(a, b), oracle::normal_equations_solve(a, b)) < 1e-10);
        }
}

TEST_CASE("Moore-Penrose identities", "[numerics]")
{
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{6, 4}, {4, 6}, {5, 5}})
    {
        const CMat a = random_mat(r, c, 31 + r);
        const CMat x = lstsq_min_norm(a, CMat::identity(r));
        CHECK(oracle::frob_diff(a * x * a, a) <= 1e-9 * oracle::frob(a));
        CHECK(oracle::frob_diff(x * a * x, x) <= 1e-9 * oracle::frob(x));
    }
}

TEST_CASE("lstsq_min_norm errors", "[numerics]")
{
    SECTION("duplicate columns make the Gram matrix singular")
    {
        CMat a = random_mat(4, 3, 9);
        for (std::size_t i = 0; i < 4; ++i)
            a(i, 2) = a(i, 1);
        try
        {
            lstsq_min_norm(a, CMat::identity(4));
            FAIL("expected RankDeficient");
        }
        catch (const RankDeficient &e)
        {
            CHECK(e.dimension() == 3);
        }
    }
    SECTION("nearly collinear columns trip the condition guard")
    {
        CMat a = random_mat(4, 2, 10);
        for (std::size_t i = 0; i < 4; ++i)
            a(i, 1) = a(i, 0) * (1.0 + 1e-9 * static_cast<double>(i));
        CHECK_THROWS_AS(lstsq_min_norm(a, CMat::identity(4)), RankDeficient);
    }
    SECTION("row mismatch")
    {
        CHECK_THROWS_AS(lstsq_min_norm(random_mat(3, 2, 1), random_mat(4, 1, 2)), InvalidDimension);
    }
    SECTION("zero matrix")
    {
        CHECK_THROWS_AS(lstsq_min_norm(CMat(3, 2), random_mat(3, 1, 2)), RankDeficient);
    }
}

TEST_CASE("inverse", "[numerics]")
{
    const CMat a = random_mat(4, 4, 77);
    CHECK(oracle::frob_diff(a * inverse(a), CMat::identity(4)) < 1e-12);
    CHECK_THROWS_AS(inverse(CMat(2, 2)), RankDeficient);
    CHECK_THROWS_AS(inverse(CMat(2, 3)), InvalidDimension);
}

TEST_CASE("dominant_singular_pair examples", "[numerics]")
{
    SECTION("diagonal")
    {
        const double d[] = {2.0, 1.0};
        const auto t = dominant_singular_pair(CMat::diagonal(d));
        CHECK_THAT(t.sigma, WithinRel(2.0, 1e-12));
        CHECK_THAT(std::abs(t.u[0]), WithinAbs(1.0, 1e-12));
        CHECK_THAT(std::abs(t.v[0]), WithinAbs(1.0, 1e-12));
    }
    SECTION("rank one")
    {
        Rng rng(5);
        const CVec u0 = unit_random(4, rng), v0 = unit_random(6, rng);
        const cplx c(1.5, -2.0);
        const auto t = dominant_singular_pair(c * outer(u0, v0));
        CHECK_THAT(t.sigma, WithinRel(std::abs(c), 1e-12));
        CHECK_THAT(std::abs(dot(t.u, u0)), WithinAbs(1.0, 1e-12));
        CHECK_THAT(std::abs(dot(t.v, v0)), WithinAbs(1.0, 1e-12));
    }
    SECTION("start vector orthogonal to all-ones")
    {
        const CMat a{{2.0, -1.0}, {-1.0, 2.0}};
        CHECK_THAT(dominant_singular_pair(a).sigma, WithinRel(3.0, 1e-12));
    }
    SECTION("random 4x6 against the characteristic polynomial")
    {
        const CMat a = random_mat(4, 6, 2024);
        const auto t = dominant_singular_pair(a);
        const double lambda = oracle::lambda_max_charpoly(oracle::gram_adjoint_left(a.adjoint()));
        CHECK_THAT(t.sigma * t.sigma, WithinRel(lambda, 1e-8));
    }
    SECTION("zero matrix")
    {
        CHECK_THROWS_AS(dominant_singular_pair(CMat(2, 2)), ContractViolation);
    }
}

TEST_CASE("dominant_singular_pair post-conditions", "[numerics]")
{
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{4, 32}, {32, 4}, {8, 8}, {3, 5}})
        for (std::uint64_t seed = 0; seed < 5; ++seed)
        {
            const CMat a = random_mat(r, c, seed * 13 + r);
            const auto t = dominant_singular_pair(a);
            CHECK_THAT(norm(t.u), WithinAbs(1.0, 1e-12));
            CHECK_THAT(norm(t.v), WithinAbs(1.0, 1e-12));
            CHECK(norm(a * t.v - cplx(t.sigma) * t.u) <= 1e-10 * t.sigma);
            CHECK(norm(adjoint_times(a, t.u) - cplx(t.sigma) * t.v) <= 1e-10 * t.sigma);
            // first non-negligible entry of v is real positive
            for (const auto &x : t.v)
                if (std::abs(x) > 1e-8)
                {
                    CHECK(std::abs(x.imag()) < 1e-12);
                    CHECK(x.real() > 0.0);
                    break;
                }
        }
}

TEST_CASE("dominant_singular_pair is deterministic and phase-invariant in gain", "[numerics]")
{
    const CMat a = random_mat(4, 8, 99);
    const auto t1 = dominant_singular_pair(a);
    const auto t2 = dominant_singular_pair(a);
    CHECK(t1.u == t2.u);
    CHECK(t1.v == t2.v);
    const double g = std::abs(dot(t1.u, a * t1.v));
    for (double theta : {0.3, 1.7, -2.5})
        CHECK_THAT(std::abs(dot(t1.u * std::polar(1.0, theta), a * t1.v)), WithinRel(g, 1e-14));
}

TEST_CASE("dominant_singular_pair near-degenerate spectrum converges", "[numerics]")
{
    const double d[] = {1.0, 1.0 - 1e-6, 0.5};
    const auto t = dominant_singular_pair(CMat::diagonal(d));
    CHECK_THAT(t.sigma, WithinRel(1.0, 1e-12));
    CHECK(std::abs(t.v[0]) > 1.0 - 1e-6);
}

TEST_CASE("spectral_norm_sq", "[numerics]")
{
    const double d[] = {3.0, 1.0, 1.0};
    CHECK_THAT(spectral_norm_sq(CMat::diagonal(d)), WithinRel(9.0, 1e-12));

    const CMat a = random_mat(4, 4, 123);
    CHECK_THAT(spectral_norm_sq(zero_padded(a, 6, 5)), WithinRel(spectral_norm_sq(a), 1e-12));
    CHECK_THAT(spectral_norm_sq(a), WithinRel(oracle::lambda_max_trace_power(oracle::gram_adjoint_left(a)), 1e-8));
}

TEST_CASE("hermitian_part and products", "[numerics]")
{
    const CMat a = random_mat(3, 3, 8);
    const CMat h = hermitian_part(a);
    CHECK(oracle::frob_diff(h, h.adjoint()) == 0.0);
    const CVec x = CVec{1.0, cplx(0, 1), -2.0};
    CHECK(norm(adjoint_times(a, x) - a.adjoint() * x) < 1e-14);
    CHECK(norm(transpose_times(a, x) - a.transpose() * x) < 1e-14);
    CHECK_THROWS_AS(a * CVec(2), InvalidDimension);
    CHECK_THROWS_AS(normalized(CVec(3)), DegenerateVector);
}
