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

#include <beamalign/harness.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

using namespace beamalign;
using Catch::Matchers::WithinAbs;

namespace
{

SimConfig small_config(std::size_t runs = 40, std::size_t k_max = 20)
{
    SimConfig c;
    c.channel = {4, 8, IidModel{}};
    c.runs = runs;
    c.k_max = k_max;
    c.base_seed = 11;
    c.algorithms = {{Algorithm::SlsSuboptimal}, {Algorithm::SummedPower}, {Algorithm::SimplePower}};
    return c;
}

SimConfig diag_config(std::vector<double> h)
{
    SimConfig c;
    c.channel = {h.size(), h.size(), DiagonalModel{std::move(h)}};
    return c;
}

bool same(const std::vector<double> &a, const std::vector<double> &b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool same(const AggregateResult &a, const AggregateResult &b)
{
    if (a.curves.size() != b.curves.size())
        return false;
    for (std::size_t i = 0; i < a.curves.size(); ++i)
        if (!same(a.curves[i].mean_norm_gain, b.curves[i].mean_norm_gain) ||
            !same(a.curves[i].mean_angle_sq, b.curves[i].mean_angle_sq) ||
            !same(a.curves[i].sem_norm_gain, b.curves[i].sem_norm_gain))
            return false;
    return true;
}

} // namespace

TEST_CASE("run_single is deterministic and well-formed", "[harness]")
{
    const SimConfig c = small_config();
    for (const auto &kind : c.algorithms)
    {
        const RunResult a = run_single(c, kind, 3), b = run_single(c, kind, 3);
        REQUIRE(a.records.size() == c.k_max + 1);
        for (std::size_t k = 0; k <= c.k_max; ++k)
        {
            CHECK(a.records[k].k == k);
            CHECK(a.records[k].norm_gain == b.records[k].norm_gain);
            CHECK(a.records[k].angle_sq == b.records[k].angle_sq);
            CHECK(a.records[k].norm_gain >= 0.0);
            CHECK(a.records[k].norm_gain <= 1.0 + 1e-12);
            CHECK(a.records[k].angle_rad >= 0.0);
            CHECK(a.records[k].angle_rad <= M_PI / 2 + 1e-12);
        }
    }
    // every algorithm starts from the same random pair
    const double g0 = run_single(c, c.algorithms[0], 5).records[0].norm_gain;
    for (const auto &kind : c.algorithms)
        CHECK(run_single(c, kind, 5).records[0].norm_gain == g0);
    CHECK(run_single(c, c.algorithms[0], 6).records[0].norm_gain != g0);
}

TEST_CASE("noiseless simple power contracts the angle by the squared gap", "[harness]")
{
    SimConfig c = diag_config({2.0, 1.0});
    c.noiseless = true;
    c.k_max = 8;
    c.algorithms = {{Algorithm::SimplePower}};
    for (std::size_t run = 0; run < 10; ++run)
    {
        const RunResult r = run_single(c, c.algorithms[0], run);
        const double t0 = std::tan(r.records[0].angle_rad);
        for (std::size_t k = 1; k <= 8; ++k)
        {
            const double expect = t0 / std::pow(4.0, static_cast<double>(k));
            CHECK_THAT(std::tan(r.records[k].angle_rad), WithinAbs(expect, 1e-9 * std::max(1.0, t0)));
        }
    }
}

TEST_CASE("common noise makes LISP with a late switch identical to SLS", "[harness]")
{
    SimConfig c = small_config(10, 15);
    c.algorithms = {{Algorithm::SlsSuboptimal}, {Algorithm::Lisp, 1000.0, 15}};
    for (std::size_t run = 0; run < 10; ++run)
    {
        const RunResult a = run_single(c, c.algorithms[0], run), b = run_single(c, c.algorithms[1], run);
        for (std::size_t k = 0; k <= c.k_max; ++k)
            CHECK(a.records[k].norm_gain == b.records[k].norm_gain);
    }
    // independent noise per algorithm breaks the coupling
    c.common_noise = false;
    const RunResult a = run_single(c, c.algorithms[0], 0), b = run_single(c, c.algorithms[1], 0);
    CHECK(a.records[0].norm_gain == b.records[0].norm_gain);
    CHECK(a.records.back().norm_gain != b.records.back().norm_gain);
}

TEST_CASE("a one-run aggregate is the run itself", "[harness]")
{
    SimConfig c = small_config(1);
    const AggregateResult agg = run_monte_carlo(c, 7);
    for (std::size_t i = 0; i < c.algorithms.size(); ++i)
    {
        const RunResult r = run_single(c, c.algorithms[i], 7);
        for (std::size_t k = 0; k <= c.k_max; ++k)
        {
            CHECK(agg.curves[i].mean_norm_gain[k] == r.records[k].norm_gain);
            CHECK(agg.curves[i].mean_angle_sq[k] == r.records[k].angle_sq);
            CHECK(agg.curves[i].sem_norm_gain[k] == 0.0);
        }
    }
}

TEST_CASE("aggregate statistics match a direct computation", "[harness]")
{
    const SimConfig c = small_config(30);
    const AggregateResult agg = run_monte_carlo(c);
    for (std::size_t i = 0; i < c.algorithms.size(); ++i)
    {
        std::vector<double> g;
        for (std::size_t run = 0; run < c.runs; ++run)
            g.push_back(run_single(c, c.algorithms[i], run).records.back().norm_gain);
        const double n = static_cast<double>(g.size());
        const double mean = std::accumulate(g.begin(), g.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : g)
            ss += (x - mean) * (x - mean);
        CHECK_THAT(agg.curves[i].mean_norm_gain.back(), WithinAbs(mean, 1e-12));
        CHECK_THAT(agg.curves[i].sem_norm_gain.back(), WithinAbs(std::sqrt(ss / (n - 1) / n), 1e-12));
    }
}

TEST_CASE("disjoint run ranges combine into the full aggregate", "[harness]")
{
    SimConfig c = small_config(60);
    const AggregateResult full = run_monte_carlo(c);
    c.runs = 30;
    const AggregateResult lo = run_monte_carlo(c, 0), hi = run_monte_carlo(c, 30);
    CHECK(hi.first_run == 30);
    for (std::size_t i = 0; i < c.algorithms.size(); ++i)
        for (std::size_t k = 0; k <= c.k_max; ++k)
            CHECK_THAT(0.5 * (lo.curves[i].mean_norm_gain[k] + hi.curves[i].mean_norm_gain[k]),
                       WithinAbs(full.curves[i].mean_norm_gain[k], 1e-12));
}

TEST_CASE("results do not depend on the thread count", "[harness]")
{
    SimConfig c = small_config(150);
    const AggregateResult one = run_monte_carlo(c, 0, 1);
    CHECK(same(one, run_monte_carlo(c, 0, 3)));
    CHECK(same(one, run_monte_carlo(c)));
    c.base_seed = 12;
    CHECK_FALSE(same(one, run_monte_carlo(c, 0, 1)));
}

TEST_CASE("feedback is reported per algorithm", "[harness]")
{
    SimConfig c = small_config(4);
    c.algorithms = {{Algorithm::SlsOptimal}, {Algorithm::SlsSuboptimal}, {Algorithm::SummedPower},
                    {Algorithm::Lisp, 1000.0, 5}, {Algorithm::SimplePower}};
    const AggregateResult agg = run_monte_carlo(c);
    for (const auto &curve : agg.curves)
        CHECK(curve.feedback_bits == cost_report(curve.kind, c.k_max, 4, 8, c.b_bits).feedback_bits);
}

TEST_CASE("noiseless simple power improves on average", "[harness]")
{
    SimConfig c = small_config(200, 15);
    c.noiseless = true;
    c.algorithms = {{Algorithm::SimplePower}};
    const AggregateResult agg = run_monte_carlo(c);
    const AlgorithmCurve &curve = agg.curves[0];
    for (std::size_t k = 1; k <= c.k_max; ++k)
        CHECK(curve.mean_norm_gain[k] >= curve.mean_norm_gain[k - 1] - 3.0 * curve.sem_norm_gain[k]);
    CHECK(curve.mean_norm_gain.back() > 0.99);
}

TEST_CASE("zero SNR leaves the pilot estimate at the random pair", "[harness]")
{
    // Independent expectation: for uniformly random unit beams,
    // E|z^* H f|^2 = ||H||_F^2 / (m_r m_t).
    SimConfig c = small_config(2000, 8);
    c.snr_db_o = c.snr_db_e = -std::numeric_limits<double>::infinity();
    c.algorithms = {{Algorithm::PilotMmse}};
    const AggregateResult agg = run_monte_carlo(c);
    const AlgorithmCurve &curve = agg.curves[0];

    double expect = 0.0;
    for (std::uint64_t run = 0; run < c.runs; ++run)
    {
        Rng rng(0xabc000 + run);
        const CMat H = cgauss_mat(4, 8, rng);
        const double s1 = oracle::singular_values_jacobi(H).front();
        expect += oracle::frob(H) * oracle::frob(H) / (32.0 * s1 * s1);
    }
    expect /= static_cast<double>(c.runs);
    const double sem = curve.sem_norm_gain.back();
    CHECK(std::abs(curve.mean_norm_gain.back() - expect) <= 4.0 * std::hypot(sem, sem));
    // no information, no movement
    CHECK(curve.mean_norm_gain.back() == curve.mean_norm_gain.front());
}

TEST_CASE("failed runs are reported with their coordinates", "[harness]")
{
    SimConfig c = small_config(5);
    c.noiseless = true;
    c.snr_db_o = c.snr_db_e = -std::numeric_limits<double>::infinity();
    c.algorithms = {{Algorithm::SimplePower}};
    try
    {
        run_monte_carlo(c);
        FAIL("expected MonteCarloError");
    }
    catch (const MonteCarloError &e)
    {
        REQUIRE(e.failures().size() == 5);
        for (std::size_t i = 0; i < 5; ++i)
        {
            CHECK(e.failures()[i].algorithm == "simple_power");
            CHECK(e.failures()[i].run == i);
            CHECK(e.failures()[i].k == 1);
            CHECK_FALSE(e.failures()[i].message.empty());
        }
    }
    CHECK_THROWS_AS(run_single(c, c.algorithms[0], 0), RunError);
}

TEST_CASE("invalid configurations are rejected", "[harness]")
{
    SimConfig c = small_config();
    c.runs = 0;
    CHECK_THROWS_AS(run_monte_carlo(c), ConfigError);
    c = small_config();
    c.algorithms.clear();
    CHECK_THROWS_AS(run_monte_carlo(c), ConfigError);
    c = small_config();
    c.snr_db_o = std::nan("");
    CHECK_THROWS_AS(run_monte_carlo(c), ConfigError);
    c = small_config(2, 4);
    c.algorithms = {{Algorithm::PilotMmse}};
    CHECK_THROWS_AS(run_monte_carlo(c), ConfigError);
    c = small_config();
    c.channel.m_t = 0;
    CHECK_THROWS_AS(run_monte_carlo(c), InvalidDimension);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

TEST_CASE("a single-point sweep equals the direct run", "[harness]")
{
    SimConfig c = small_config(20);
    c.channel.m_t = 6;
    const AggregateResult direct = run_monte_carlo(c);
    const SweepTable t = sweep_antennas(small_config(20), {6});
    CHECK(t.param_name == "m_t");
    REQUIRE(t.rows.size() == c.algorithms.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
        CHECK(t.rows[i].param == 6.0);
        CHECK(t.rows[i].kind.algorithm == c.algorithms[i].algorithm);
        CHECK(t.rows[i].mean_norm_gain == direct.curves[i].mean_norm_gain.back());
        CHECK(t.rows[i].sem == direct.curves[i].sem_norm_gain.back());
        CHECK(t.rows[i].runs == 20);
        CHECK(t.rows[i].seed == 11);
    }

    const SweepTable s = sweep_snr(small_config(20), {-10.0});
    for (std::size_t i = 0; i < s.rows.size(); ++i)
        CHECK(s.rows[i].mean_norm_gain == run_monte_carlo(small_config(20)).curves[i].mean_norm_gain.back());
}

TEST_CASE("k_switch sweep at one matches summed power", "[harness]")
{
    SimConfig c = small_config(30, 25);
    c.algorithms = {{Algorithm::Lisp, 1000.0, 4, LispSeeding::Observation}};
    const SweepTable t = sweep_kswitch(c, {1, 4});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.param_name == "k_switch");
    CHECK(t.rows[0].param == 1.0);
    CHECK(t.rows[1].param == 4.0);

    c.algorithms = {{Algorithm::SummedPower}};
    const AggregateResult summed = run_monte_carlo(c);
    CHECK_THAT(t.rows[0].mean_norm_gain, WithinAbs(summed.curves[0].mean_norm_gain.back(), 1e-12));
    CHECK(t.rows[1].mean_norm_gain != t.rows[0].mean_norm_gain);
}

TEST_CASE("summed power gain is insensitive to the transmit array size", "[harness][slow]")
{
    SimConfig c;
    c.channel = {4, 32, IidModel{}};
    c.runs = 200;
    c.k_max = 100;
    c.algorithms = {{Algorithm::SummedPower}};
    const SweepTable t = sweep_antennas(c, {6, 16, 32, 64});
    double mean = 0.0;
    for (const auto &r : t.rows)
        mean += r.mean_norm_gain / static_cast<double>(t.rows.size());
    for (const auto &r : t.rows)
        CHECK(std::abs(r.mean_norm_gain - mean) <= 0.05);
}

TEST_CASE("noiseless sweep on a separated spectrum", "[harness]")
{
    SimConfig c = diag_config({4.0, 1.0, 0.5, 0.25});
    c.noiseless = true;
    c.runs = 20;
    c.algorithms = {{Algorithm::SlsOptimal}, {Algorithm::SlsSuboptimal}, {Algorithm::SummedPower},
                    {Algorithm::Lisp, 1000.0, 4}, {Algorithm::SimplePower}, {Algorithm::PilotMmse}};
    const SweepTable t = sweep_snr(c, {0.0});
    REQUIRE(t.rows.size() == c.algorithms.size());
    for (const auto &r : t.rows)
    {
        INFO(algorithm_name(r.kind.algorithm));
        CHECK(r.mean_norm_gain >= 0.999);
    }

    // once the noiseless beams collapse onto one direction the batch Gram
    // matrix is singular; this surfaces as a run failure
    c.algorithms = {{Algorithm::BatchLS}};
    try
    {
        run_monte_carlo(c);
        FAIL("expected MonteCarloError");
    }
    catch (const MonteCarloError &e)
    {
        REQUIRE_FALSE(e.failures().empty());
        for (const auto &f : e.failures())
        {
            CHECK(f.algorithm == "batch_ls");
            CHECK(f.k > 4);
            CHECK(f.message.find("Gram") != std::string::npos);
        }
    }
}
