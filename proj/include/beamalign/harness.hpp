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


#ifndef BEAMALIGN_HARNESS_HPP
#define BEAMALIGN_HARNESS_HPP

// Monte Carlo engine. Every run derives its channel, initial beams and noise
// from (base_seed XOR run_index), so aggregates do not depend on scheduling.

#include "aligners.hpp"
#include "channel.hpp"
#include "metrics.hpp"
#include "pingpong.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace beamalign
{

struct SimConfig
{
    ChannelSpec channel;
    double snr_db_o = -10.0;
    double snr_db_e = -10.0;
    std::size_t k_max = 100;
    std::size_t runs = 2000;
    std::uint64_t base_seed = 1;
    std::vector<AlignerKind> algorithms;
    bool common_noise = true;
    bool noiseless = false;
    std::size_t b_bits = 16;

    double rho_o() const { return db_to_linear(snr_db_o); }
    double rho_e() const { return db_to_linear(snr_db_e); }

    void validate() const
    {
        beamalign::validate(channel);
        if (runs < 1)
            throw ConfigError("runs", "must be at least 1");
        if (k_max < 1)
            throw ConfigError("k_max", "must be at least 1");
        if (algorithms.empty())
            throw ConfigError("algorithms", "must name at least one algorithm");
        if (b_bits < 1)
            throw ConfigError("b_bits", "must be at least 1");
        // -inf dB is a silent link (rho = 0)
        for (double db : {snr_db_o, snr_db_e})
            if (std::isnan(db) || db == INFINITY)
                throw ConfigError("snr_db", "must be finite or -inf");
        for (const auto &a : algorithms)
        {
            a.validate();
            if (a.algorithm == Algorithm::PilotMmse && k_max < std::max(channel.m_r, channel.m_t))
                throw ConfigError("k_max", "pilot_mmse needs k_max >= max(m_r, m_t)");
        }
    }
};

struct RunResult
{
    std::vector<IterationRecord> records;  // k = 0..k_max
    std::uint64_t feedback_bits = 0;
};

// An aligner failure inside a run, with its coordinates.
struct RunFailure
{
    std::string algorithm;
    std::size_t run = 0;
    std::size_t k = 0;
    std::string message;
};

class RunError : public Error
{
public:
    explicit RunError(RunFailure f)
        : Error(f.algorithm + " run " + std::to_string(f.run) + " k " + std::to_string(f.k) + ": " + f.message), failure_(std::move(f))
    {
    }
    const RunFailure &failure() const noexcept { return failure_; }

private:
    RunFailure failure_;
};

class MonteCarloError : public Error
{
public:
    explicit MonteCarloError(std::vector<RunFailure> failures)
        : Error(std::to_string(failures.size()) + " run(s) failed; first: " + describe(failures.front())), failures_(std::move(failures))
    {
    }
    const std::vector<RunFailure> &failures() const noexcept { return failures_; }

private:
    static std::string describe(const RunFailure &f)
    {
        return f.algorithm + " run " + std::to_string(f.run) + " k " + std::to_string(f.k) + ": " + f.message;
    }
    std::vector<RunFailure> failures_;
};

namespace detail
{

enum class StreamTag : std::uint64_t
{
    Channel = 0xC4A11E1,
    InitialBeams = 0xBEA3,
    Noise = 0x0153,
};

inline std::uint64_t run_seed(const SimConfig &c, std::size_t run_index) { return c.base_seed ^ static_cast<std::uint64_t>(run_index); }

inline std::uint64_t noise_seed(const SimConfig &c, std::size_t run_index, std::size_t algorithm_slot)
{
    const std::uint64_t base = splitmix64(run_seed(c, run_index) ^ static_cast<std::uint64_t>(StreamTag::Noise));
    return c.common_noise ? base : splitmix64(base + 0x9e37 * (algorithm_slot + 1));
}

struct RunSetup
{
    ChannelInstance channel;
    CVec f0, z0;
};

inline RunSetup setup_run(const SimConfig &c, std::size_t run_index)
{
    const std::uint64_t seed = run_seed(c, run_index);
    Rng ch = Rng::substream(seed, {static_cast<std::uint64_t>(StreamTag::Channel)});
    Rng beams = Rng::substream(seed, {static_cast<std::uint64_t>(StreamTag::InitialBeams)});
    RunSetup s{sample_channel(c.channel, ch), {}, {}};
    s.f0 = unit_random(c.channel.m_t, beams);
    s.z0 = unit_random(c.channel.m_r, beams);
    return s;
}

inline RunResult execute(const SimConfig &c, const RunSetup &s, const AlignerKind &kind, std::size_t slot, std::size_t run_index)
{
    LinkParams lp{c.rho_o(), c.rho_e(), c.noiseless};
    Link link(s.channel.H, lp, noise_seed(c, run_index, slot), c.b_bits);
    AlignerContext ctx{c.rho_o(), c.rho_e(), c.k_max};
    RunResult out;
    out.records.reserve(c.k_max + 1);
    std::size_t next_k = 0;
    try
    {
        run_aligner(kind, ctx, link, s.f0, s.z0, [&](std::size_t k, const CVec &f, const CVec &z) {
            out.records.push_back(make_record(k, s.channel.H, s.channel.gain_max, s.channel.f_opt, f, z));
            next_k = k + 1;
        });
    }
    catch (const std::exception &e)
    {
        throw RunError({algorithm_name(kind.algorithm), run_index, next_k, e.what()});
    }
    out.feedback_bits = link.feedback_log().bits();
    return out;
}

inline std::size_t thread_count()
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("BEAMALIGN_THREADS"))
    {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1)
            n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
    return n;
}

} // namespace detail

// One run of one aligner. kind must be one of config.algorithms when noise is
// not common (its position selects the noise stream).
inline RunResult run_single(const SimConfig &config, const AlignerKind &kind, std::size_t run_index)
{
    config.validate();
    std::size_t slot = 0;
    for (std::size_t i = 0; i < config.algorithms.size(); ++i)
        if (config.algorithms[i].algorithm == kind.algorithm && config.algorithms[i].k_switch == kind.k_switch)
        {
            slot = i;
            break;
        }
    return detail::execute(config, detail::setup_run(config, run_index), kind, slot, run_index);
}

struct AlgorithmCurve
{
    AlignerKind kind;
    std::vector<double> mean_norm_gain;  // k = 0..k_max
    std::vector<double> mean_angle_sq;
    std::vector<double> sem_norm_gain;   // standard error of the mean
    std::uint64_t feedback_bits = 0;     // per run (identical across runs)
};

struct AggregateResult
{
    SimConfig config;
    std::size_t runs = 0;
    std::size_t first_run = 0;
    std::vector<AlgorithmCurve> curves;  // same order as config.algorithms

    const AlgorithmCurve &curve(Algorithm a) const
    {
        for (const auto &c : curves)
            if (c.kind.algorithm == a)
                return c;
        throw ContractViolation(std::string("aggregate: no curve for ") + algorithm_name(a));
    }
};

// Averages runs first_run .. first_run + config.runs - 1. Runs execute in
// parallel blocks; sums are accumulated in run order, so the result is
// bit-identical for any thread count. threads = 0 picks the hardware
// concurrency capped by BEAMALIGN_THREADS.
inline AggregateResult run_monte_carlo(const SimConfig &config, std::size_t first_run = 0, std::size_t threads = 0)
{
    config.validate();
    const std::size_t n_alg = config.algorithms.size();
    const std::size_t len = config.k_max + 1;

    std::vector<std::vector<double>> sum_g(n_alg, std::vector<double>(len)), sum_g2 = sum_g, sum_a = sum_g;
    std::vector<std::uint64_t> fb(n_alg, 0);
    std::vector<RunFailure> failures;

    if (threads == 0)
        threads = detail::thread_count();
    const std::size_t block = std::max<std::size_t>(64, 16 * threads);

    struct Slot
    {
        std::vector<RunResult> results;
        std::vector<RunFailure> failures;
    };

    for (std::size_t start = 0; start < config.runs; start += block)
    {
        const std::size_t count = std::min(block, config.runs - start);
        std::vector<Slot> slots(count);
        auto work = [&](std::size_t worker) {
            for (std::size_t i = worker; i < count; i += threads)
            {
                const std::size_t run = first_run + start + i;
                Slot &slot = slots[i];
                try
                {
                    const detail::RunSetup setup = detail::setup_run(config, run);
                    for (std::size_t a = 0; a < n_alg; ++a)
                    {
                        try
                        {
                            slot.results.push_back(detail::execute(config, setup, config.algorithms[a], a, run));
                        }
                        catch (const RunError &e)
                        {
                            slot.failures.push_back(e.failure());
                            slot.results.emplace_back();
                        }
                    }
                }
                catch (const std::exception &e)
                {
                    slot.failures.push_back({"setup", run, 0, e.what()});
                }
            }
        };
        if (threads <= 1)
            work(0);
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < threads; ++t)
                pool.emplace_back(work, t);
            for (auto &t : pool)
                t.join();
        }
        for (auto &slot : slots)
        {
            failures.insert(failures.end(), slot.failures.begin(), slot.failures.end());
            if (!failures.empty())
                continue;
            for (std::size_t a = 0; a < n_alg; ++a)
            {
                const RunResult &r = slot.results[a];
                for (std::size_t k = 0; k < len; ++k)
                {
                    const double g = r.records[k].norm_gain;
                    sum_g[a][k] += g;
                    sum_g2[a][k] += g * g;
                    sum_a[a][k] += r.records[k].angle_sq;
                }
                fb[a] = r.feedback_bits;
            }
        }
    }
    if (!failures.empty())
        throw MonteCarloError(std::move(failures));

    AggregateResult out;
    out.config = config;
    out.runs = config.runs;
    out.first_run = first_run;
    const double n = static_cast<double>(config.runs);
    for (std::size_t a = 0; a < n_alg; ++a)
    {
        AlgorithmCurve c;
        c.kind = config.algorithms[a];
        c.feedback_bits = fb[a];
        c.mean_norm_gain.resize(len);
        c.mean_angle_sq.resize(len);
        c.sem_norm_gain.resize(len);
        for (std::size_t k = 0; k < len; ++k)
        {
            const double mean = sum_g[a][k] / n;
            c.mean_norm_gain[k] = mean;
            c.mean_angle_sq[k] = sum_a[a][k] / n;
            const double var = config.runs > 1 ? std::max(0.0, (sum_g2[a][k] - n * mean * mean) / (n - 1.0)) : 0.0;
            c.sem_norm_gain[k] = std::sqrt(var / n);
        }
        out.curves.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps: gain at k_max as a function of one parameter
// ---------------------------------------------------------------------------

struct SweepRow
{
    AlignerKind kind;
    double param = 0.0;
    double mean_norm_gain = 0.0;
    double sem = 0.0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
};

struct SweepTable
{
    std::string param_name;
    std::vector<SweepRow> rows;  // grouped by parameter value, algorithms in config order
};

namespace detail
{

inline void append_rows(SweepTable &t, const AggregateResult &r, double param)
{
    for (const auto &c : r.curves)
        t.rows.push_back({c.kind, param, c.mean_norm_gain.back(), c.sem_norm_gain.back(), r.runs, r.config.base_seed});
}

} // namespace detail

inline SweepTable sweep_antennas(const SimConfig &config, const std::vector<std::size_t> &m_t_list)
{
    SweepTable t{"m_t", {}};
    for (std::size_t mt : m_t_list)
    {
        SimConfig c = config;
        c.channel.m_t = mt;
        detail::append_rows(t, run_monte_carlo(c), static_cast<double>(mt));
    }
    return t;
}

// LISP only, one configuration per k_switch value.
inline SweepTable sweep_kswitch(const SimConfig &config, const std::vector<std::size_t> &k_switch_list)
{
    SweepTable t{"k_switch", {}};
    AlignerKind lisp{Algorithm::Lisp};
    for (const auto &a : config.algorithms)
        if (a.algorithm == Algorithm::Lisp)
            lisp = a;
    for (std::size_t ks : k_switch_list)
    {
        SimConfig c = config;
        AlignerKind kind = lisp;
        kind.k_switch = ks;
        c.algorithms = {kind};
        detail::append_rows(t, run_monte_carlo(c), static_cast<double>(ks));
    }
    return t;
}

// Equal SNR on both links.
inline SweepTable sweep_snr(const SimConfig &config, const std::vector<double> &snr_db_list)
{
    SweepTable t{"snr_db", {}};
    for (double snr : snr_db_list)
    {
        SimConfig c = config;
        c.snr_db_o = c.snr_db_e = snr;
        detail::append_rows(t, run_monte_carlo(c), snr);
    }
    return t;
}

} // namespace beamalign

#endif
