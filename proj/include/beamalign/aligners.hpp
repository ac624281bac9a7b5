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


#ifndef BEAMALIGN_ALIGNERS_HPP
#define BEAMALIGN_ALIGNERS_HPP

// Blind beam-alignment state machines. Every aligner touches the channel only
// through a ChannelAccess object (ping, pong, sounding, feedback).
//
// One round k = 1..k_max consumes channel use k-1:
//   node 1 pings f, node 2 updates and picks z, node 2 pongs z, node 1 updates
//   and picks f.
// After round k the aligner holds the pair (f, z) recorded at index k; index 0
// is the random initial pair.

#include "numerics.hpp"
#include "pingpong.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace beamalign
{

enum class Algorithm
{
    BatchLS,
    SlsOptimal,
    SlsSuboptimal,
    SummedPower,
    Lisp,
    SimplePower,
    PilotMmse,
};

inline constexpr std::array<Algorithm, 7> kAllAlgorithms = {
    Algorithm::BatchLS,     Algorithm::SlsOptimal, Algorithm::SlsSuboptimal, Algorithm::SummedPower,
    Algorithm::Lisp,        Algorithm::SimplePower, Algorithm::PilotMmse,
};

inline const char *algorithm_name(Algorithm a)
{
    switch (a)
    {
    case Algorithm::BatchLS: return "batch_ls";
    case Algorithm::SlsOptimal: return "sls_optimal";
    case Algorithm::SlsSuboptimal: return "sls_suboptimal";
    case Algorithm::SummedPower: return "summed_power";
    case Algorithm::Lisp: return "lisp";
    case Algorithm::SimplePower: return "simple_power";
    case Algorithm::PilotMmse: return "pilot_mmse";
    }
    return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name)
{
    for (Algorithm a : kAllAlgorithms)
        if (name == algorithm_name(a))
            return a;
    return std::nullopt;
}

// How LISP initializes its running sums when it leaves the least-squares phase.
enum class LispSeeding
{
    Unit,         // s_e = f, s_o = z
    Observation,  // unit beams scaled by the norms of the last received vectors
    Zero,         // sums restart from zero
};

struct AlignerKind
{
    Algorithm algorithm = Algorithm::SummedPower;
    double alpha_init = 1000.0;
    std::size_t k_switch = 1;
    LispSeeding seeding = LispSeeding::Unit;

    void validate() const
    {
        if (!(alpha_init > 0.0) || !std::isfinite(alpha_init))
            throw ContractViolation("aligner: alpha_init must be positive");
        if (k_switch < 1)
            throw ContractViolation("aligner: k_switch must be at least 1");
    }
};

// What the nodes believe about the link. The SNRs here only scale channel
// estimates; they may differ from the physical link.
struct AlignerContext
{
    double rho_o = 1.0;
    double rho_e = 1.0;
    std::size_t k_max = 100;
};

namespace detail
{

inline double inv_sqrt_or_one(double rho) { return rho > 0.0 ? 1.0 / std::sqrt(rho) : 1.0; }

} // namespace detail

// ---------------------------------------------------------------------------
// Least-squares estimator shared by both nodes
// ---------------------------------------------------------------------------

// Estimates X (rows x dim) from pairs (r_i, y_i) with y_i = X r_i + noise,
// either in batch (X = Y R^+) or by rank-one recursive updates.
class LsEstimator
{
public:
    LsEstimator(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), X_(rows, dim) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t count() const noexcept { return r_hist_.size(); }
    bool sequential() const noexcept { return sequential_; }

    const CMat &estimate() const noexcept { return X_; }
    const CMat &covariance() const noexcept { return C_; }
    const CVec &gain() const noexcept { return K_; }

    void append(const CVec &r, const CVec &y)
    {
        if (r.size() != dim_ || y.size() != rows_)
            throw InvalidDimension("estimator: regressor/observation length mismatch");
        r_hist_.push_back(r);
        y_hist_.push_back(y);
    }

    // dim x n
    CMat regressors() const { return CMat::from_columns(r_hist_); }
    // rows x n
    CMat observations() const { return CMat::from_columns(y_hist_); }

    // X = Y R^+ computed as (R^*)^+ Y^* transposed back.
    void solve_batch()
    {
        const std::size_t n = count();
        if (n == 0)
            throw ContractViolation("estimator: empty history");
        CMat Rh(n, dim_), Yh(n, rows_);
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j < dim_; ++j)
                Rh(i, j) = std::conj(r_hist_[i][j]);
            for (std::size_t j = 0; j < rows_; ++j)
                Yh(i, j) = std::conj(y_hist_[i][j]);
        }
        X_ = lstsq_min_norm(Rh, Yh).adjoint();
    }

    // Covariance from the stored history, C = (R R^*)^{-1}; needs count >= dim.
    void begin_sequential_from_history()
    {
        const CMat R = regressors();
        C_ = hermitian_part(detail::guarded_gram_inverse(R * R.adjoint(), "RR^*"));
        sequential_ = true;
    }

    void begin_sequential(CMat X0, double alpha)
    {
        if (X0.rows() != rows_ || X0.cols() != dim_)
            throw InvalidDimension("estimator: initial estimate has wrong shape");
        X_ = std::move(X0);
        C_ = CMat::identity(dim_);
        C_ *= alpha;
        sequential_ = true;
    }

    // K = r^* C / (1 + r^* C r); X += (y - X r) K; C -= (C r) K
    void update(const CVec &r, const CVec &y)
    {
        if (!sequential_)
            throw ContractViolation("estimator: update before covariance initialization");
        if (r.size() != dim_ || y.size() != rows_)
            throw InvalidDimension("estimator: regressor/observation length mismatch");
        const CVec Cr = C_ * r;
        const double denom = 1.0 + dot(r, Cr).real();
        if (!(denom > 0.0) || !std::isfinite(denom))
            throw NumericalDegeneracy("estimator: innovation denominator " + std::to_string(denom) + " is not positive");
        // C Hermitian, so r^* C = (C r)^*
        K_ = conj(Cr) / denom;
        const CVec innov = y - X_ * r;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                X_(i, j) += detail::mul(innov[i], K_[j]);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                C_(i, j) -= detail::mul(Cr[i], K_[j]);
        C_ = hermitian_part(C_);
        r_hist_.push_back(r);
        y_hist_.push_back(y);
    }

private:
    std::size_t rows_;
    std::size_t dim_;
    CMat X_;
    CMat C_;
    CVec K_;
    std::vector<CVec> r_hist_;
    std::vector<CVec> y_hist_;
    bool sequential_ = false;
};

// ---------------------------------------------------------------------------
// Batch and sequential least squares
// ---------------------------------------------------------------------------

// Node 2 estimates H from (f, y_o / sqrt(rho_o)); node 1 estimates H^* from
// (z, conj(y_e) / sqrt(rho_e)).
class LsAligner
{
public:
    // Optimal: each node solves in batch until its history reaches its own
    // array size, then continues with exact recursive updates.
    enum class Mode
    {
        Batch,
        Optimal
    };

    LsAligner(Mode mode, const AlignerContext &ctx, CVec f0, CVec z0)
        : mode_(mode), ctx_(ctx), f_(std::move(f0)), z_(std::move(z0)), node2_(z_.size(), f_.size()), node1_(f_.size(), z_.size())
    {
    }

    template <ChannelAccess L>
    void step(L &link, std::size_t k)
    {
        const CVec y_o = link.ping(f_, k - 1);
        const CVec f_rx = link.forward(f_);
        absorb(node2_, f_rx, y_o * detail::inv_sqrt_or_one(ctx_.rho_o));
        z_ = normalized(node2_.estimate() * f_rx);

        const CVec z_rx = link.forward(z_);
        const CVec y_e = link.pong(z_, k - 1);
        absorb(node1_, z_rx, conj(y_e) * detail::inv_sqrt_or_one(ctx_.rho_e));
        f_ = normalized(node1_.estimate() * z_rx);
    }

    const CVec &f() const noexcept { return f_; }
    const CVec &z() const noexcept { return z_; }
    // Estimate of H held by node 2.
    const LsEstimator &node2() const noexcept { return node2_; }
    // Estimate of H^* held by node 1.
    const LsEstimator &node1() const noexcept { return node1_; }

private:
    void absorb(LsEstimator &est, const CVec &r, const CVec &y)
    {
        if (est.sequential())
        {
            est.update(r, y);
            return;
        }
        est.append(r, y);
        est.solve_batch();
        if (mode_ == Mode::Optimal && est.count() == est.dim())
            est.begin_sequential_from_history();
    }

    Mode mode_;
    AlignerContext ctx_;
    CVec f_, z_;
    LsEstimator node2_;
    LsEstimator node1_;
};

// Rank-one initialization in round 1, covariances alpha I, recursive updates
// afterwards.
class SlsSuboptimalAligner
{
public:
    SlsSuboptimalAligner(const AlignerContext &ctx, double alpha, CVec f0, CVec z0)
        : ctx_(ctx), alpha_(alpha), f_(std::move(f0)), z_(std::move(z0)), node2_(z_.size(), f_.size()), node1_(f_.size(), z_.size())
    {
        if (!(alpha > 0.0))
            throw ContractViolation("sls: alpha must be positive");
    }

    template <ChannelAccess L>
    void step(L &link, std::size_t k)
    {
        const double so = detail::inv_sqrt_or_one(ctx_.rho_o);
        const double se = detail::inv_sqrt_or_one(ctx_.rho_e);

        const CVec y_o = link.ping(f_, k - 1);
        const CVec f_rx = link.forward(f_);
        last_y_o_norm_ = norm(y_o);
        if (k == 1)
        {
            node2_.begin_sequential(outer(y_o * so, f_rx), alpha_);
            z_ = normalized(y_o);
        }
        else
        {
            node2_.update(f_rx, y_o * so);
            z_ = normalized(node2_.estimate() * f_rx);
        }

        const CVec z_rx = link.forward(z_);
        const CVec y_e = link.pong(z_, k - 1);
        last_y_e_norm_ = norm(y_e);
        const CVec y_e_conj = conj(y_e);
        if (k == 1)
        {
            node1_.begin_sequential(outer(y_e_conj * se, z_rx), alpha_);
            f_ = normalized(y_e_conj);
        }
        else
        {
            node1_.update(z_rx, y_e_conj * se);
            f_ = normalized(node1_.estimate() * z_rx);
        }
    }

    const CVec &f() const noexcept { return f_; }
    const CVec &z() const noexcept { return z_; }
    const LsEstimator &node2() const noexcept { return node2_; }
    const LsEstimator &node1() const noexcept { return node1_; }
    double last_y_o_norm() const noexcept { return last_y_o_norm_; }
    double last_y_e_norm() const noexcept { return last_y_e_norm_; }

private:
    AlignerContext ctx_;
    double alpha_;
    CVec f_, z_;
    LsEstimator node2_;
    LsEstimator node1_;
    double last_y_o_norm_ = 0.0;
    double last_y_e_norm_ = 0.0;
};

// ---------------------------------------------------------------------------
// Power methods
// ---------------------------------------------------------------------------

// Running sums of received vectors; no feedback.
class SummedPowerAligner
{
public:
    SummedPowerAligner(CVec f0, CVec z0) : f_(std::move(f0)), z_(std::move(z0)), s_e_(f_.size()), s_o_(z_.size()) {}

    void seed(CVec s_e, CVec s_o)
    {
        if (s_e.size() != s_e_.size() || s_o.size() != s_o_.size())
            throw InvalidDimension("summed: seed length mismatch");
        s_e_ = std::move(s_e);
        s_o_ = std::move(s_o);
    }

    template <ChannelAccess L>
    void step(L &link, std::size_t k)
    {
        node2_step(link.ping(f_, k - 1));
        node1_step(link.pong(z_, k - 1));
    }

    void node2_step(const CVec &y_o)
    {
        s_o_ += y_o;
        z_ = normalized_sum(s_o_);
    }

    void node1_step(const CVec &y_e)
    {
        s_e_ += conj(y_e);
        f_ = normalized_sum(s_e_);
    }

    const CVec &f() const noexcept { return f_; }
    const CVec &z() const noexcept { return z_; }
    const CVec &s_e() const noexcept { return s_e_; }
    const CVec &s_o() const noexcept { return s_o_; }
    double alpha() const { return 1.0 / norm(s_e_); }
    double beta() const { return 1.0 / norm(s_o_); }

private:
    static CVec normalized_sum(const CVec &s)
    {
        try
        {
            return normalized(s);
        }
        catch (const DegenerateVector &)
        {
            throw DegenerateVector("summed: running sum has zero norm");
        }
    }

    CVec f_, z_;
    CVec s_e_, s_o_;
};

// Least-squares priming for k <= k_switch, summed power afterwards.
class LispAligner
{
public:
    LispAligner(const AlignerContext &ctx, double alpha, std::size_t k_switch, LispSeeding seeding, CVec f0, CVec z0)
        : k_switch_(k_switch), seeding_(seeding), sls_(ctx, alpha, f0, z0), summed_(std::move(f0), std::move(z0))
    {
        if (k_switch < 1)
            throw ContractViolation("lisp: k_switch must be at least 1");
    }

    template <ChannelAccess L>
    void step(L &link, std::size_t k)
    {
        if (k <= k_switch_)
        {
            sls_.step(link, k);
            if (k == k_switch_)
                switch_over();
            return;
        }
        summed_.step(link, k);
    }

    bool switched() const noexcept { return switched_; }
    const CVec &f() const noexcept { return switched_ ? summed_.f() : sls_.f(); }
    const CVec &z() const noexcept { return switched_ ? summed_.z() : sls_.z(); }
    const SummedPowerAligner &summed() const noexcept { return summed_; }

private:
    void switch_over()
    {
        const CVec &f = sls_.f();
        const CVec &z = sls_.z();
        SummedPowerAligner next(f, z);
        switch (seeding_)
        {
        case LispSeeding::Unit: next.seed(f, z); break;
        case LispSeeding::Observation: next.seed(f * sls_.last_y_e_norm(), z * sls_.last_y_o_norm()); break;
        case LispSeeding::Zero: break;
        }
        summed_ = std::move(next);
        switched_ = true;
    }

    std::size_t k_switch_;
    LispSeeding seeding_;
    SlsSuboptimalAligner sls_;
    SummedPowerAligner summed_;
    bool switched_ = false;
};

// Conjugate, normalize, retransmit.
class SimplePowerAligner
{
public:
    SimplePowerAligner(CVec f0, CVec z0) : f_(std::move(f0)), z_(std::move(z0)) {}

    template <ChannelAccess L>
    void step(L &link, std::size_t k)
    {
        z_ = normalized(link.ping(f_, k - 1));
        f_ = normalized(conj(link.pong(z_, k - 1)));
    }

    const CVec &f() const noexcept { return f_; }
    const CVec &z() const noexcept { return z_; }

private:
    CVec f_, z_;
};

// ---------------------------------------------------------------------------
// Pilot-based MMSE benchmark
// ---------------------------------------------------------------------------

// Unitary DFT matrix.
inline CMat dft_matrix(std::size_t n)
{
    CMat P(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            P(i, j) = std::polar(s, -2.0 * std::numbers::pi * static_cast<double>((i * j) % n) / static_cast<double>(n));
    return P;
}

// MMSE estimate sqrt(a)/(1+a) Y P^* from Y = sqrt(a) H P + N.
inline CMat mmse_estimate(const CMat &Y, const CMat &P, double a)
{
    CMat est = Y * P.adjoint();
    est *= std::sqrt(a) / (1.0 + a);
    return est;
}

// Spends the whole k_max budget on DFT training at both nodes in the first
// round, then beamforms along the dominant singular vectors of the estimates.
class PilotMmseAligner
{
public:
    PilotMmseAligner(const AlignerContext &ctx, CVec f0, CVec z0) : ctx_(ctx), f_(std::move(f0)), z_(std::move(z0))
    {
        const std::size_t m = std::max(f_.size(), z_.size());
        if (ctx_.k_max < m)
            throw ContractViolation("pilot_mmse: k_max must be at least max(M_r, M_t) = " + std::to_string(m));
    }

    template <ChannelAccess L>
    void step(L &link, std::size_t k)
    {
        if (k != 1)
            return;
        const std::size_t mt = link.tx_dim(), mr = link.rx_dim();
        const double kmax = static_cast<double>(ctx_.k_max);

        const double energy_o = kmax / static_cast<double>(mt);
        const CMat P_o = dft_matrix(mt);
        H_hat_o_ = mmse_estimate(link.sound_downlink(P_o, energy_o), P_o, ctx_.rho_o * energy_o);

        const double energy_e = kmax / static_cast<double>(mr);
        const CMat P_e = dft_matrix(mr);
        H_hat_e_ = mmse_estimate(link.sound_uplink(P_e, energy_e), P_e, ctx_.rho_e * energy_e);

        // a zero estimate carries no information: keep the random pair
        if (!H_hat_o_.is_zero())
            z_ = dominant_singular_pair(H_hat_o_).u;
        if (!H_hat_e_.is_zero())
            f_ = conj(dominant_singular_pair(H_hat_e_).u);
    }

    const CVec &f() const noexcept { return f_; }
    const CVec &z() const noexcept { return z_; }
    // Node 2's estimate of H.
    const CMat &h_hat_o() const noexcept { return H_hat_o_; }
    // Node 1's estimate of H^T.
    const CMat &h_hat_e() const noexcept { return H_hat_e_; }

private:
    AlignerContext ctx_;
    CVec f_, z_;
    CMat H_hat_o_;
    CMat H_hat_e_;
};

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

// Runs k_max rounds, calling on_record(k, f, z) for k = 0..k_max.
template <ChannelAccess L, class OnRecord>
void run_aligner(const AlignerKind &kind, const AlignerContext &ctx, L &link, const CVec &f0, const CVec &z0, OnRecord &&on_record)
{
    kind.validate();
    if (f0.size() != link.tx_dim() || z0.size() != link.rx_dim())
        throw InvalidDimension("run_aligner: initial beam lengths do not match the link");
    on_record(std::size_t{0}, f0, z0);
    auto drive = [&](auto &aligner) {
        for (std::size_t k = 1; k <= ctx.k_max; ++k)
        {
            aligner.step(link, k);
            on_record(k, aligner.f(), aligner.z());
        }
    };
    switch (kind.algorithm)
    {
    case Algorithm::BatchLS:
    {
        LsAligner a(LsAligner::Mode::Batch, ctx, f0, z0);
        drive(a);
        break;
    }
    case Algorithm::SlsOptimal:
    {
        LsAligner a(LsAligner::Mode::Optimal, ctx, f0, z0);
        drive(a);
        break;
    }
    case Algorithm::SlsSuboptimal:
    {
        SlsSuboptimalAligner a(ctx, kind.alpha_init, f0, z0);
        drive(a);
        break;
    }
    case Algorithm::SummedPower:
    {
        SummedPowerAligner a(f0, z0);
        drive(a);
        break;
    }
    case Algorithm::Lisp:
    {
        LispAligner a(ctx, kind.alpha_init, kind.k_switch, kind.seeding, f0, z0);
        drive(a);
        break;
    }
    case Algorithm::SimplePower:
    {
        SimplePowerAligner a(f0, z0);
        drive(a);
        break;
    }
    case Algorithm::PilotMmse:
    {
        PilotMmseAligner a(ctx, f0, z0);
        drive(a);
        break;
    }
    }
}

// ---------------------------------------------------------------------------
// Summed-power state transition under a real diagonal channel
// ---------------------------------------------------------------------------

struct StateTransitionEigen
{
    CMat U;       // 2M x 2M
    CMat Lambda;  // diagonal, 1 + sqrt(rho alpha beta) h_i then 1 - sqrt(rho alpha beta) h_i
};

// Diagonalization of [[I, sqrt(rho) beta H], [sqrt(rho) alpha H, I]] for
// H = diag(h).
inline StateTransitionEigen state_transition_eigendecomposition(std::span<const double> h, double alpha, double beta, double rho)
{
    const std::size_t m = h.size();
    if (m == 0)
        throw InvalidDimension("state transition: empty h");
    if (!(alpha > 0.0) || !(beta > 0.0) || !(rho > 0.0))
        throw ContractViolation("state transition: alpha, beta and rho must be positive");
    const double a = std::sqrt(beta / (alpha + beta));
    const double b = std::sqrt(alpha / (alpha + beta));
    const double g = std::sqrt(rho * alpha * beta);
    StateTransitionEigen out{CMat(2 * m, 2 * m), CMat(2 * m, 2 * m)};
    for (std::size_t i = 0; i < m; ++i)
    {
        out.U(i, i) = a;
        out.U(i, m + i) = a;
        out.U(m + i, i) = b;
        out.U(m + i, m + i) = -b;
        out.Lambda(i, i) = 1.0 + g * h[i];
        out.Lambda(m + i, m + i) = 1.0 - g * h[i];
    }
    return out;
}

} // namespace beamalign

#endif
