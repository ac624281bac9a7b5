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


#ifndef BEAMALIGN_PINGPONG_HPP
#define BEAMALIGN_PINGPONG_HPP

// Two-slot TDD observation model and the ideal feedback conduit. Aligners only
// ever see a channel through this layer.
//
//   slot 1 (downlink): y_o = sqrt(rho_o) H f + n_o
//   slot 2 (uplink):   y_e = sqrt(rho_e) H^T conj(z) + n_e

#include "numerics.hpp"

#include <cmath>
#include <concepts>
#include <cstdint>

namespace beamalign
{

struct LinkParams
{
    double rho_o = 1.0;
    double rho_e = 1.0;
    bool noiseless = false;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline constexpr double kUnitNormTolerance = 1e-9;

namespace detail
{

inline void require_unit(const CVec &v, const char *what)
{
    if (!v.all_finite() || std::abs(norm(v) - 1.0) > kUnitNormTolerance)
        throw ContractViolation(std::string(what) + ": beamformer is not unit norm (norm = " + std::to_string(norm(v)) + ")");
}

inline void validate_link(const LinkParams &p)
{
    if (!(p.rho_o >= 0.0) || !std::isfinite(p.rho_o) || !(p.rho_e >= 0.0) || !std::isfinite(p.rho_e))
        throw ContractViolation("link: SNR values must be finite and nonnegative");
}

inline void add_noise(CVec &y, Rng &rng)
{
    for (auto &x : y)
        x += rng.cgauss();
}

} // namespace detail

// y_o = sqrt(rho_o) H f + n_o
inline CVec ping(const CMat &H, const CVec &f, const LinkParams &link, Rng &rng)
{
    if (f.size() != H.cols())
        throw InvalidDimension("ping: beamformer length " + std::to_string(f.size()) + " but H has " + std::to_string(H.cols()) + " columns");
    detail::validate_link(link);
    detail::require_unit(f, "ping");
    CVec y = H * f;
    y *= std::sqrt(link.rho_o);
    if (!link.noiseless)
        detail::add_noise(y, rng);
    return y;
}

// y_e = sqrt(rho_e) H^T conj(z) + n_e
inline CVec pong(const CMat &H, const CVec &z, const LinkParams &link, Rng &rng)
{
    if (z.size() != H.rows())
        throw InvalidDimension("pong: combiner length " + std::to_string(z.size()) + " but H has " + std::to_string(H.rows()) + " rows");
    detail::validate_link(link);
    detail::require_unit(z, "pong");
    CVec y = transpose_times(H, conj(z));
    y *= std::sqrt(link.rho_e);
    if (!link.noiseless)
        detail::add_noise(y, rng);
    return y;
}

// Counts bits sent over the ideal feedback link, B bits per complex element.
class FeedbackLog
{
public:
    explicit FeedbackLog(std::size_t bits_per_element = 16) : bits_per_element_(bits_per_element) {}

    void record(std::size_t elements)
    {
        bits_ += static_cast<std::uint64_t>(elements) * bits_per_element_;
        ++messages_;
    }

    std::uint64_t bits() const noexcept { return bits_; }
    std::uint64_t bytes() const noexcept { return bits_ / 8; }
    std::size_t messages() const noexcept { return messages_; }
    std::size_t bits_per_element() const noexcept { return bits_per_element_; }

private:
    std::size_t bits_per_element_;
    std::uint64_t bits_ = 0;
    std::size_t messages_ = 0;
};

// Error-free, zero-delay delivery.
inline CVec feedback(const CVec &v, FeedbackLog *log = nullptr)
{
    if (log)
        log->record(v.size());
    return v;
}

// Noise sub-stream slots.
enum class Slot : std::uint64_t
{
    Downlink = 1,
    Uplink = 2,
    SoundDownlink = 3,
    SoundUplink = 4,
};

// A channel realization behind the ping-pong boundary. Noise for iteration k
// and slot s comes from the sub-stream (noise_seed, k, s), so the realization
// does not depend on what the aligner does between transmissions.
class Link
{
public:
    Link(CMat H, LinkParams params, std::uint64_t noise_seed, std::size_t b_bits = 16)
        : H_(std::move(H)), params_(params), noise_seed_(noise_seed), log_(b_bits)
    {
        detail::validate_link(params_);
        if (H_.rows() == 0 || H_.cols() == 0)
            throw InvalidDimension("link: empty channel");
    }

    std::size_t rx_dim() const noexcept { return H_.rows(); }
    std::size_t tx_dim() const noexcept { return H_.cols(); }

    CVec ping(const CVec &f, std::size_t k)
    {
        Rng rng = stream(k, Slot::Downlink);
        return beamalign::ping(H_, f, params_, rng);
    }

    CVec pong(const CVec &z, std::size_t k)
    {
        Rng rng = stream(k, Slot::Uplink);
        return beamalign::pong(H_, z, params_, rng);
    }

    // sqrt(rho_o * energy) H P + N, one column per training vector.
    CMat sound_downlink(const CMat &P, double energy)
    {
        if (P.rows() != H_.cols())
            throw InvalidDimension("sound_downlink: training matrix has wrong row count");
        CMat Y = H_ * P;
        Y *= std::sqrt(params_.rho_o * energy);
        if (!params_.noiseless)
        {
            Rng rng = stream(0, Slot::SoundDownlink);
            for (std::size_t i = 0; i < Y.rows() * Y.cols(); ++i)
                Y.data()[i] += rng.cgauss();
        }
        return Y;
    }

    // sqrt(rho_e * energy) H^T P + N
    CMat sound_uplink(const CMat &P, double energy)
    {
        if (P.rows() != H_.rows())
            throw InvalidDimension("sound_uplink: training matrix has wrong row count");
        CMat Y = H_.transpose() * P;
        Y *= std::sqrt(params_.rho_e * energy);
        if (!params_.noiseless)
        {
            Rng rng = stream(0, Slot::SoundUplink);
            for (std::size_t i = 0; i < Y.rows() * Y.cols(); ++i)
                Y.data()[i] += rng.cgauss();
        }
        return Y;
    }

    CVec forward(const CVec &v) { return feedback(v, &log_); }

    const FeedbackLog &feedback_log() const noexcept { return log_; }

private:
    Rng stream(std::size_t k, Slot slot) const
    {
        return Rng::substream(noise_seed_, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(slot)});
    }

    CMat H_;
    LinkParams params_;
    std::uint64_t noise_seed_;
    FeedbackLog log_;
};

// What an aligner may do with a channel.
template <class L>
concept ChannelAccess = requires(L &link, const CVec &v, const CMat &P, std::size_t k, double e) {
    { link.ping(v, k) } -> std::same_as<CVec>;
    { link.pong(v, k) } -> std::same_as<CVec>;
    { link.sound_downlink(P, e) } -> std::same_as<CMat>;
    { link.sound_uplink(P, e) } -> std::same_as<CMat>;
    { link.forward(v) } -> std::same_as<CVec>;
    { link.rx_dim() } -> std::convertible_to<std::size_t>;
    { link.tx_dim() } -> std::convertible_to<std::size_t>;
};

static_assert(ChannelAccess<Link>);

} // namespace beamalign

#endif
