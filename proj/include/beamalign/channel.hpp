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


#ifndef BEAMALIGN_CHANNEL_HPP
#define BEAMALIGN_CHANNEL_HPP

// Channel models: i.i.d. Rayleigh, clustered sparse mmWave on half-wavelength
// ULAs, and real diagonal channels. Each sample carries its dominant singular
// triple as the alignment reference.

#include "numerics.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace beamalign
{

struct IidModel
{
};

struct SparseModel
{
    std::size_t clusters = 3;
    double angular_spread_deg = 120.0;  // full azimuth spread, centered at broadside
    std::size_t paths_per_cluster = 1;
};

struct DiagonalModel
{
    std::vector<double> h;  // nonincreasing, h[0] > h[1]
};

using ChannelModel = std::variant<IidModel, SparseModel, DiagonalModel>;

struct ChannelSpec
{
    std::size_t m_r = 4;
    std::size_t m_t = 32;
    ChannelModel model = IidModel{};
};

struct ChannelInstance
{
    CMat H;
    double sigma1 = 0.0;
    CVec f_opt;
    CVec z_opt;
    double gain_max = 0.0;
};

struct OptimalPair
{
    CVec f_opt;
    CVec z_opt;
    double gain_max = 0.0;
};

// Throws InvalidDimension naming the offending field.
inline void validate(const ChannelSpec &spec)
{
    if (spec.m_r == 0 || spec.m_t == 0)
        throw InvalidDimension("channel: m_r and m_t must be at least 1");
    if (const auto *s = std::get_if<SparseModel>(&spec.model))
    {
        if (s->clusters == 0)
            throw InvalidDimension("channel: clusters must be at least 1");
        if (!(s->angular_spread_deg >= 0.0 && s->angular_spread_deg <= 360.0))
            throw InvalidDimension("channel: angular_spread_deg must lie in [0, 360]");
        if (s->paths_per_cluster != 1)
            throw InvalidDimension("channel: only paths_per_cluster = 1 is supported");
    }
    else if (const auto *d = std::get_if<DiagonalModel>(&spec.model))
    {
        const auto &h = d->h;
        if (h.size() < 2)
            throw InvalidDimension("channel: diagonal model needs at least two gains");
        if (spec.m_r != h.size() || spec.m_t != h.size())
            throw InvalidDimension("channel: diagonal model requires m_r = m_t = len(h)");
        for (std::size_t i = 0; i < h.size(); ++i)
        {
            if (!(h[i] > 0.0) || !std::isfinite(h[i]))
                throw InvalidDimension("channel: diagonal gains must be positive and finite");
            if (i > 0 && h[i] > h[i - 1])
                throw InvalidDimension("channel: diagonal gains must be nonincreasing");
        }
        if (!(h[0] > h[1]))
            throw InvalidDimension("channel: diagonal model needs h1 > h2 (unique dominant mode)");
    }
}

// Half-wavelength ULA response, unit norm.
inline CVec steering_vector(std::size_t m, double angle_rad)
{
    if (m == 0)
        throw InvalidDimension("steering_vector: m must be at least 1");
    CVec a(m);
    const double s = std::sin(angle_rad);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        a[i] = std::polar(scale, std::numbers::pi * static_cast<double>(i) * s);
    return a;
}

inline OptimalPair optimal_pair(const CMat &H)
{
    SingularTriple t = dominant_singular_pair(H);
    return {std::move(t.v), std::move(t.u), t.sigma * t.sigma};
}

inline ChannelInstance make_instance(CMat H)
{
    SingularTriple t = dominant_singular_pair(H);
    ChannelInstance inst;
    inst.sigma1 = t.sigma;
    inst.gain_max = t.sigma * t.sigma;
    inst.f_opt = std::move(t.v);
    inst.z_opt = std::move(t.u);
    inst.H = std::move(H);
    return inst;
}

inline ChannelInstance sample_channel(const ChannelSpec &spec, Rng &rng)
{
    validate(spec);
    const std::size_t mr = spec.m_r, mt = spec.m_t;
    CMat H;
    if (std::holds_alternative<IidModel>(spec.model))
    {
        H = cgauss_mat(mr, mt, rng);
    }
    else if (const auto *s = std::get_if<SparseModel>(&spec.model))
    {
        // E||H||_F^2 = m_r m_t, same as the i.i.d. model
        H = CMat(mr, mt);
        const double half = 0.5 * s->angular_spread_deg * std::numbers::pi / 180.0;
        for (std::size_t c = 0; c < s->clusters; ++c)
        {
            const cplx g = rng.cgauss();
            const double theta = rng.uniform(-half, half);
            const double phi = rng.uniform(-half, half);
            H += g * outer(steering_vector(mr, theta), steering_vector(mt, phi));
        }
        H *= std::sqrt(static_cast<double>(mr * mt) / static_cast<double>(s->clusters));
    }
    else
    {
        H = CMat::diagonal(std::get<DiagonalModel>(spec.model).h);
    }
    return make_instance(std::move(H));
}

} // namespace beamalign

#endif
