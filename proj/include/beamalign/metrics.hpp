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


#ifndef BEAMALIGN_METRICS_HPP
#define BEAMALIGN_METRICS_HPP

// Figures of merit and feedback/complexity accounting.

#include "aligners.hpp"
#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

namespace beamalign
{

struct IterationRecord
{
    std::size_t k = 0;
    double norm_gain = 0.0;
    double angle_rad = 0.0;
    double angle_sq = 0.0;
};

// |z^* H f|^2
inline double effective_gain(const CMat &H, const CVec &f, const CVec &z)
{
    if (f.size() != H.cols() || z.size() != H.rows())
        throw InvalidDimension("effective_gain: beam lengths do not match H");
    return std::norm(dot(z, H * f));
}

namespace detail
{

// Angle from a to b via the component of b orthogonal to a.
inline double one_sided_angle(const CVec &a, const CVec &b, double c)
{
    const cplx inner = dot(a, b);
    CVec perp = b - inner * a;
    // project twice for orthogonality to working precision
    perp -= dot(a, perp) * a;
    const double s = norm(perp);
    if (s <= 8.0 * std::numeric_limits<double>::epsilon() * c)
        return 0.0;
    return std::atan2(s, c);
}

} // namespace detail

// arccos |f_opt^* f|, evaluated from the orthogonal and parallel parts so that
// small angles keep full relative precision. Averaging both orientations makes
// the result exactly symmetric.
inline double beam_angle(const CVec &f_opt, const CVec &f)
{
    if (f_opt.size() != f.size())
        throw InvalidDimension("beam_angle: length mismatch");
    const double c = std::abs(dot(f_opt, f));
    const double scale = norm(f_opt) * norm(f);
    if (!(c <= scale * (1.0 + 1e-9)) || std::abs(scale - 1.0) > 1e-6)
        throw ContractViolation("beam_angle: arguments must be unit norm (|inner| = " + std::to_string(c) + ")");
    const double angle = 0.5 * (detail::one_sided_angle(f_opt, f, c) + detail::one_sided_angle(f, f_opt, c));
    return std::clamp(angle, 0.0, std::numbers::pi / 2);
}

inline IterationRecord make_record(std::size_t k, const CMat &H, double gain_max, const CVec &f_opt, const CVec &f, const CVec &z)
{
    IterationRecord r;
    r.k = k;
    r.norm_gain = effective_gain(H, f, z) / gain_max;
    r.angle_rad = beam_angle(f_opt, f);
    r.angle_sq = r.angle_rad * r.angle_rad;
    return r;
}

struct CostReport
{
    std::string flops_order;
    std::uint64_t feedback_bits = 0;
};

// Feedback and compute per the standard complexity table (M = max(M_r, M_t)).
inline CostReport cost_report(const AlignerKind &kind, std::size_t k_max, std::size_t m_r, std::size_t m_t, std::size_t b_bits)
{
    const std::uint64_t per_round = static_cast<std::uint64_t>(b_bits) * (m_r + m_t);
    const std::size_t ks = std::min(kind.k_switch, k_max);
    const std::string kmax = std::to_string(k_max);
    switch (kind.algorithm)
    {
    case Algorithm::BatchLS:
    case Algorithm::SlsOptimal:
    case Algorithm::SlsSuboptimal:
        return {kmax + "*O(M^3)", k_max * per_round};
    case Algorithm::SummedPower:
        return {kmax + "*O(M)", 0};
    case Algorithm::Lisp:
        return {std::to_string(ks) + "*O(M^3) + " + std::to_string(k_max - ks) + "*O(M)", ks * per_round};
    case Algorithm::SimplePower:
        return {kmax + "*O(M)", 0};
    case Algorithm::PilotMmse:
        return {"O(M^3) (one MMSE estimate + dominant singular pair)", 0};
    }
    return {};
}

} // namespace beamalign

#endif
