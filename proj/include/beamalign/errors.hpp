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

#ifndef BEAMALIGN_ERRORS_HPP
#define BEAMALIGN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace beamalign
{

// Base class of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error
{
public:
    using Error::Error;
};

// A Gram matrix inside a least-squares solve is singular or too ill-conditioned.
class RankDeficient : public Error
{
public:
    RankDeficient(const std::string &what, std::size_t dimension, double condition)
        : Error(what), dimension_(dimension), condition_(condition) {}

    std::size_t dimension() const noexcept { return dimension_; }
    double condition() const noexcept { return condition_; }

private:
    std::size_t dimension_;
    double condition_;
};

class NonConvergence : public Error
{
public:
    NonConvergence(const std::string &what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Caller broke a documented precondition (non-unit beamformer, wrong length, ...).
class ContractViolation : public Error
{
public:
    using Error::Error;
};

// A vector that must be normalized has zero norm.
class DegenerateVector : public Error
{
public:
    using Error::Error;
};

// Recursive update hit a non-positive innovation denominator.
class NumericalDegeneracy : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    ConfigError(const std::string &key, const std::string &what)
        : Error(key.empty() ? what : key + ": " + what), key_(key) {}

    const std::string &key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace beamalign

#endif
