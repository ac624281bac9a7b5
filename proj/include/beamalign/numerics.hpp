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

#ifndef BEAMALIGN_NUMERICS_HPP
#define BEAMALIGN_NUMERICS_HPP

// Dense complex linear algebra used throughout the library: vectors, matrices,
// a seedable RNG with derivable sub-streams, minimum-norm least squares via the
// Gram-matrix branch, and dominant singular pair extraction.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace beamalign
{

using cplx = std::complex<double>;

namespace detail
{

// Complex product without the inf/NaN recovery of operator*, which GCC
// lowers to a libgcc call that defeats vectorization. Inputs are finite.
inline cplx mul(cplx a, cplx b)
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// conj(a) * b
inline cplx cmul(cplx a, cplx b)
{
    return {a.real() * b.real() + a.imag() * b.imag(), a.real() * b.imag() - a.imag() * b.real()};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic generator. Identical seeds give identical streams; independent
// streams are obtained with substream(seed, {ids...}).
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    Rng(const Rng &) = delete;
    Rng &operator=(const Rng &) = delete;
    Rng(Rng &&) noexcept = default;
    Rng &operator=(Rng &&) noexcept = default;

    static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
    {
        std::uint64_t h = splitmix64(seed ^ 0x2545f4914f6cdd1dULL);
        for (std::uint64_t id : ids)
            h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
        return Rng(h);
    }

    double normal() { return normal_(engine_); }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    // CN(0,1): independent real and imaginary parts with variance 1/2 each.
    cplx cgauss()
    {
        constexpr double s = 0.70710678118654752440;
        double re = normal();
        double im = normal();
        return {s * re, s * im};
    }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// CVec
// ---------------------------------------------------------------------------

class CVec
{
public:
    CVec() = default;
    explicit CVec(std::size_t n, cplx value = {}) : data_(n, value) {}
    CVec(std::initializer_list<cplx> init) : data_(init) {}
    explicit CVec(std::vector<cplx> data) : data_(std::move(data)) {}

    static CVec basis(std::size_t n, std::size_t i)
    {
        CVec e(n);
        e[i] = 1.0;
        return e;
    }

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    cplx &operator[](std::size_t i) { return data_[i]; }
    const cplx &operator[](std::size_t i) const { return data_[i]; }

    cplx *data() noexcept { return data_.data(); }
    const cplx *data() const noexcept { return data_.data(); }
    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }
    std::span<const cplx> span() const noexcept { return data_; }

    CVec &operator+=(const CVec &o)
    {
        check_same(o);
        for (std::size_t i = 0; i < size(); ++i)
            data_[i] += o.data_[i];
        return *this;
    }
    CVec &operator-=(const CVec &o)
    {
        check_same(o);
        for (std::size_t i = 0; i < size(); ++i)
            data_[i] -= o.data_[i];
        return *this;
    }
    CVec &operator*=(cplx s)
    {
        for (auto &x : data_)
            x *= s;
        return *this;
    }
    CVec &operator/=(double s)
    {
        for (auto &x : data_)
            x /= s;
        return *this;
    }

    bool all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(),
                           [](const cplx &x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
    }

    friend bool operator==(const CVec &, const CVec &) = default;

private:
    void check_same(const CVec &o) const
    {
        if (o.size() != size())
            throw InvalidDimension("vector length mismatch: " + std::to_string(size()) + " vs " + std::to_string(o.size()));
    }

    std::vector<cplx> data_;
};

inline CVec operator+(CVec a, const CVec &b) { return a += b; }
inline CVec operator-(CVec a, const CVec &b) { return a -= b; }
inline CVec operator*(cplx s, CVec a) { return a *= s; }
inline CVec operator*(CVec a, cplx s) { return a *= s; }
inline CVec operator/(CVec a, double s) { return a /= s; }

inline CVec conj(CVec v)
{
    for (auto &x : v)
        x = std::conj(x);
    return v;
}

inline double norm_sq(const CVec &v)
{
    double s = 0.0;
    for (const auto &x : v)
        s += std::norm(x);
    return s;
}

inline double norm(const CVec &v) { return std::sqrt(norm_sq(v)); }

// x^* y
inline cplx dot(const CVec &x, const CVec &y)
{
    if (x.size() != y.size())
        throw InvalidDimension("dot: length mismatch");
    cplx s{};
    for (std::size_t i = 0; i < x.size(); ++i)
        s += detail::cmul(x[i], y[i]);
    return s;
}

inline CVec normalized(CVec v)
{
    double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n))
        throw DegenerateVector("cannot normalize a zero or non-finite vector");
    return v /= n;
}

// ---------------------------------------------------------------------------
// CMat (row-major)
// ---------------------------------------------------------------------------

class CMat
{
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols, cplx value = {}) : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    CMat(std::initializer_list<std::initializer_list<cplx>> init)
    {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto &row : init)
        {
            if (row.size() != cols_)
                throw InvalidDimension("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static CMat identity(std::size_t n)
    {
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    static CMat diagonal(std::span<const double> d)
    {
        CMat m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    static CMat from_columns(const std::vector<CVec> &cols)
    {
        if (cols.empty())
            throw InvalidDimension("from_columns: no columns");
        CMat m(cols.front().size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            m.set_col(j, cols[j]);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    cplx &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cplx *data() noexcept { return data_.data(); }
    const cplx *data() const noexcept { return data_.data(); }

    CVec col(std::size_t j) const
    {
        CVec c(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c[i] = (*this)(i, j);
        return c;
    }

    void set_col(std::size_t j, const CVec &c)
    {
        if (c.size() != rows_)
            throw InvalidDimension("set_col: length mismatch");
        for (std::size_t i = 0; i < rows_; ++i)
            (*this)(i, j) = c[i];
    }

    CMat adjoint() const
    {
        CMat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = std::conj((*this)(i, j));
        return t;
    }

    CMat transpose() const
    {
        CMat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    CMat &operator+=(const CMat &o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] += o.data_[i];
        return *this;
    }
    CMat &operator-=(const CMat &o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] -= o.data_[i];
        return *this;
    }
    CMat &operator*=(cplx s)
    {
        for (auto &x : data_)
            x *= s;
        return *this;
    }

    bool all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(),
                           [](const cplx &x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
    }

    bool is_zero() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const cplx &x) { return x == cplx{}; });
    }

    friend bool operator==(const CMat &, const CMat &) = default;

private:
    void check_same(const CMat &o) const
    {
        if (o.rows_ != rows_ || o.cols_ != cols_)
            throw InvalidDimension("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline CMat operator+(CMat a, const CMat &b) { return a += b; }
inline CMat operator-(CMat a, const CMat &b) { return a -= b; }
inline CMat operator*(cplx s, CMat a) { return a *= s; }

inline CMat operator*(const CMat &a, const CMat &b)
{
    if (a.cols() != b.rows())
        throw InvalidDimension("matmul: inner dimensions " + std::to_string(a.cols()) + " and " + std::to_string(b.rows()));
    CMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t l = 0; l < a.cols(); ++l)
        {
            const cplx ail = a(i, l);
            if (ail == cplx{})
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += detail::mul(ail, b(l, j));
        }
    return c;
}

inline CVec operator*(const CMat &a, const CVec &x)
{
    if (a.cols() != x.size())
        throw InvalidDimension("matvec: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times length " + std::to_string(x.size()));
    CVec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
        cplx s{};
        const cplx *row = a.data() + i * a.cols();
        for (std::size_t j = 0; j < a.cols(); ++j)
            s += detail::mul(row[j], x[j]);
        y[i] = s;
    }
    return y;
}

// A^* x without forming the adjoint.
inline CVec adjoint_times(const CMat &a, const CVec &x)
{
    if (a.rows() != x.size())
        throw InvalidDimension("adjoint_times: length mismatch");
    CVec y(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
        const cplx xi = x[i];
        const cplx *row = a.data() + i * a.cols();
        for (std::size_t j = 0; j < a.cols(); ++j)
            y[j] += detail::cmul(row[j], xi);
    }
    return y;
}

// A^T x without forming the transpose.
inline CVec transpose_times(const CMat &a, const CVec &x)
{
    if (a.rows() != x.size())
        throw InvalidDimension("transpose_times: length mismatch");
    CVec y(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
        const cplx xi = x[i];
        const cplx *row = a.data() + i * a.cols();
        for (std::size_t j = 0; j < a.cols(); ++j)
            y[j] += detail::mul(row[j], xi);
    }
    return y;
}

// x y^*
inline CMat outer(const CVec &x, const CVec &y)
{
    CMat m(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            m(i, j) = detail::cmul(y[j], x[i]);
    return m;
}

inline double frobenius_norm(const CMat &a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        s += std::norm(a.data()[i]);
    return std::sqrt(s);
}

// Maximum absolute column sum.
inline double norm1(const CMat &a)
{
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i)
            s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

// (C + C^*) / 2
inline CMat hermitian_part(const CMat &c)
{
    if (c.rows() != c.cols())
        throw InvalidDimension("hermitian_part: matrix is not square");
    CMat h(c.rows(), c.cols());
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j)
            h(i, j) = 0.5 * (c(i, j) + std::conj(c(j, i)));
    return h;
}

inline CMat zero_padded(const CMat &a, std::size_t rows, std::size_t cols)
{
    if (rows < a.rows() || cols < a.cols())
        throw InvalidDimension("zero_padded: target smaller than source");
    CMat p(rows, cols);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            p(i, j) = a(i, j);
    return p;
}

// Gauss-Jordan inverse with partial pivoting.
inline CMat inverse(const CMat &a)
{
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n)
        throw InvalidDimension("inverse: matrix is not square");
    CMat w = a;
    CMat inv = CMat::identity(n);
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(w(r, c)) > std::abs(w(piv, c)))
                piv = r;
        if (w(piv, c) == cplx{})
            throw RankDeficient("inverse: singular matrix (zero pivot in column " + std::to_string(c) + ")", n, INFINITY);
        if (piv != c)
            for (std::size_t j = 0; j < n; ++j)
            {
                std::swap(w(c, j), w(piv, j));
                std::swap(inv(c, j), inv(piv, j));
            }
        const cplx d = 1.0 / w(c, c);
        for (std::size_t j = 0; j < n; ++j)
        {
            w(c, j) = detail::mul(w(c, j), d);
            inv(c, j) = detail::mul(inv(c, j), d);
        }
        for (std::size_t r = 0; r < n; ++r)
        {
            if (r == c)
                continue;
            const cplx f = w(r, c);
            if (f == cplx{})
                continue;
            for (std::size_t j = 0; j < n; ++j)
            {
                w(r, j) -= detail::mul(f, w(c, j));
                inv(r, j) -= detail::mul(f, inv(c, j));
            }
        }
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Random draws
// ---------------------------------------------------------------------------

// Entries i.i.d. CN(0,1).
inline CVec cgauss_vec(std::size_t n, Rng &rng)
{
    if (n == 0)
        throw InvalidDimension("cgauss_vec: n must be at least 1");
    CVec v(n);
    for (auto &x : v)
        x = rng.cgauss();
    return v;
}

inline CMat cgauss_mat(std::size_t rows, std::size_t cols, Rng &rng)
{
    if (rows == 0 || cols == 0)
        throw InvalidDimension("cgauss_mat: dimensions must be at least 1");
    CMat m(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i)
        m.data()[i] = rng.cgauss();
    return m;
}

// Uniformly distributed direction on the complex unit sphere.
inline CVec unit_random(std::size_t n, Rng &rng)
{
    for (;;)
    {
        CVec v = cgauss_vec(n, rng);
        const double nv = norm(v);
        if (nv > 0.0)
            return v /= nv;
    }
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

inline constexpr double kMaxGramCondition = 1e12;

namespace detail
{

inline CMat guarded_gram_inverse(const CMat &gram, const char *which)
{
    const std::size_t n = gram.rows();
    CMat inv;
    try
    {
        inv = inverse(gram);
    }
    catch (const RankDeficient &)
    {
        throw RankDeficient(std::string("lstsq_min_norm: Gram matrix ") + which + " (" + std::to_string(n) + "x" +
                                std::to_string(n) + ") is singular",
                            n, INFINITY);
    }
    const double cond = frobenius_norm(gram) * frobenius_norm(inv);
    if (!(cond <= kMaxGramCondition))
        throw RankDeficient(std::string("lstsq_min_norm: Gram matrix ") + which + " (" + std::to_string(n) + "x" +
                                std::to_string(n) + ") has condition estimate " + std::to_string(cond),
                            n, cond);
    return inv;
}

} // namespace detail

// Minimum-norm least-squares solution A^+ B. Tall or square A inverts A^*A,
// wide A inverts AA^*; the condition estimate of that Gram matrix must stay
// below 1e12.
inline CMat lstsq_min_norm(const CMat &a, const CMat &b)
{
    if (a.rows() == 0 || a.cols() == 0)
        throw InvalidDimension("lstsq_min_norm: empty A");
    if (b.rows() != a.rows())
        throw InvalidDimension("lstsq_min_norm: A has " + std::to_string(a.rows()) + " rows but B has " +
                               std::to_string(b.rows()));
    if (a.is_zero())
        throw RankDeficient("lstsq_min_norm: A is zero", std::min(a.rows(), a.cols()), INFINITY);

    const CMat ah = a.adjoint();
    if (a.rows() >= a.cols())
    {
        const CMat g_inv = detail::guarded_gram_inverse(ah * a, "A^*A");
        return g_inv * (ah * b);
    }
    const CMat g_inv = detail::guarded_gram_inverse(a * ah, "AA^*");
    return ah * (g_inv * b);
}

// ---------------------------------------------------------------------------
// Dominant singular pair
// ---------------------------------------------------------------------------

struct SingularTriple
{
    double sigma = 0.0;
    CVec u;  // left, length rows
    CVec v;  // right, length cols
};

inline constexpr std::size_t kPowerIterationCap = 100000;

namespace detail
{

// Rotates v so its first non-negligible entry is real and positive.
inline cplx canonical_phase(const CVec &v)
{
    for (const auto &x : v)
    {
        const double m = std::abs(x);
        if (m > 1e-8)
            return std::conj(x) / m;
    }
    return 1.0;
}

inline double rayleigh(const CMat &g, const CVec &x) { return dot(x, g * x).real(); }

} // namespace detail

// Power iteration on the smaller Gram matrix. The iterated operator is squared
// every 32 steps without convergence so near-degenerate spectra still reach the
// residual tolerance well inside the iteration cap.
inline SingularTriple dominant_singular_pair(const CMat &a)
{
    if (a.rows() == 0 || a.cols() == 0)
        throw InvalidDimension("dominant_singular_pair: empty matrix");
    if (a.is_zero())
        throw ContractViolation("dominant_singular_pair: matrix is zero");

    const bool left_side = a.rows() <= a.cols();
    const CMat ah = a.adjoint();
    const CMat g = left_side ? a * ah : ah * a;
    const std::size_t d = g.rows();

    Rng start_rng(0x5eedbea3a11911ULL);
    CVec x = unit_random(d, start_rng);

    const double gscale = frobenius_norm(g);
    CMat op = g;
    op *= 1.0 / gscale;

    double lambda = detail::rayleigh(g, x);
    double residual = INFINITY;
    std::size_t since_square = 0;
    for (std::size_t it = 0; it < kPowerIterationCap; ++it)
    {
        CVec y = op * x;
        const double ny = norm(y);
        if (!(ny > 0.0))
        {
            // start vector landed in the null space of a squared operator; fall back
            op = g;
            op *= 1.0 / gscale;
            x = unit_random(d, start_rng);
            continue;
        }
        x = y / ny;
        const double next = detail::rayleigh(g, x);
        residual = norm(g * x - cplx(next) * x);
        const double change = std::abs(next - lambda);
        lambda = next;
        if (residual <= 1e-12 * lambda && change <= 1e-14 * lambda)
        {
            CVec v, u;
            double sigma;
            if (left_side)
            {
                u = x * detail::canonical_phase(x);
                v = adjoint_times(a, u);
                sigma = norm(v);
                v /= sigma;
                // keep the phase convention on v, carry it to u
                const cplx ph = detail::canonical_phase(v);
                v *= ph;
                u *= ph;
            }
            else
            {
                v = x * detail::canonical_phase(x);
                u = a * v;
                sigma = norm(u);
                u /= sigma;
            }
            return {sigma, std::move(u), std::move(v)};
        }
        if (++since_square == 32)
        {
            op = op * op;
            op *= 1.0 / frobenius_norm(op);
            since_square = 0;
        }
    }
    throw NonConvergence("dominant_singular_pair: iteration cap reached", residual / std::max(lambda, 1e-300));
}

// ||A||_2^2 = lambda_max(A^* A)
inline double spectral_norm_sq(const CMat &a)
{
    const double s = dominant_singular_pair(a).sigma;
    return s * s;
}

} // namespace beamalign

#endif
