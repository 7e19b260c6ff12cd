#pragma once

// Dense complex linear algebra for small Gram systems and reproducible random streams.

#include <mimo_lab/errors.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mimo_lab {

using cplx = std::complex<double>;

/// Row-major dense complex matrix. Always at least 1x1.
class ComplexMatrix {
public:
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        if (rows == 0 || cols == 0) {
            throw ArgumentError("matrix dimensions must be positive, got " + std::to_string(rows) +
                                "x" + std::to_string(cols));
        }
        data_.assign(rows * cols, cplx{0.0, 0.0});
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows == 0 || cols == 0) throw ArgumentError("matrix dimensions must be positive");
        if (data_.size() != rows * cols) throw ArgumentError("entry count does not match dimensions");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix out(n, n);
        for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
        return out;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<cplx> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const cplx> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<const cplx> entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<cplx> data_;
};

inline double squared_norm(std::span<const cplx> v) noexcept {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

inline double frobenius_norm(const ComplexMatrix& a) noexcept { return std::sqrt(squared_norm(a.entries())); }

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ArgumentError("cannot multiply " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " by " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            const auto b_row = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
        }
    }
    return out;
}

/// H * H^H. Only the upper triangle is computed; the lower one is its exact conjugate
/// mirror, so the result is Hermitian bit for bit.
inline ComplexMatrix gram(const ComplexMatrix& h) {
    const std::size_t n = h.rows();
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto hi = h.row(i);
        out(i, i) = squared_norm(hi);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto hj = h.row(j);
            cplx s{0.0, 0.0};
            for (std::size_t m = 0; m < h.cols(); ++m) s += hi[m] * std::conj(hj[m]);
            out(i, j) = s;
            out(j, i) = std::conj(s);
        }
    }
    return out;
}

/// Pivots below max_diag / kConditionLimit are treated as a numerically singular matrix.
inline constexpr double kConditionLimit = 1e8;

/// Solves A X = B for Hermitian positive definite A via Cholesky (A = L L^H).
inline ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ArgumentError("hermitian_solve: matrix must be square");
    if (b.rows() != n) throw ArgumentError("hermitian_solve: right-hand side has wrong row count");

    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i).real()));
    const double pivot_floor = max_diag / kConditionLimit;

    // Lower-triangular factor, stored densely; the strict upper part stays zero.
    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > pivot_floor)) {
            throw SingularMatrixError(j, "matrix is not numerically positive definite (pivot " +
                                             std::to_string(j) + ")");
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }

    ComplexMatrix x = b;
    const std::size_t nrhs = b.cols();
    // Forward substitution: L Y = B.
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = x.row(i);
        for (std::size_t k = 0; k < i; ++k) {
            const cplx lik = l(i, k);
            const auto xk = x.row(k);
            for (std::size_t c = 0; c < nrhs; ++c) xi[c] -= lik * xk[c];
        }
        const double inv = 1.0 / l(i, i).real();
        for (auto& v : xi) v *= inv;
    }
    // Back substitution: L^H X = Y.
    for (std::size_t ii = n; ii-- > 0;) {
        auto xi = x.row(ii);
        for (std::size_t k = ii + 1; k < n; ++k) {
            const cplx lki = std::conj(l(k, ii));
            const auto xk = x.row(k);
            for (std::size_t c = 0; c < nrhs; ++c) xi[c] -= lki * xk[c];
        }
        const double inv = 1.0 / l(ii, ii).real();
        for (auto& v : xi) v *= inv;
    }
    return x;
}

/// H^dagger = H^H (H H^H)^{-1} for a wide K x M matrix (M > K). Returns M x K.
inline ComplexMatrix right_pseudoinverse(const ComplexMatrix& h) {
    if (h.cols() <= h.rows()) {
        throw ArgumentError("right_pseudoinverse needs more columns than rows, got " +
                            std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
    }
    // (HH^H)^{-1} H is K x M; its adjoint is H^H (HH^H)^{-1} because the Gram matrix is Hermitian.
    return hermitian_solve(gram(h), h).adjoint();
}

/// One reproducible random stream, identified by (root seed, stream index).
///
/// Streams are single-owner. The underlying engine is seeded from a SplitMix64 mix of the
/// pair, so the state of stream r depends on nothing but (seed, r) and realizations can be
/// evaluated in any order or on any thread.
class RngStream {
public:
    using engine_type = std::mt19937_64;

    RngStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {
        std::uint64_t state = seed ^ 0x6a09e667f3bcc909ULL;
        const std::uint64_t a = splitmix64(state);
        state ^= index * 0x9e3779b97f4a7c15ULL + 0xbb67ae8584caa73bULL;
        const std::uint64_t b = splitmix64(state);
        const std::uint64_t c = splitmix64(state);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t index() const noexcept { return index_; }

    double standard_normal() { return normal_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
    engine_type& engine() noexcept { return engine_; }

    bool operator==(const RngStream& other) const {
        return seed_ == other.seed_ && index_ == other.index_ && engine_ == other.engine_ &&
               normal_ == other.normal_;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t index_;
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

inline RngStream derive_stream(std::uint64_t seed, std::uint64_t index) { return RngStream(seed, index); }

/// Circularly-symmetric CN(0, variance) entries; real and imaginary parts each variance/2.
inline ComplexMatrix sample_complex_gaussian_matrix(std::size_t rows, std::size_t cols, double variance,
                                                    RngStream& stream) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw ArgumentError("variance must be positive and finite");
    }
    ComplexMatrix out(rows, cols);
    const double scale = std::sqrt(variance / 2.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (auto& z : out.row(r)) {
            const double re = stream.standard_normal();
            const double im = stream.standard_normal();
            z = cplx{scale * re, scale * im};
        }
    }
    return out;
}

}  // namespace mimo_lab
