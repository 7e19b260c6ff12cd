#pragma once

// Matched-filter and zero-forcing precoders built from a (possibly perturbed) channel.

#include <mimo_lab/channel.hpp>
#include <mimo_lab/errors.hpp>
#include <mimo_lab/impairments.hpp>
#include <mimo_lab/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <span>

namespace mimo_lab {

/// M x K matrix whose column k is the beam w_k for UE k.
class PrecodingMatrix {
public:
    explicit PrecodingMatrix(ComplexMatrix weights) : weights_(std::move(weights)) {}

    std::size_t antennas() const noexcept { return weights_.rows(); }
    std::size_t users() const noexcept { return weights_.cols(); }

    const ComplexMatrix& matrix() const noexcept { return weights_; }
    const cplx& operator()(std::size_t m, std::size_t k) const noexcept { return weights_(m, k); }

    double column_squared_norm(std::size_t k) const noexcept {
        double s = 0.0;
        for (std::size_t m = 0; m < antennas(); ++m) s += std::norm(weights_(m, k));
        return s;
    }

    bool operator==(const PrecodingMatrix&) const = default;

private:
    ComplexMatrix weights_;
};

/// How the MF beam is normalized: by its own norm, or by sqrt(E||h_k||^2) = sqrt(M (1 + sigma_a^2)).
struct MfNormalization {
    enum class Mode { exact, expected };

    Mode mode = Mode::exact;
    double sigma_a_lin = 0.0;

    static MfNormalization exact() { return {}; }
    static MfNormalization expected(double sigma_a_lin) { return {Mode::expected, sigma_a_lin}; }
};

inline PrecodingMatrix mf_precoder(const ChannelMatrix& h, MfNormalization norm = MfNormalization::exact()) {
    const std::size_t users = h.users();
    const std::size_t antennas = h.antennas();
    const double expected_norm =
        std::sqrt(static_cast<double>(antennas) * (1.0 + norm.sigma_a_lin * norm.sigma_a_lin));
    ComplexMatrix w(antennas, users);
    for (std::size_t k = 0; k < users; ++k) {
        const auto row = h.row(k);
        const double row_norm = std::sqrt(squared_norm(row));
        if (row_norm == 0.0) {
            throw DegenerateChannelError(k, "channel row for UE " + std::to_string(k) + " is zero");
        }
        const double inv = 1.0 / (norm.mode == MfNormalization::Mode::exact ? row_norm : expected_norm);
        for (std::size_t m = 0; m < antennas; ++m) w(m, k) = std::conj(row[m]) * inv;
    }
    return PrecodingMatrix(std::move(w));
}

/// What ZF does when the Gram matrix of the channel is numerically singular.
enum class SingularGram {
    /// Throw InfeasibleError.
    raise,
    /// Solve with the Gram diagonal loaded by max_diag / kConditionLimit. UEs whose channels are
    /// (numerically) parallel are not separated; all other UEs are still nulled towards them.
    load_diagonal,
};

namespace detail {

struct Pseudoinverse {
    ComplexMatrix matrix;
    bool loaded = false;
};

inline Pseudoinverse checked_pseudoinverse(const ChannelMatrix& h, SingularGram policy) {
    if (h.antennas() <= h.users()) {
        throw InfeasibleError("zero forcing needs M > K, got M=" + std::to_string(h.antennas()) +
                              ", K=" + std::to_string(h.users()));
    }
    try {
        return {right_pseudoinverse(h.matrix()), false};
    } catch (const SingularMatrixError& e) {
        if (policy == SingularGram::raise) throw InfeasibleError(std::string("zero forcing infeasible: ") + e.what());
    }
    ComplexMatrix g = gram(h.matrix());
    double max_diag = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) max_diag = std::max(max_diag, g(i, i).real());
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += max_diag / kConditionLimit;
    try {
        return {hermitian_solve(g, h.matrix()).adjoint(), true};
    } catch (const SingularMatrixError& e) {
        throw InfeasibleError(std::string("zero forcing infeasible even with diagonal loading: ") + e.what());
    }
}

}  // namespace detail

/// Columns of H^dagger, each scaled to unit norm (equal per-UE power in every realization).
/// If regularized is non-null it reports whether the diagonal-loading fallback was taken.
inline PrecodingMatrix zf_precoder_exact(const ChannelMatrix& h, SingularGram policy = SingularGram::raise,
                                         bool* regularized = nullptr) {
    auto [pinv, loaded] = detail::checked_pseudoinverse(h, policy);
    if (regularized) *regularized = loaded;
    for (std::size_t k = 0; k < pinv.cols(); ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < pinv.rows(); ++m) s += std::norm(pinv(m, k));
        const double inv = 1.0 / std::sqrt(s);
        for (std::size_t m = 0; m < pinv.rows(); ++m) pinv(m, k) *= inv;
    }
    return PrecodingMatrix(std::move(pinv));
}

/// sqrt(M - K) H^dagger, which meets E||W||_F^2 = K for IID Rayleigh H.
inline PrecodingMatrix zf_precoder_scaled(const ChannelMatrix& h, SingularGram policy = SingularGram::raise,
                                          bool* regularized = nullptr) {
    auto [pinv, loaded] = detail::checked_pseudoinverse(h, policy);
    if (regularized) *regularized = loaded;
    const double c = std::sqrt(static_cast<double>(h.antennas() - h.users()));
    for (std::size_t m = 0; m < pinv.rows(); ++m)
        for (auto& v : pinv.row(m)) v *= c;
    return PrecodingMatrix(std::move(pinv));
}

}  // namespace mimo_lab
