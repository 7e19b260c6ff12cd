#pragma once

// Multiplicative per-antenna amplitude/phase errors applied to the channel seen by the precoder.

#include <mimo_lab/channel.hpp>
#include <mimo_lab/errors.hpp>
#include <mimo_lab/numerics.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace mimo_lab {

/// dB amplitude-error std to a linear std of the gain deviation a_m: 10^(dB/20) - 1.
inline double sigma_a_linear(double sigma_a_db) {
    if (!(sigma_a_db >= 0.0)) throw ArgumentError("amplitude error in dB must be non-negative");
    return std::pow(10.0, sigma_a_db / 20.0) - 1.0;
}

/// Amplitude error (dB, or a direct linear std) and phase error (degrees).
class ImpairmentConfig {
public:
    ImpairmentConfig() = default;

    static ImpairmentConfig from_db_deg(double sigma_a_db, double sigma_phi_deg) {
        if (!(sigma_a_db >= 0.0)) throw ArgumentError("sigma_a_db must be non-negative");
        if (!(sigma_phi_deg >= 0.0)) throw ArgumentError("sigma_phi_deg must be non-negative");
        ImpairmentConfig c;
        c.sigma_a_db_ = sigma_a_db;
        c.sigma_phi_deg_ = sigma_phi_deg;
        return c;
    }

    /// Bypasses the dB convention: a_m ~ N(0, sigma_a_lin^2) directly.
    static ImpairmentConfig from_linear(double sigma_a_lin, double sigma_phi_deg) {
        if (!(sigma_a_lin >= 0.0)) throw ArgumentError("linear amplitude std must be non-negative");
        ImpairmentConfig c = from_db_deg(0.0, sigma_phi_deg);
        c.sigma_a_lin_override_ = sigma_a_lin;
        return c;
    }

    double sigma_a_db() const noexcept { return sigma_a_db_; }
    double sigma_phi_deg() const noexcept { return sigma_phi_deg_; }
    double sigma_a_lin() const {
        return sigma_a_lin_override_ ? *sigma_a_lin_override_ : sigma_a_linear(sigma_a_db_);
    }
    double sigma_phi_rad() const noexcept { return sigma_phi_deg_ * std::numbers::pi / 180.0; }

    bool is_zero() const { return sigma_a_lin() == 0.0 && sigma_phi_deg_ == 0.0; }

    bool operator==(const ImpairmentConfig&) const = default;

private:
    double sigma_a_db_ = 0.0;
    double sigma_phi_deg_ = 0.0;
    std::optional<double> sigma_a_lin_override_;
};

/// epsilon_m = (1 + a_m) exp(j phi_m), one per BS antenna.
class BranchErrorVector {
public:
    explicit BranchErrorVector(std::vector<cplx> errors) : errors_(std::move(errors)) {}

    static BranchErrorVector ones(std::size_t antennas) { return BranchErrorVector(std::vector<cplx>(antennas, 1.0)); }

    std::size_t size() const noexcept { return errors_.size(); }
    std::span<const cplx> values() const noexcept { return errors_; }
    const cplx& operator[](std::size_t m) const noexcept { return errors_[m]; }

private:
    std::vector<cplx> errors_;
};

inline BranchErrorVector sample_branch_errors(std::size_t antennas, const ImpairmentConfig& config,
                                              RngStream& stream) {
    if (antennas == 0) throw ArgumentError("sample_branch_errors: M must be at least 1");
    if (config.is_zero()) return BranchErrorVector::ones(antennas);
    const double sa = config.sigma_a_lin();
    const double sp = config.sigma_phi_rad();
    std::vector<cplx> eps(antennas);
    for (auto& e : eps) {
        const double a = sa * stream.standard_normal();
        const double phi = sp * stream.standard_normal();
        // 1 + a can be negative for large amplitude errors, which std::polar does not accept.
        e = (1.0 + a) * std::polar(1.0, phi);
    }
    return BranchErrorVector(std::move(eps));
}

/// H diag(epsilon): every UE's coefficient on antenna m gets the same multiplier.
inline ChannelMatrix apply_impairments(const ChannelMatrix& h, const BranchErrorVector& errors) {
    if (errors.size() != h.antennas()) {
        throw ArgumentError("branch error vector has " + std::to_string(errors.size()) + " entries, channel has " +
                            std::to_string(h.antennas()) + " antennas");
    }
    ComplexMatrix out = h.matrix();
    for (std::size_t k = 0; k < out.rows(); ++k) {
        auto row = out.row(k);
        for (std::size_t m = 0; m < row.size(); ++m) row[m] *= errors[m];
    }
    return ChannelMatrix(std::move(out));
}

}  // namespace mimo_lab
