#pragma once

// Closed-form SINR and rate approximations for IID Rayleigh channels, plus the
// 3 dB antenna-count rules of thumb. Everything is linear internally; dB and degrees
// appear only in the constructors.

#include <mimo_lab/errors.hpp>
#include <mimo_lab/impairments.hpp>

#include <cmath>
#include <cstddef>
#include <optional>

namespace mimo_lab {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

class LinkBudget {
public:
    LinkBudget(double snr_t_linear, std::size_t users, std::size_t antennas, double noise_power = 1.0)
        : snr_t_(snr_t_linear), users_(users), antennas_(antennas), noise_(noise_power) {
        if (!(snr_t_ > 0.0) || !std::isfinite(snr_t_)) throw ArgumentError("target SNR must be positive");
        if (users_ == 0) throw ArgumentError("K must be at least 1");
        if (antennas_ == 0) throw ArgumentError("M must be at least 1");
        if (!(noise_ > 0.0) || !std::isfinite(noise_)) throw ArgumentError("noise power must be positive");
    }

    static LinkBudget from_db(double snr_t_db, std::size_t users, std::size_t antennas, double noise_power = 1.0) {
        return LinkBudget(db_to_linear(snr_t_db), users, antennas, noise_power);
    }

    double snr_t() const noexcept { return snr_t_; }
    double snr_t_db() const { return linear_to_db(snr_t_); }
    std::size_t users() const noexcept { return users_; }
    std::size_t antennas() const noexcept { return antennas_; }
    double noise_power() const noexcept { return noise_; }

private:
    double snr_t_;
    std::size_t users_;
    std::size_t antennas_;
    double noise_;
};

/// Transmit power that gives SNR_t in the interference-free case: N0 SNR_t / M.
inline double tx_power(const LinkBudget& b) {
    return b.noise_power() * b.snr_t() / static_cast<double>(b.antennas());
}

inline double sinr_mf(const LinkBudget& b) {
    const double k = static_cast<double>(b.users());
    const double m = static_cast<double>(b.antennas());
    return b.snr_t() / (1.0 + b.snr_t() * (k - 1.0) / m);
}

inline double sinr_zf(const LinkBudget& b) {
    if (b.antennas() <= b.users()) {
        throw InfeasibleError("ZF SINR needs M > K, got M=" + std::to_string(b.antennas()) +
                              ", K=" + std::to_string(b.users()));
    }
    return b.snr_t() * (1.0 - static_cast<double>(b.users()) / static_cast<double>(b.antennas()));
}

enum class ErrorFactorMode { exact, small_error };

/// MF SINR reduction from branch errors: exp(-sigma_phi^2) / (1 + sigma_a^2), or its
/// small-error form 1 / (1 + sigma_a^2 + sigma_phi^2).
inline double error_factor(const ImpairmentConfig& config, ErrorFactorMode mode) {
    const double va = config.sigma_a_lin() * config.sigma_a_lin();
    const double vp = config.sigma_phi_rad() * config.sigma_phi_rad();
    if (mode == ErrorFactorMode::exact) return std::exp(-vp) / (1.0 + va);
    return 1.0 / (1.0 + va + vp);
}

/// Total error variance sigma_a^2 + sigma_phi^2 (linear, radians).
inline double total_error_variance(const ImpairmentConfig& config) {
    const double sa = config.sigma_a_lin();
    const double sp = config.sigma_phi_rad();
    return sa * sa + sp * sp;
}

inline double sinr_mf_impaired(const LinkBudget& b, const ImpairmentConfig& config) {
    return sinr_mf(b) * error_factor(config, ErrorFactorMode::exact);
}

inline double rate_from_sinr(double sinr) {
    if (!(sinr >= 0.0)) throw ArgumentError("SINR must be non-negative");
    return std::log2(1.0 + sinr);
}

/// K UEs with identical SINR.
inline double sum_rate_analytic(std::size_t users, double sinr) {
    return static_cast<double>(users) * rate_from_sinr(sinr);
}

enum class PrecoderFamily { mf, zf };

/// Antenna count that puts the SINR 3 dB below SNR_t, before rounding.
/// ZF ignores impairments; only the MF rule has an impaired form.
inline double antennas_for_3db_real(PrecoderFamily precoder, std::size_t users, double snr_t,
                                    const std::optional<ImpairmentConfig>& impairments = std::nullopt) {
    if (users == 0) throw ArgumentError("K must be at least 1");
    if (precoder == PrecoderFamily::zf) return 2.0 * static_cast<double>(users);
    if (!(snr_t > 0.0)) throw ArgumentError("target SNR must be positive");
    const double base = static_cast<double>(users - 1) * snr_t;
    if (!impairments || impairments->is_zero()) return base;
    const double s2 = total_error_variance(*impairments);
    if (s2 >= 1.0) {
        throw InfeasibleError("3 dB point unreachable: total error variance " + std::to_string(s2) + " >= 1");
    }
    return (1.0 + s2) / (1.0 - s2) * base;
}

inline std::size_t antennas_for_3db(PrecoderFamily precoder, std::size_t users, double snr_t,
                                    const std::optional<ImpairmentConfig>& impairments = std::nullopt) {
    const double m = antennas_for_3db_real(precoder, users, snr_t, impairments);
    // Absorb dB round-off (e.g. 10^(10/10) landing a few ulps above 10) before rounding up.
    const double rounded = std::ceil(m * (1.0 - 1e-12));
    return static_cast<std::size_t>(std::max(rounded, 1.0));
}

}  // namespace mimo_lab
