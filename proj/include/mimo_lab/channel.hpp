#pragma once

// Downlink channel generators: IID Rayleigh and single-path line of sight from a ULA.

#include <mimo_lab/errors.hpp>
#include <mimo_lab/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace mimo_lab {

/// K x M matrix of coefficients h_km from antenna m to UE k.
class ChannelMatrix {
public:
    explicit ChannelMatrix(ComplexMatrix coefficients) : coeffs_(std::move(coefficients)) {}

    std::size_t users() const noexcept { return coeffs_.rows(); }
    std::size_t antennas() const noexcept { return coeffs_.cols(); }

    const ComplexMatrix& matrix() const noexcept { return coeffs_; }
    std::span<const cplx> row(std::size_t k) const noexcept { return coeffs_.row(k); }
    const cplx& operator()(std::size_t k, std::size_t m) const noexcept { return coeffs_(k, m); }

    bool operator==(const ChannelMatrix&) const = default;

private:
    ComplexMatrix coeffs_;
};

struct LosConfig {
    double spacing_wavelengths = 0.6;
    double aod_min_deg = -60.0;
    double aod_max_deg = 60.0;
    double theta_3db_deg = 90.0;
    double front_to_back_db = 20.0;
    bool normalize = true;

    void validate() const {
        if (!(spacing_wavelengths > 0.0)) throw ArgumentError("LoS element spacing must be positive");
        if (!(theta_3db_deg > 0.0)) throw ArgumentError("LoS half-power beamwidth must be positive");
        if (!(front_to_back_db > 0.0)) throw ArgumentError("LoS front-to-back floor must be positive");
        if (!(aod_min_deg > -90.0 && aod_max_deg < 90.0 && aod_min_deg <= aod_max_deg)) {
            throw ArgumentError("LoS AoD range must be an ordered interval inside (-90, 90)");
        }
    }

    bool operator==(const LosConfig&) const = default;
};

inline ChannelMatrix iid_rayleigh(std::size_t antennas, std::size_t users, RngStream& stream) {
    if (antennas == 0 || users == 0) throw ArgumentError("iid_rayleigh: M and K must be at least 1");
    return ChannelMatrix(sample_complex_gaussian_matrix(users, antennas, 1.0, stream));
}

/// Horizontal element pattern, attenuation min(12 (az/theta3dB)^2, A_m) dB, as an amplitude.
inline double element_pattern_amplitude(double azimuth_deg, double theta_3db_deg, double front_to_back_db) {
    if (!(theta_3db_deg > 0.0)) throw ArgumentError("half-power beamwidth must be positive");
    const double ratio = azimuth_deg / theta_3db_deg;
    const double attenuation_db = std::min(12.0 * ratio * ratio, front_to_back_db);
    return std::pow(10.0, -attenuation_db / 20.0);
}

inline double sample_aod(const LosConfig& config, RngStream& stream) {
    if (config.aod_min_deg == config.aod_max_deg) return config.aod_min_deg;
    return stream.uniform(config.aod_min_deg, config.aod_max_deg);
}

/// Planar-wavefront channel for UEs at the given angles of departure. Element 0 is the
/// phase reference.
inline ChannelMatrix los_channel_from_aods(std::size_t antennas, std::span<const double> aods_deg,
                                           const LosConfig& config) {
    config.validate();
    if (antennas == 0 || aods_deg.empty()) throw ArgumentError("los_channel: M and K must be at least 1");
    ComplexMatrix h(aods_deg.size(), antennas);
    for (std::size_t k = 0; k < aods_deg.size(); ++k) {
        const double theta = aods_deg[k] * std::numbers::pi / 180.0;
        const double gain =
            config.normalize ? 1.0
                             : element_pattern_amplitude(aods_deg[k], config.theta_3db_deg, config.front_to_back_db);
        // With normalization the pattern gain is a common row factor that gets divided out,
        // so |h_km| = 1 and ||h_k||^2 = M exactly.
        const double phase_step = 2.0 * std::numbers::pi * config.spacing_wavelengths * std::sin(theta);
        auto row = h.row(k);
        for (std::size_t m = 0; m < antennas; ++m) row[m] = std::polar(gain, phase_step * static_cast<double>(m));
    }
    return ChannelMatrix(std::move(h));
}

inline ChannelMatrix los_channel(std::size_t antennas, std::size_t users, const LosConfig& config,
                                 RngStream& stream) {
    config.validate();
    if (antennas == 0 || users == 0) throw ArgumentError("los_channel: M and K must be at least 1");
    std::vector<double> aods(users);
    for (auto& a : aods) a = sample_aod(config, stream);
    return los_channel_from_aods(antennas, aods, config);
}

}  // namespace mimo_lab
