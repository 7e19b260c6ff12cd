#pragma once

// Statistical self-checks run by `mimo_lab validate`. Fixed seeds, fixed tolerances.

#include <mimo_lab/analytic.hpp>
#include <mimo_lab/channel.hpp>
#include <mimo_lab/impairments.hpp>
#include <mimo_lab/numerics.hpp>
#include <mimo_lab/precoding.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace mimo_lab {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string describe(double measured, double expected, double tolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "measured %.6g, expected %.6g, tolerance %.3g", measured, expected, tolerance);
    return buf;
}

struct MomentEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

template <typename Draw>
MomentEstimate sample_moment(std::uint64_t n, Draw&& draw) {
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 1; i <= n; ++i) {
        const double x = draw();
        const double d = x - mean;
        mean += d / static_cast<double>(i);
        m2 += d * (x - mean);
    }
    const double nn = static_cast<double>(n);
    return {mean, std::sqrt(m2 / (nn - 1.0) / nn)};
}

}  // namespace detail

inline CheckResult check_gaussian_second_moment(std::uint64_t seed = 2024) {
    RngStream s = derive_stream(seed, 0);
    const auto est = detail::sample_moment(200000, [&] {
        return std::norm(sample_complex_gaussian_matrix(1, 1, 1.0, s)(0, 0));
    });
    const double tol = 3.0 * est.stderr_;
    return {"complex Gaussian E|z|^2 = 1 (3 s.e.)", std::abs(est.mean - 1.0) <= tol,
            detail::describe(est.mean, 1.0, tol)};
}

inline CheckResult check_gaussian_fourth_moment(std::uint64_t seed = 2024) {
    RngStream s = derive_stream(seed, 1);
    const auto est = detail::sample_moment(200000, [&] {
        const double p = std::norm(sample_complex_gaussian_matrix(1, 1, 1.0, s)(0, 0));
        return p * p;
    });
    const double tol = 3.0 * est.stderr_;
    return {"complex Gaussian E|z|^4 = 2 (3 s.e.)", std::abs(est.mean - 2.0) <= tol,
            detail::describe(est.mean, 2.0, tol)};
}

inline CheckResult check_phase_characteristic_function(std::uint64_t seed = 2024) {
    const auto config = ImpairmentConfig::from_db_deg(0.0, 20.0);
    const double sp = config.sigma_phi_rad();
    RngStream s = derive_stream(seed, 2);
    double acc = 0.0;
    const std::uint64_t n = 1000000;
    for (std::uint64_t i = 0; i < n; ++i) acc += std::cos(sp * s.standard_normal());
    const double measured = acc / static_cast<double>(n);
    const double expected = std::exp(-sp * sp / 2.0);
    const double tol = 0.002 * expected;
    return {"Re E[exp(j phi)] = exp(-sigma_phi^2/2) at 20 deg (0.2%)", std::abs(measured - expected) <= tol,
            detail::describe(measured, expected, tol)};
}

inline CheckResult check_wishart_trace(std::uint64_t seed = 2024, std::size_t antennas = 100, std::size_t users = 10,
                                       std::uint64_t realizations = 10000) {
    double acc = 0.0;
    const ComplexMatrix eye = ComplexMatrix::identity(users);
    for (std::uint64_t r = 0; r < realizations; ++r) {
        RngStream s = derive_stream(seed + 3, r);
        const ChannelMatrix h = iid_rayleigh(antennas, users, s);
        const ComplexMatrix inv = hermitian_solve(gram(h.matrix()), eye);
        for (std::size_t k = 0; k < users; ++k) acc += inv(k, k).real();
    }
    const double measured = acc / static_cast<double>(realizations);
    const double expected = static_cast<double>(users) / static_cast<double>(antennas - users);
    const double tol = 0.02 * expected;
    return {"E tr((HH^H)^-1) = K/(M-K) (2%)", std::abs(measured - expected) <= tol,
            detail::describe(measured, expected, tol)};
}

inline CheckResult check_zero_forcing_property(std::uint64_t seed = 2024, std::size_t instances = 100) {
    double worst = 0.0;
    for (std::uint64_t r = 0; r < instances; ++r) {
        RngStream s = derive_stream(seed + 4, r);
        const ChannelMatrix h = iid_rayleigh(100, 10, s);
        const double scale = frobenius_norm(h.matrix());
        for (const PrecodingMatrix& w : {zf_precoder_exact(h), zf_precoder_scaled(h)}) {
            const ComplexMatrix hw = multiply(h.matrix(), w.matrix());
            for (std::size_t k = 0; k < hw.rows(); ++k)
                for (std::size_t j = 0; j < hw.cols(); ++j)
                    if (j != k) worst = std::max(worst, std::abs(hw(k, j)) / scale);
        }
    }
    return {"ZF residual max|h_k w_j| <= 1e-8 ||H||_F", worst <= 1e-8, detail::describe(worst, 0.0, 1e-8)};
}

inline CheckResult check_los_normalization(std::uint64_t seed = 2024) {
    double worst = 0.0;
    const LosConfig config{};
    for (std::uint64_t r = 0; r < 200; ++r) {
        RngStream s = derive_stream(seed + 5, r);
        const std::size_t antennas = 1 + r * 5;
        const ChannelMatrix h = los_channel(antennas, 8, config, s);
        for (std::size_t k = 0; k < h.users(); ++k) {
            const double m = static_cast<double>(antennas);
            worst = std::max(worst, std::abs(squared_norm(h.row(k)) - m) / m);
        }
    }
    return {"LoS rows satisfy ||h_k||^2 = M (1e-12 relative)", worst <= 1e-12, detail::describe(worst, 0.0, 1e-12)};
}

inline CheckResult check_impaired_row_power(std::uint64_t seed = 2024) {
    const auto config = ImpairmentConfig::from_db_deg(1.0, 20.0);
    double acc = 0.0;
    const std::uint64_t n = 10000;
    for (std::uint64_t r = 0; r < n; ++r) {
        RngStream s = derive_stream(seed + 6, r);
        const ChannelMatrix h = iid_rayleigh(100, 10, s);
        const ChannelMatrix ht = apply_impairments(h, sample_branch_errors(100, config, s));
        acc += squared_norm(ht.row(0));
    }
    const double measured = acc / static_cast<double>(n);
    const double sa = config.sigma_a_lin();
    const double expected = 100.0 * (1.0 + sa * sa);
    const double tol = 0.02 * expected;
    return {"E||h~_k||^2 = M(1 + sigma_a^2) (2%)", std::abs(measured - expected) <= tol,
            detail::describe(measured, expected, tol)};
}

inline CheckResult check_rules_of_thumb() {
    const double snr = 10.0;
    const std::size_t users = 10;
    const double mf = sinr_mf(LinkBudget(snr, users, static_cast<std::size_t>((users - 1) * snr)));
    const double zf = sinr_zf(LinkBudget(snr, users, 2 * users));
    const auto impaired = antennas_for_3db(PrecoderFamily::mf, users, snr, ImpairmentConfig::from_db_deg(1.0, 20.0));
    const bool ok = mf == snr / 2.0 && zf == snr / 2.0 && impaired == 119;
    char buf[160];
    std::snprintf(buf, sizeof buf, "MF %.17g, ZF %.17g (want %.17g); impaired MF rule %zu (want 119)", mf, zf,
                  snr / 2.0, impaired);
    return {"3 dB rules of thumb", ok, buf};
}

inline std::vector<CheckResult> run_validation_suite(std::uint64_t seed = 2024) {
    return {check_gaussian_second_moment(seed), check_gaussian_fourth_moment(seed),
            check_phase_characteristic_function(seed), check_wishart_trace(seed),
            check_zero_forcing_property(seed), check_los_normalization(seed),
            check_impaired_row_power(seed), check_rules_of_thumb()};
}

}  // namespace mimo_lab
