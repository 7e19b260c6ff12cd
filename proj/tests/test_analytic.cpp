#include <mimo_lab/analytic.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace mimo_lab;

// Reference values below were evaluated independently of this library (plain
// substitution in double precision).

TEST(LinkBudget, Validation) {
    EXPECT_THROW(LinkBudget(0.0, 1, 1), ArgumentError);
    EXPECT_THROW(LinkBudget(1.0, 0, 1), ArgumentError);
    EXPECT_THROW(LinkBudget(1.0, 1, 0), ArgumentError);
    EXPECT_THROW(LinkBudget(1.0, 1, 1, 0.0), ArgumentError);
    EXPECT_NEAR(LinkBudget::from_db(10.0, 1, 1).snr_t(), 10.0, 1e-14);
    EXPECT_NEAR(LinkBudget(10.0, 1, 1).snr_t_db(), 10.0, 1e-14);
}

TEST(TxPower, Normalization) {
    EXPECT_DOUBLE_EQ(tx_power(LinkBudget(10.0, 10, 10)), 1.0);
    EXPECT_DOUBLE_EQ(tx_power(LinkBudget(1.0, 1, 1)), 1.0);
    EXPECT_DOUBLE_EQ(tx_power(LinkBudget(7.0, 3, 64)), 2.0 * tx_power(LinkBudget(7.0, 3, 128)));
    EXPECT_DOUBLE_EQ(tx_power(LinkBudget(2.0, 1, 4, 3.0)), 1.5);
}

TEST(SinrMf, ReferenceValues) {
    EXPECT_DOUBLE_EQ(sinr_mf(LinkBudget(10.0, 1, 37)), 10.0);
    EXPECT_DOUBLE_EQ(sinr_mf(LinkBudget(10.0, 10, 90)), 5.0);
    EXPECT_NEAR(sinr_mf(LinkBudget(10.0, 10, 100)), 5.2631578947368425, 1e-13);
}

TEST(SinrZf, ReferenceValues) {
    EXPECT_DOUBLE_EQ(sinr_zf(LinkBudget(8.0, 5, 10)), 4.0);
    EXPECT_NEAR(sinr_zf(LinkBudget(10.0, 10, 100)), 9.0, 1e-14);
    EXPECT_NEAR(sinr_zf(LinkBudget(10.0, 10, 100000000)), 10.0, 1e-5);
    EXPECT_THROW(sinr_zf(LinkBudget(10.0, 10, 10)), InfeasibleError);
}

TEST(SinrFormulas, MonotoneInMAndK) {
    for (double snr : {0.5, 3.0, 10.0, 100.0}) {
        for (std::size_t k = 1; k < 20; ++k) {
            for (std::size_t m = k + 1; m < 200; m += 7) {
                const LinkBudget b(snr, k, m);
                // A lone UE sees no interference, so MF is flat in M there.
                if (k == 1) {
                    EXPECT_EQ(sinr_mf(b), snr);
                } else {
                    EXPECT_LT(sinr_mf(b), sinr_mf(LinkBudget(snr, k, m + 1)));
                }
                EXPECT_LT(sinr_zf(b), sinr_zf(LinkBudget(snr, k, m + 1)));
                EXPECT_GT(sinr_zf(LinkBudget(snr, k, m + 1)), sinr_zf(LinkBudget(snr, k + 1, m + 1)));
                EXPECT_GT(sinr_mf(b), sinr_mf(LinkBudget(snr, k + 1, m)));
                EXPECT_LE(sinr_mf(b), snr);
                EXPECT_LT(sinr_zf(b), snr);
            }
        }
    }
}

TEST(ErrorFactor, ReferenceValues) {
    EXPECT_EQ(error_factor(ImpairmentConfig{}, ErrorFactorMode::exact), 1.0);
    EXPECT_EQ(error_factor(ImpairmentConfig{}, ErrorFactorMode::small_error), 1.0);
    const auto c = ImpairmentConfig::from_db_deg(1.0, 20.0);
    EXPECT_NEAR(error_factor(c, ErrorFactorMode::exact), 0.8722966436071856, 1e-13);
    EXPECT_NEAR(error_factor(c, ErrorFactorMode::small_error), 0.8797121453665778, 1e-13);
}

TEST(ErrorFactor, BoundedAndCloseToSmallErrorForm) {
    for (double a_db = 0.0; a_db <= 3.0; a_db += 0.25) {
        for (double p_deg = 0.0; p_deg <= 30.0; p_deg += 2.5) {
            const auto c = ImpairmentConfig::from_db_deg(a_db, p_deg);
            const double exact = error_factor(c, ErrorFactorMode::exact);
            if (c.is_zero()) {
                EXPECT_EQ(exact, 1.0);
            } else {
                EXPECT_LT(exact, 1.0);
            }
            EXPECT_GT(exact, 0.0);
            const double s2 = total_error_variance(c);
            if (s2 <= 0.25) {
                EXPECT_LE(std::abs(exact - error_factor(c, ErrorFactorMode::small_error)), s2 * s2);
            }
        }
    }
}

TEST(SinrMfImpaired, ReferenceValues) {
    const LinkBudget b(10.0, 10, 100);
    EXPECT_EQ(sinr_mf_impaired(b, ImpairmentConfig{}), sinr_mf(b));
    const auto c = ImpairmentConfig::from_db_deg(1.0, 20.0);
    EXPECT_NEAR(sinr_mf_impaired(b, c), 4.591034966353609, 1e-12);
    // The error loss persists as M grows.
    EXPECT_NEAR(sinr_mf_impaired(LinkBudget(10.0, 10, 1000000000), c), 10.0 * 0.8722966436071856, 1e-6);
}

TEST(Rates, ReferenceValues) {
    EXPECT_EQ(rate_from_sinr(0.0), 0.0);
    EXPECT_NEAR(rate_from_sinr(9.0), 3.321928094887362, 1e-14);
    EXPECT_NEAR(sum_rate_analytic(10, 9.0), 33.219280948873624, 1e-12);
    EXPECT_NEAR(sum_rate_analytic(10, 5.2631578947368425), 26.46890249864358, 1e-12);
    EXPECT_THROW(rate_from_sinr(-1.0), ArgumentError);
}

TEST(RulesOfThumb, ReferenceCounts) {
    EXPECT_EQ(antennas_for_3db(PrecoderFamily::mf, 10, 10.0), 90u);
    EXPECT_EQ(antennas_for_3db(PrecoderFamily::zf, 10, 10.0), 20u);
    EXPECT_EQ(antennas_for_3db(PrecoderFamily::zf, 10, 3.0, ImpairmentConfig::from_db_deg(1.0, 20.0)), 20u);
    EXPECT_EQ(antennas_for_3db(PrecoderFamily::mf, 10, 10.0, ImpairmentConfig::from_db_deg(1.0, 20.0)), 119u);
    EXPECT_NEAR(antennas_for_3db_real(PrecoderFamily::mf, 10, 10.0, ImpairmentConfig::from_db_deg(1.0, 20.0)),
                118.51082602732279, 1e-9);
    EXPECT_EQ(antennas_for_3db(PrecoderFamily::mf, 10, db_to_linear(10.0)), 90u);
    EXPECT_THROW(antennas_for_3db(PrecoderFamily::mf, 10, 10.0, ImpairmentConfig::from_db_deg(0.0, 60.0)),
                 InfeasibleError);
}

TEST(RulesOfThumb, PluggingBackGivesHalfTheTargetSnr) {
    for (double snr : {2.0, 5.0, 10.0, 31.6}) {
        for (std::size_t k = 2; k < 16; ++k) {
            const double m_mf = antennas_for_3db_real(PrecoderFamily::mf, k, snr);
            const double mf = snr / (1.0 + snr * static_cast<double>(k - 1) / m_mf);
            EXPECT_NEAR(mf, snr / 2.0, 1e-12 * snr);
            const double m_zf = antennas_for_3db_real(PrecoderFamily::zf, k, snr);
            EXPECT_NEAR(snr * (1.0 - static_cast<double>(k) / m_zf), snr / 2.0, 1e-12 * snr);

            const auto c = ImpairmentConfig::from_db_deg(1.5, 15.0);
            const double m_imp = antennas_for_3db_real(PrecoderFamily::mf, k, snr, c);
            const double imp = error_factor(c, ErrorFactorMode::small_error) * snr /
                               (1.0 + snr * static_cast<double>(k - 1) / m_imp);
            EXPECT_NEAR(imp, snr / 2.0, 1e-12 * snr);
        }
    }
}
