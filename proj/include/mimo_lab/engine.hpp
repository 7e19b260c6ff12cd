#pragma once

// Monte Carlo estimation of per-UE SINR and ergodic rates.
//
// Realization r always draws from derive_stream(seed, r): first the channel (AoDs then
// coefficients for LoS), then the branch errors. Realizations are evaluated in blocks;
// inside a block workers write into per-index slots, and the block is reduced in index
// order, so the report is bitwise identical for any worker count.

#include <mimo_lab/analytic.hpp>
#include <mimo_lab/channel.hpp>
#include <mimo_lab/errors.hpp>
#include <mimo_lab/impairments.hpp>
#include <mimo_lab/numerics.hpp>
#include <mimo_lab/precoding.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace mimo_lab {

enum class ChannelModel { iid, los };
enum class Precoder { mf, zf_exact, zf_scaled };
enum class ErrorRedraw { per_realization, fixed };

inline const char* to_string(ChannelModel m) { return m == ChannelModel::iid ? "iid" : "los"; }
inline const char* to_string(Precoder p) {
    switch (p) {
        case Precoder::mf: return "mf";
        case Precoder::zf_exact: return "zf_exact";
        case Precoder::zf_scaled: return "zf_scaled";
    }
    return "?";
}
inline const char* to_string(ErrorRedraw r) { return r == ErrorRedraw::fixed ? "fixed" : "per_realization"; }

struct ScenarioConfig {
    std::size_t antennas = 100;
    std::size_t users = 10;
    double snr_t_db = 10.0;
    double noise_power = 1.0;
    ChannelModel model = ChannelModel::iid;
    LosConfig los{};
    Precoder precoder = Precoder::mf;
    ImpairmentConfig impairments{};
    ErrorRedraw error_redraw = ErrorRedraw::per_realization;
    /// MF beams from the perturbed channel are normalized by their own norm unless set to expected.
    MfNormalization::Mode mf_norm = MfNormalization::Mode::exact;
    std::uint64_t realizations = 1000;
    std::uint64_t seed = 1;

    LinkBudget budget() const { return LinkBudget::from_db(snr_t_db, users, antennas, noise_power); }

    void validate() const {
        if (antennas == 0 || users == 0) throw ArgumentError("M and K must be at least 1");
        if (!std::isfinite(snr_t_db)) throw ArgumentError("snr_t_db must be finite");
        if (!(noise_power > 0.0) || !std::isfinite(noise_power)) throw ArgumentError("n0 must be positive");
        if (realizations == 0) throw ArgumentError("realizations must be at least 1");
        if (precoder != Precoder::mf && antennas <= users) {
            throw InfeasibleError(std::string(to_string(precoder)) + " needs M > K, got M=" +
                                  std::to_string(antennas) + ", K=" + std::to_string(users));
        }
        if (model == ChannelModel::los) los.validate();
    }

    bool operator==(const ScenarioConfig&) const = default;
};

struct RateReport {
    std::vector<double> per_ue_rate;
    double sum_rate = 0.0;
    double sum_rate_stderr = 0.0;
    /// Per-UE P E|h_k w_k|^2 / (P sum_j E|h_k w_j|^2 + N0), expectations estimated separately.
    std::vector<double> per_ue_sinr;
    double mean_sinr = 0.0;
    std::uint64_t realizations = 0;
    /// ZF realizations whose Gram matrix needed diagonal loading.
    std::uint64_t regularized_realizations = 0;
};

struct ExecutionOptions {
    /// 0 means hardware concurrency. MIMO_LAB_THREADS caps the result either way.
    unsigned threads = 0;
    std::uint64_t block_size = 2048;
};

/// Explicit requests are honoured as given; MIMO_LAB_THREADS caps both them and the default.
inline unsigned resolve_thread_count(unsigned requested) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (const char* env = std::getenv("MIMO_LAB_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

/// Received signal power |h_k w_k|^2 and intra-cell interference sum_{j!=k} |h_k w_j|^2 per UE.
struct LinkPowers {
    std::vector<double> signal;
    std::vector<double> interference;
    bool regularized = false;
};

inline LinkPowers link_powers(const ChannelMatrix& h, const PrecodingMatrix& w) {
    if (h.antennas() != w.antennas() || h.users() != w.users()) {
        throw ArgumentError("channel " + std::to_string(h.users()) + "x" + std::to_string(h.antennas()) +
                            " does not conform to precoder " + std::to_string(w.antennas()) + "x" +
                            std::to_string(w.users()));
    }
    const std::size_t users = h.users();
    const ComplexMatrix hw = multiply(h.matrix(), w.matrix());
    LinkPowers out{std::vector<double>(users, 0.0), std::vector<double>(users, 0.0)};
    for (std::size_t k = 0; k < users; ++k) {
        for (std::size_t j = 0; j < users; ++j) {
            const double p = std::norm(hw(k, j));
            if (j == k) out.signal[k] = p;
            else out.interference[k] += p;
        }
    }
    return out;
}

/// gamma_k = P |h_k w_k|^2 / (P sum_{j!=k} |h_k w_j|^2 + N0), with H the true channel.
inline std::vector<double> instantaneous_sinr(const ChannelMatrix& h, const PrecodingMatrix& w, double tx_power,
                                              double noise_power) {
    if (!(tx_power > 0.0) || !(noise_power > 0.0)) throw ArgumentError("P and N0 must be positive");
    const LinkPowers lp = link_powers(h, w);
    std::vector<double> gamma(h.users());
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        gamma[k] = tx_power * lp.signal[k] / (tx_power * lp.interference[k] + noise_power);
    }
    return gamma;
}

/// Stream index reserved for the hold-fixed branch errors.
inline constexpr std::uint64_t kFixedErrorStream = std::numeric_limits<std::uint64_t>::max();

inline std::optional<BranchErrorVector> fixed_branch_errors(const ScenarioConfig& s) {
    if (s.error_redraw != ErrorRedraw::fixed || s.impairments.is_zero()) return std::nullopt;
    RngStream stream = derive_stream(s.seed, kFixedErrorStream);
    return sample_branch_errors(s.antennas, s.impairments, stream);
}

/// The true channel and the perturbed copy the precoder is built from.
struct RealizationDraw {
    ChannelMatrix true_channel;
    ChannelMatrix precoder_channel;
};

inline RealizationDraw draw_realization(const ScenarioConfig& s, std::uint64_t r,
                                        const std::optional<BranchErrorVector>& fixed_errors = std::nullopt) {
    RngStream stream = derive_stream(s.seed, r);
    ChannelMatrix h = s.model == ChannelModel::iid ? iid_rayleigh(s.antennas, s.users, stream)
                                                   : los_channel(s.antennas, s.users, s.los, stream);
    if (s.impairments.is_zero()) return {h, h};
    if (fixed_errors) return {h, apply_impairments(h, *fixed_errors)};
    const BranchErrorVector eps = sample_branch_errors(s.antennas, s.impairments, stream);
    ChannelMatrix perturbed = apply_impairments(h, eps);
    return {std::move(h), std::move(perturbed)};
}

/// Precoder used by the engine. Numerically singular ZF realizations fall back to diagonal
/// loading rather than aborting the run; regularized (if given) reports when that happened.
inline PrecodingMatrix build_precoder(const ScenarioConfig& s, const ChannelMatrix& precoder_channel,
                                      bool* regularized = nullptr) {
    if (regularized) *regularized = false;
    switch (s.precoder) {
        case Precoder::mf:
            return mf_precoder(precoder_channel, s.mf_norm == MfNormalization::Mode::exact
                                                     ? MfNormalization::exact()
                                                     : MfNormalization::expected(s.impairments.sigma_a_lin()));
        case Precoder::zf_exact: return zf_precoder_exact(precoder_channel, SingularGram::load_diagonal, regularized);
        case Precoder::zf_scaled: return zf_precoder_scaled(precoder_channel, SingularGram::load_diagonal, regularized);
    }
    throw ArgumentError("unknown precoder");
}

namespace detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct RealizationOutcome {
    std::vector<double> rate;
    std::vector<double> signal;
    std::vector<double> interference;
    bool regularized = false;
};

template <typename Fn>
void parallel_for(std::uint64_t begin, std::uint64_t end, unsigned threads, Fn&& fn) {
    const std::uint64_t count = end - begin;
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
    if (workers <= 1) {
        for (std::uint64_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{begin};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::uint64_t i = next.fetch_add(1); i < end; i = next.fetch_add(1)) fn(i);
        });
    }
}

}  // namespace detail

/// Runs every realization of the scenario and returns rate and SINR estimates.
inline RateReport estimate_rates(const ScenarioConfig& s, const ExecutionOptions& options = {}) {
    s.validate();
    const std::size_t users = s.users;
    const double power = tx_power(s.budget());
    const double n0 = s.noise_power;
    const unsigned threads = resolve_thread_count(options.threads);
    const std::uint64_t block = std::max<std::uint64_t>(1, options.block_size);
    const std::optional<BranchErrorVector> fixed = fixed_branch_errors(s);

    std::vector<detail::CompensatedSum> rate_sum(users), signal_sum(users), interference_sum(users);
    // Welford over per-realization sum rates, in realization order.
    double mean = 0.0, m2 = 0.0;
    std::uint64_t seen = 0;
    std::uint64_t regularized = 0;

    std::vector<detail::RealizationOutcome> slots;
    for (std::uint64_t start = 0; start < s.realizations; start += block) {
        const std::uint64_t stop = std::min(s.realizations, start + block);
        slots.assign(stop - start, {});
        std::mutex failure_mutex;
        std::optional<std::uint64_t> failed_at;
        std::string failure;

        detail::parallel_for(start, stop, threads, [&](std::uint64_t r) {
            try {
                const RealizationDraw draw = draw_realization(s, r, fixed);
                auto& slot = slots[r - start];
                const PrecodingMatrix w = build_precoder(s, draw.precoder_channel, &slot.regularized);
                LinkPowers lp = link_powers(draw.true_channel, w);
                slot.rate.resize(users);
                for (std::size_t k = 0; k < users; ++k) {
                    const double gamma = power * lp.signal[k] / (power * lp.interference[k] + n0);
                    slot.rate[k] = std::log2(1.0 + gamma);
                }
                slot.signal = std::move(lp.signal);
                slot.interference = std::move(lp.interference);
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                if (!failed_at || r < *failed_at) {
                    failed_at = r;
                    failure = e.what();
                }
            }
        });
        if (failed_at) throw SimulationError(*failed_at, failure);

        for (const auto& slot : slots) {
            double realization_sum = 0.0;
            for (std::size_t k = 0; k < users; ++k) {
                rate_sum[k].add(slot.rate[k]);
                signal_sum[k].add(slot.signal[k]);
                interference_sum[k].add(slot.interference[k]);
                realization_sum += slot.rate[k];
            }
            ++seen;
            regularized += slot.regularized ? 1 : 0;
            const double delta = realization_sum - mean;
            mean += delta / static_cast<double>(seen);
            m2 += delta * (realization_sum - mean);
        }
    }

    RateReport report;
    report.realizations = s.realizations;
    report.regularized_realizations = regularized;
    const double n = static_cast<double>(s.realizations);
    report.per_ue_rate.resize(users);
    report.per_ue_sinr.resize(users);
    for (std::size_t k = 0; k < users; ++k) {
        report.per_ue_rate[k] = rate_sum[k].value() / n;
        report.sum_rate += report.per_ue_rate[k];
        const double es = signal_sum[k].value() / n;
        const double ei = interference_sum[k].value() / n;
        report.per_ue_sinr[k] = power * es / (power * ei + n0);
        report.mean_sinr += report.per_ue_sinr[k];
    }
    report.mean_sinr /= static_cast<double>(users);
    // A single realization has no spread estimate; report zero rather than NaN.
    report.sum_rate_stderr = s.realizations > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    return report;
}

/// Ratio-of-means SINR per UE, the quantity the closed-form approximations predict.
inline std::vector<double> estimate_expected_sinr(const ScenarioConfig& s, const ExecutionOptions& options = {}) {
    return estimate_rates(s, options).per_ue_sinr;
}

}  // namespace mimo_lab
