#pragma once

// Sweep execution and the CSV result table.

#include <mimo_lab/analytic.hpp>
#include <mimo_lab/config.hpp>
#include <mimo_lab/engine.hpp>
#include <mimo_lab/errors.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mimo_lab {

enum class ResultSource { analytic, mc };

inline const char* to_string(ResultSource s) { return s == ResultSource::analytic ? "analytic" : "mc"; }

struct ResultRow {
    ScenarioConfig scenario;
    double axis_value = 0.0;
    ResultSource source = ResultSource::analytic;
    double sum_rate = 0.0;
    std::optional<double> sum_rate_stderr;
    double mean_sinr = 0.0;
    std::uint64_t realizations = 0;
    /// Monte Carlo ZF realizations that used the diagonal-loading fallback.
    std::uint64_t regularized_realizations = 0;
};

struct SweepFailure {
    double axis_value = 0.0;
    std::string message;
};

struct SweepResult {
    std::vector<ResultRow> rows;
    std::vector<SweepFailure> failures;

    bool ok() const noexcept { return failures.empty(); }
};

/// Closed-form per-UE SINR for the scenario. Only IID Rayleigh has closed forms, and with
/// branch errors only for MF; everything else must go through Monte Carlo.
inline double analytic_sinr(const ScenarioConfig& s) {
    if (s.model != ChannelModel::iid) throw InfeasibleError("no closed-form SINR for the LoS model");
    const LinkBudget budget = s.budget();
    if (s.precoder == Precoder::mf) return sinr_mf_impaired(budget, s.impairments);
    if (!s.impairments.is_zero()) throw InfeasibleError("no closed-form SINR for ZF with branch errors");
    return sinr_zf(budget);
}

inline bool has_analytic_sinr(const ScenarioConfig& s) {
    return s.model == ChannelModel::iid && (s.precoder == Precoder::mf || s.impairments.is_zero());
}

/// Runs every scenario of the spec. A scenario failure is recorded and the sweep continues.
/// When both sources are requested, analytic rows are produced only where a closed form exists.
inline SweepResult run_sweep(const SweepSpec& spec, const ExecutionOptions& options = {}) {
    SweepResult result;
    const auto scenarios = spec.scenarios();
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const ScenarioConfig& s = scenarios[i];
        const double axis_value = spec.axis_value(i);
        try {
            if (spec.emit_analytic && (!spec.emit_mc || has_analytic_sinr(s))) {
                const double sinr = analytic_sinr(s);
                result.rows.push_back({s, axis_value, ResultSource::analytic, sum_rate_analytic(s.users, sinr),
                                       std::nullopt, sinr, 0});
            }
            if (spec.emit_mc) {
                const RateReport report = estimate_rates(s, options);
                result.rows.push_back({s, axis_value, ResultSource::mc, report.sum_rate, report.sum_rate_stderr,
                                       report.mean_sinr, report.realizations, report.regularized_realizations});
            }
        } catch (const std::exception& e) {
            std::string where = spec.axis ? std::string(to_string(*spec.axis)) + "=" +
                                                detail::format_exact(axis_value) + ": "
                                          : std::string();
            result.failures.push_back({axis_value, where + e.what()});
        }
    }
    std::stable_sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.axis_value != b.axis_value) return a.axis_value < b.axis_value;
        return a.source < b.source;
    });
    return result;
}

inline constexpr const char* kCsvHeader =
    "model,precoder,M,K,snr_t_db,sigma_a_db,sigma_phi_deg,realizations,source,sum_rate,sum_rate_stderr,"
    "mean_sinr_linear";

inline std::string format_g6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        const ScenarioConfig& s = r.scenario;
        out << to_string(s.model) << ',' << to_string(s.precoder) << ',' << s.antennas << ',' << s.users << ','
            << format_g6(s.snr_t_db) << ',' << format_g6(s.impairments.sigma_a_db()) << ','
            << format_g6(s.impairments.sigma_phi_deg()) << ',' << r.realizations << ',' << to_string(r.source)
            << ',' << format_g6(r.sum_rate) << ',' << (r.sum_rate_stderr ? format_g6(*r.sum_rate_stderr) : "")
            << ',' << format_g6(r.mean_sinr) << '\n';
    }
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    write_csv(out, rows);
    return out.str();
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// Antenna count for the 3 dB rule of thumb, from a dB target SNR.
inline std::size_t rule_of_thumb(PrecoderFamily precoder, std::size_t users, double snr_t_db,
                                 const ImpairmentConfig& impairments = {}) {
    return antennas_for_3db(precoder, users, db_to_linear(snr_t_db),
                            impairments.is_zero() ? std::nullopt : std::optional<ImpairmentConfig>(impairments));
}

}  // namespace mimo_lab
