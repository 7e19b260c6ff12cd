#pragma once

// Flat key=value experiment documents.
//
//   # Fig. 1 style sweep
//   M = 100
//   K = 10
//   snr_t_db = 10
//   model = iid
//   precoder = mf
//   realizations = 10000
//   seed = 1
//   sweep = M
//   values = 20:20:200, 500
//
// One key per line, '#' starts a comment. `values` items are numbers or inclusive
// start:step:stop ranges.

#include <mimo_lab/engine.hpp>
#include <mimo_lab/errors.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace mimo_lab {

enum class SweepAxis { antennas, users, snr_t_db, sigma_a_db, sigma_phi_deg };

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::antennas: return "M";
        case SweepAxis::users: return "K";
        case SweepAxis::snr_t_db: return "snr_t_db";
        case SweepAxis::sigma_a_db: return "sigma_a_db";
        case SweepAxis::sigma_phi_deg: return "sigma_phi_deg";
    }
    return "?";
}

struct SweepSpec {
    ScenarioConfig base{};
    std::optional<SweepAxis> axis;
    std::vector<double> values;
    bool emit_analytic = true;
    bool emit_mc = true;

    /// Value of the swept parameter for scenario i (or the base value when not sweeping).
    double axis_value(std::size_t i) const;

    /// One scenario per axis value, in axis order.
    std::vector<ScenarioConfig> scenarios() const;

    bool operator==(const SweepSpec&) const = default;
};

inline ScenarioConfig with_axis_value(ScenarioConfig s, SweepAxis axis, double v) {
    switch (axis) {
        case SweepAxis::antennas: s.antennas = static_cast<std::size_t>(v); break;
        case SweepAxis::users: s.users = static_cast<std::size_t>(v); break;
        case SweepAxis::snr_t_db: s.snr_t_db = v; break;
        case SweepAxis::sigma_a_db:
            s.impairments = ImpairmentConfig::from_db_deg(v, s.impairments.sigma_phi_deg());
            break;
        case SweepAxis::sigma_phi_deg:
            s.impairments = ImpairmentConfig::from_db_deg(s.impairments.sigma_a_db(), v);
            break;
    }
    return s;
}

inline double SweepSpec::axis_value(std::size_t i) const {
    if (axis) return values.at(i);
    return 0.0;
}

inline std::vector<ScenarioConfig> SweepSpec::scenarios() const {
    if (!axis) return {base};
    std::vector<ScenarioConfig> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(with_axis_value(base, *axis, v));
    return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    std::size_t line;
};

inline double parse_double(const std::string& key, const Entry& e, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ParseError(key, e.line, "expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

inline std::uint64_t parse_uint(const std::string& key, const Entry& e) {
    const std::string_view text = e.value;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(key, e.line, "expected a non-negative integer, got '" + e.value + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& key, const Entry& e) {
    const std::string& v = e.value;
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ParseError(key, e.line, "expected a boolean, got '" + v + "'");
}

template <typename Enum>
Enum parse_choice(const std::string& key, const Entry& e, std::initializer_list<std::pair<const char*, Enum>> options) {
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (e.value == name) return value;
        allowed += allowed.empty() ? name : std::string("|") + name;
    }
    throw ParseError(key, e.line, "expected one of " + allowed + ", got '" + e.value + "'");
}

inline std::vector<double> parse_values(const std::string& key, const Entry& e) {
    std::vector<double> out;
    std::string_view rest = e.value;
    while (true) {
        const auto comma = rest.find(',');
        const std::string_view item = trim(rest.substr(0, comma));
        if (item.empty()) throw ParseError(key, e.line, "empty list item");
        const auto c1 = item.find(':');
        if (c1 == std::string_view::npos) {
            out.push_back(parse_double(key, e, item));
        } else {
            const auto c2 = item.find(':', c1 + 1);
            if (c2 == std::string_view::npos) throw ParseError(key, e.line, "range must be start:step:stop");
            const double start = parse_double(key, e, item.substr(0, c1));
            const double step = parse_double(key, e, item.substr(c1 + 1, c2 - c1 - 1));
            const double stop = parse_double(key, e, item.substr(c2 + 1));
            if (!(step > 0.0) || stop < start) throw ParseError(key, e.line, "range needs step > 0 and stop >= start");
            const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
            if (count > 100000) throw ParseError(key, e.line, "range expands to too many values");
            for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
        }
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

inline std::string format_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Parses and fully validates a config document. Unknown or repeated keys are errors.
inline SweepSpec parse_config(std::string_view text) {
    static const std::vector<std::string> known = {
        "M", "K", "snr_t_db", "n0", "model", "precoder", "sigma_a_db", "sigma_phi_deg", "realizations", "seed",
        "sweep", "values", "emit", "los_spacing_wl", "los_theta3db_deg", "los_am_db", "los_normalize",
        "error_redraw"};

    std::map<std::string, detail::Entry> entries;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("", line_no, "expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (std::find(known.begin(), known.end(), key) == known.end()) throw ParseError(key, line_no, "unknown key");
        if (value.empty()) throw ParseError(key, line_no, "missing value");
        if (entries.contains(key)) throw ParseError(key, line_no, "duplicate key");
        entries.emplace(key, detail::Entry{value, line_no});
    }

    auto get = [&](const std::string& key) -> const detail::Entry* {
        const auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto require = [&](const std::string& key) -> const detail::Entry& {
        const detail::Entry* e = get(key);
        if (!e) throw ParseError(key, 0, "missing required key");
        return *e;
    };
    auto positive_count = [&](const std::string& key) {
        const detail::Entry& e = require(key);
        const std::uint64_t v = detail::parse_uint(key, e);
        if (v == 0) throw ParseError(key, e.line, "must be at least 1");
        return static_cast<std::size_t>(v);
    };

    SweepSpec spec;
    ScenarioConfig& s = spec.base;
    s.antennas = positive_count("M");
    s.users = positive_count("K");
    s.snr_t_db = detail::parse_double("snr_t_db", require("snr_t_db"), require("snr_t_db").value);
    if (const auto* e = get("n0")) {
        s.noise_power = detail::parse_double("n0", *e, e->value);
        if (!(s.noise_power > 0.0)) throw ParseError("n0", e->line, "must be positive");
    }
    s.model = detail::parse_choice<ChannelModel>("model", require("model"),
                                                 {{"iid", ChannelModel::iid}, {"los", ChannelModel::los}});
    s.precoder = detail::parse_choice<Precoder>(
        "precoder", require("precoder"),
        {{"mf", Precoder::mf}, {"zf_exact", Precoder::zf_exact}, {"zf_scaled", Precoder::zf_scaled}});

    double sigma_a_db = 0.0, sigma_phi_deg = 0.0;
    if (const auto* e = get("sigma_a_db")) {
        sigma_a_db = detail::parse_double("sigma_a_db", *e, e->value);
        if (sigma_a_db < 0.0) throw ParseError("sigma_a_db", e->line, "must be non-negative");
    }
    if (const auto* e = get("sigma_phi_deg")) {
        sigma_phi_deg = detail::parse_double("sigma_phi_deg", *e, e->value);
        if (sigma_phi_deg < 0.0) throw ParseError("sigma_phi_deg", e->line, "must be non-negative");
    }
    s.impairments = ImpairmentConfig::from_db_deg(sigma_a_db, sigma_phi_deg);
    if (const auto* e = get("error_redraw")) {
        s.error_redraw = detail::parse_choice<ErrorRedraw>(
            "error_redraw", *e, {{"per_realization", ErrorRedraw::per_realization}, {"fixed", ErrorRedraw::fixed}});
    }

    if (const auto* e = get("emit")) {
        const auto which = detail::parse_choice<int>("emit", *e, {{"analytic", 0}, {"mc", 1}, {"both", 2}});
        spec.emit_analytic = which != 1;
        spec.emit_mc = which != 0;
    }
    if (const auto* e = get("realizations")) {
        s.realizations = detail::parse_uint("realizations", *e);
        if (spec.emit_mc && s.realizations == 0) {
            throw ParseError("realizations", e->line, "must be at least 1 when Monte Carlo rows are emitted");
        }
    } else if (spec.emit_mc) {
        throw ParseError("realizations", 0, "missing required key");
    } else {
        s.realizations = 0;
    }
    if (const auto* e = get("seed")) s.seed = detail::parse_uint("seed", *e);

    if (const auto* e = get("los_spacing_wl")) s.los.spacing_wavelengths = detail::parse_double("los_spacing_wl", *e, e->value);
    if (const auto* e = get("los_theta3db_deg")) s.los.theta_3db_deg = detail::parse_double("los_theta3db_deg", *e, e->value);
    if (const auto* e = get("los_am_db")) s.los.front_to_back_db = detail::parse_double("los_am_db", *e, e->value);
    if (const auto* e = get("los_normalize")) s.los.normalize = detail::parse_bool("los_normalize", *e);
    try {
        s.los.validate();
    } catch (const ArgumentError& err) {
        throw ParseError("los_*", 0, err.what());
    }

    const detail::Entry* sweep = get("sweep");
    const detail::Entry* values = get("values");
    if (sweep && !values) throw ParseError("values", 0, "sweep given without values");
    if (values && !sweep) throw ParseError("sweep", 0, "values given without a sweep axis");
    if (sweep) {
        spec.axis = detail::parse_choice<SweepAxis>(
            "sweep", *sweep,
            {{"M", SweepAxis::antennas}, {"K", SweepAxis::users}, {"snr_t_db", SweepAxis::snr_t_db},
             {"sigma_a_db", SweepAxis::sigma_a_db}, {"sigma_phi_deg", SweepAxis::sigma_phi_deg}});
        spec.values = detail::parse_values("values", *values);
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            const double v = spec.values[i];
            if (i > 0 && !(v > spec.values[i - 1])) throw ParseError("values", values->line, "values must be strictly increasing");
            const bool integral = *spec.axis == SweepAxis::antennas || *spec.axis == SweepAxis::users;
            if (integral && (v < 1.0 || v != std::floor(v))) {
                throw ParseError("values", values->line, "M and K values must be positive integers");
            }
            if ((*spec.axis == SweepAxis::sigma_a_db || *spec.axis == SweepAxis::sigma_phi_deg) && v < 0.0) {
                throw ParseError("values", values->line, "error standard deviations must be non-negative");
            }
        }
    }

    // Every expanded scenario must be runnable.
    const auto scenarios = spec.scenarios();
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        ScenarioConfig check = scenarios[i];
        if (!spec.emit_mc) check.realizations = 1;
        try {
            check.validate();
        } catch (const std::exception& err) {
            const std::string key = spec.axis ? "values" : "M";
            const std::size_t line = spec.axis ? values->line : require("M").line;
            std::string where;
            if (spec.axis) where = std::string(to_string(*spec.axis)) + "=" + detail::format_exact(spec.values[i]) + ": ";
            throw ParseError(key, line, where + err.what());
        }
    }
    return spec;
}

/// Serializes a spec so that parse_config(emit_config(spec)) == spec.
inline std::string emit_config(const SweepSpec& spec) {
    const ScenarioConfig& s = spec.base;
    std::ostringstream out;
    out << "M = " << s.antennas << '\n'
        << "K = " << s.users << '\n'
        << "snr_t_db = " << detail::format_exact(s.snr_t_db) << '\n'
        << "n0 = " << detail::format_exact(s.noise_power) << '\n'
        << "model = " << to_string(s.model) << '\n'
        << "precoder = " << to_string(s.precoder) << '\n'
        << "sigma_a_db = " << detail::format_exact(s.impairments.sigma_a_db()) << '\n'
        << "sigma_phi_deg = " << detail::format_exact(s.impairments.sigma_phi_deg()) << '\n'
        << "error_redraw = " << to_string(s.error_redraw) << '\n'
        << "realizations = " << s.realizations << '\n'
        << "seed = " << s.seed << '\n'
        << "emit = " << (spec.emit_analytic && spec.emit_mc ? "both" : spec.emit_mc ? "mc" : "analytic") << '\n'
        << "los_spacing_wl = " << detail::format_exact(s.los.spacing_wavelengths) << '\n'
        << "los_theta3db_deg = " << detail::format_exact(s.los.theta_3db_deg) << '\n'
        << "los_am_db = " << detail::format_exact(s.los.front_to_back_db) << '\n'
        << "los_normalize = " << (s.los.normalize ? "true" : "false") << '\n';
    if (spec.axis) {
        out << "sweep = " << to_string(*spec.axis) << '\n' << "values = ";
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            out << (i ? ", " : "") << detail::format_exact(spec.values[i]);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace mimo_lab
