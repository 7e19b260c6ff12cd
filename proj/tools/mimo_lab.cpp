// mimo_lab: analytic and Monte Carlo massive MIMO downlink experiments.
//
//   mimo_lab run scenario.cfg [-s key=value ...] [-o out.csv]
//   mimo_lab sweep fig1.cfg [-s key=value ...] [-o out.csv]
//   mimo_lab rot --precoder mf --K 10 --snr-t-db 10 [--sigma-a-db 1 --sigma-phi-deg 20]
//   mimo_lab validate [--seed N]

#include <mimo_lab/mimo_lab.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string load_document(const std::string& path, const std::vector<std::string>& overrides) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read config file " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
        if (!text.empty() && text.back() != '\n') text += '\n';
    }
    // Overrides replace earlier assignments of the same key.
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw std::runtime_error("override '" + o + "' is not key=value");
        const std::string key = std::string(mimo_lab::detail::trim(std::string_view(o).substr(0, eq)));
        std::istringstream in(text);
        std::string kept;
        for (std::string line; std::getline(in, line);) {
            const auto leq = line.find('=');
            const auto hash = line.find('#');
            if (leq != std::string::npos && (hash == std::string::npos || leq < hash) &&
                mimo_lab::detail::trim(std::string_view(line).substr(0, leq)) == key) {
                kept += "# overridden: " + line + '\n';
                continue;
            }
            kept += line + '\n';
        }
        text = kept + o + '\n';
    }
    return text;
}

int execute(const mimo_lab::SweepSpec& spec, const std::string& out_path) {
    const mimo_lab::SweepResult result = mimo_lab::run_sweep(spec);
    const std::string csv = mimo_lab::to_csv(result.rows);
    if (out_path.empty()) std::cout << csv;
    else mimo_lab::write_file_atomic(out_path, csv);
    for (const auto& r : result.rows) {
        if (r.regularized_realizations > 0) {
            std::cerr << "note: M=" << r.scenario.antennas << " K=" << r.scenario.users << ": "
                      << r.regularized_realizations << " of " << r.realizations
                      << " realizations had a near-singular Gram matrix and used diagonal loading\n";
        }
    }
    for (const auto& f : result.failures) std::cerr << "failed: " << f.message << '\n';
    if (!result.ok()) {
        std::cerr << result.failures.size() << " scenario(s) failed\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Massive MIMO downlink SINR and sum-rate toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "Evaluate a single scenario");
    auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter sweep");
    for (auto* cmd : {run, sweep}) {
        cmd->add_option("config", config_path, "Config document (key = value lines)");
        cmd->add_option("-s,--set", overrides, "Override or add a key, e.g. -s M=200");
        cmd->add_option("-o,--out", out_path, "Write CSV here (atomic replace) instead of stdout");
    }

    std::string rot_precoder = "mf";
    std::size_t rot_users = 10;
    double rot_snr_db = 10.0, rot_sigma_a_db = 0.0, rot_sigma_phi_deg = 0.0;
    auto* rot = app.add_subcommand("rot", "Antennas needed to be within 3 dB of the interference-free SINR");
    rot->add_option("--precoder", rot_precoder, "mf or zf")->check(CLI::IsMember({"mf", "zf"}));
    rot->add_option("-K,--K", rot_users, "Co-scheduled UEs")->check(CLI::PositiveNumber);
    rot->add_option("--snr-t-db", rot_snr_db, "Target SNR in dB");
    rot->add_option("--sigma-a-db", rot_sigma_a_db, "Amplitude error std in dB (MF only)")->check(CLI::NonNegativeNumber);
    rot->add_option("--sigma-phi-deg", rot_sigma_phi_deg, "Phase error std in degrees (MF only)")
        ->check(CLI::NonNegativeNumber);

    std::uint64_t validate_seed = 2024;
    auto* validate = app.add_subcommand("validate", "Run the built-in statistical invariant suite");
    validate->add_option("--seed", validate_seed, "Root seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed() || sweep->parsed()) {
            const mimo_lab::SweepSpec spec = mimo_lab::parse_config(load_document(config_path, overrides));
            if (run->parsed() && spec.axis) {
                std::cerr << "error: 'run' takes a single scenario; use 'sweep' for documents with a sweep axis\n";
                return 2;
            }
            return execute(spec, out_path);
        }
        if (rot->parsed()) {
            const auto family = rot_precoder == "mf" ? mimo_lab::PrecoderFamily::mf : mimo_lab::PrecoderFamily::zf;
            const auto errors = mimo_lab::ImpairmentConfig::from_db_deg(rot_sigma_a_db, rot_sigma_phi_deg);
            std::cout << mimo_lab::rule_of_thumb(family, rot_users, rot_snr_db, errors) << '\n';
            return 0;
        }
        if (validate->parsed()) {
            int failed = 0;
            for (const auto& c : mimo_lab::run_validation_suite(validate_seed)) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " -- " << c.detail << '\n';
                failed += c.passed ? 0 : 1;
            }
            if (failed) std::cerr << failed << " check(s) failed\n";
            return failed ? 1 : 0;
        }
    } catch (const mimo_lab::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
