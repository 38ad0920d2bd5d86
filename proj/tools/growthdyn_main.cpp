#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "growthdyn/csv.hpp"
#include "growthdyn/errors.hpp"
#include "growthdyn/run.hpp"
#include "growthdyn/synth.hpp"

namespace {

void write_error_manifest(const std::string& out_dir, const std::string& kind,
                          const nlohmann::json& detail) {
    if (out_dir.empty()) return;
    try {
        std::filesystem::create_directories(out_dir);
        nlohmann::json manifest;
        manifest["error"] = kind;
        manifest["detail"] = detail;
        growthdyn::csv::write_file_atomic(
            (std::filesystem::path(out_dir) / "errors.json").string(),
            manifest.dump(2) + "\n");
    } catch (const std::exception&) {
        // The diagnostic on stderr is the fallback.
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"growthdyn: fat-tailed growth-rate dynamics of regional emissions and GDP"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "Run the batch analysis pipeline");
    std::string config_path, emissions_path, gdp_path, out_dir, periods_spec, year_range;
    std::int64_t window_length = -1, n_bins = -1, bootstrap = -1, window_bootstrap = -1;
    std::optional<std::uint64_t> seed;
    run_cmd->add_option("--config", config_path, "key = value configuration file");
    run_cmd->add_option("--input-emissions", emissions_path, "emissions CSV (long or wide)");
    run_cmd->add_option("--input-gdp", gdp_path, "GDP CSV (long or wide)");
    run_cmd->add_option("--periods", periods_spec, "name:start-end[,...]");
    run_cmd->add_option("--year-range", year_range, "start-end restriction on the panel");
    run_cmd->add_option("--window-length", window_length, "moving window length in years");
    run_cmd->add_option("--bins", n_bins, "bins for the volatility-size scaling");
    run_cmd->add_option("--bootstrap", bootstrap, "bootstrap replicates per period");
    run_cmd->add_option("--window-bootstrap", window_bootstrap,
                        "bootstrap replicates per window");
    run_cmd->add_option("--seed", seed, "master seed (required)");
    run_cmd->add_option("--out", out_dir, "output directory");

    // ---- synth ----
    auto* synth_cmd =
        app.add_subcommand("synth", "Generate a synthetic panel in the ingest schema");
    growthdyn::synth::GeneratorSpec spec;
    std::string synth_emissions = "emissions.csv", synth_gdp = "gdp.csv";
    synth_cmd->add_option("--regions", spec.n_regions, "number of regions");
    synth_cmd->add_option("--years", spec.n_years, "number of years");
    synth_cmd->add_option("--first-year", spec.first_year, "first calendar year");
    synth_cmd->add_option("--alpha", spec.alpha, "convergence coefficient");
    synth_cmd->add_option("--phi", spec.phi, "GDP coupling coefficient");
    synth_cmd->add_option("--beta", spec.beta, "volatility scaling coefficient");
    synth_cmd->add_option("--residual-scale", spec.residual.scale,
                          "Laplace scale of the innovations");
    synth_cmd->add_option("--gdp-shock-scale", spec.gdp.shock_scale,
                          "Laplace scale of the GDP growth shocks");
    synth_cmd->add_option("--seed", spec.seed, "generator seed");
    synth_cmd->add_option("--out-emissions", synth_emissions, "emissions CSV path");
    synth_cmd->add_option("--out-gdp", synth_gdp, "GDP CSV path");

    CLI11_PARSE(app, argc, argv);

    std::string effective_out = out_dir;
    try {
        if (synth_cmd->parsed()) {
            const auto observations = growthdyn::synth::generate_panel(spec);
            growthdyn::csv::write_observations(observations, synth_emissions, synth_gdp);
            std::cout << "wrote " << observations.size() << " observations to "
                      << synth_emissions << " and " << synth_gdp << "\n";
            return 0;
        }

        growthdyn::RunConfig config;
        if (!config_path.empty()) config = growthdyn::load_config_file(config_path);
        if (!emissions_path.empty()) config.emissions_path = emissions_path;
        if (!gdp_path.empty()) config.gdp_path = gdp_path;
        if (!out_dir.empty()) config.out_dir = out_dir;
        effective_out = config.out_dir;
        if (!periods_spec.empty())
            config.periods = growthdyn::parse_periods_spec(periods_spec);
        if (!year_range.empty()) {
            const auto dash = year_range.find('-');
            if (dash == std::string::npos)
                throw growthdyn::InvalidConfig("--year-range expects start-end");
            config.year_range = {std::stoi(year_range.substr(0, dash)),
                                 std::stoi(year_range.substr(dash + 1))};
        }
        if (window_length > 0) config.window_length = static_cast<int>(window_length);
        if (n_bins > 0) config.n_bins = static_cast<std::size_t>(n_bins);
        if (bootstrap > 0) config.bootstrap_replicates = static_cast<int>(bootstrap);
        if (window_bootstrap > 0)
            config.window_bootstrap_replicates = static_cast<int>(window_bootstrap);
        if (seed) config.seed = seed;

        const growthdyn::RunReport report = growthdyn::run(config);
        for (const std::string& name : report.outputs)
            std::cout << "wrote " << name << "\n";
        if (!report.all_converged) {
            std::cerr << "estimation failures:\n";
            for (const std::string& f : report.failures) std::cerr << "  " << f << "\n";
            write_error_manifest(config.out_dir, "estimation_failures", report.failures);
            return 1;
        }
        return 0;
    } catch (const growthdyn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_manifest(effective_out, "run_error", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_manifest(effective_out, "internal_error", e.what());
        return 1;
    }
}
