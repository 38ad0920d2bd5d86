#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "growthdyn/convergence.hpp"
#include "growthdyn/csv.hpp"
#include "growthdyn/errors.hpp"
#include "growthdyn/panel.hpp"
#include "growthdyn/run.hpp"
#include "growthdyn/synth.hpp"

using namespace growthdyn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("growthdyn_run_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

synth::GeneratorSpec small_spec() {
    synth::GeneratorSpec spec;
    spec.n_regions = 30;
    spec.n_years = 12;
    spec.first_year = 1990;
    spec.alpha = -0.01;
    spec.phi = 0.25;
    spec.beta = -0.1;
    spec.residual.scale = 0.05;
    spec.seed = 4242;
    return spec;
}

RunConfig small_config(const TempDir& dir, const std::string& out_name) {
    auto obs = synth::generate_panel(small_spec());
    for (std::size_t i = 0; i < obs.size(); ++i)
        obs[i].dev_class = (i % 3 == 0) ? "LDR" : "DER";
    const auto em = (dir.path / "emissions.csv").string();
    const auto gd = (dir.path / "gdp.csv").string();
    csv::write_observations(obs, em, gd);

    RunConfig config;
    config.emissions_path = em;
    config.gdp_path = gd;
    config.out_dir = (dir.path / out_name).string();
    config.periods = {{"full", 1990, 2001}, {"late", 1996, 2001}};
    config.average_period_a = "full";
    config.average_period_b = "late";
    config.window_length = 5;
    config.n_bins = 10;
    config.bootstrap_replicates = 100;
    config.window_bootstrap_replicates = 100;
    config.aep_bootstrap_replicates = 100;
    config.seed = 42;
    return config;
}

std::string slurp(const fs::path& p) { return csv::read_file(p.string()); }

}  // namespace

TEST_CASE("run writes the advertised outputs and matches direct calls") {
    TempDir dir;
    const RunConfig config = small_config(dir, "out");
    const RunReport report = run(config);

    const std::set<std::string> outputs(report.outputs.begin(), report.outputs.end());
    for (const char* name :
         {"aep_emissions_full.csv", "aep_gdp_full.csv", "aep_emissions_late.csv",
          "aep_gdp_late.csv", "convergence_full.csv", "convergence_late.csv",
          "residuals_full.csv", "residuals_late.csv", "scaling_emissions_full.csv",
          "scaling_gdp_full.csv", "scaling_fits.csv", "windows.csv",
          "period_averages.csv", "tables.txt", "manifest.json"}) {
        CHECK(outputs.count(name) == 1);
        CHECK(fs::exists(fs::path(config.out_dir) / name));
    }
    CHECK(!fs::exists(fs::path(config.out_dir) / ".growthdyn.lock"));

    // Report numbers equal direct library-call results at output precision.
    const auto panel =
        GrowthPanel::build(csv::ingest(config.emissions_path, config.gdp_path));
    const auto fit = fit_lad(restrict(panel, {"full", 1990, 2001}));
    const std::string convergence = slurp(fs::path(config.out_dir) / "convergence_full.csv");
    CHECK(convergence.find("alpha," + csv::format_sig(fit.alpha) + ",") !=
          std::string::npos);
    CHECK(convergence.find("phi," + csv::format_sig(fit.phi) + ",") != std::string::npos);
    CHECK(convergence.find("beta," + csv::format_sig(fit.beta) + ",") !=
          std::string::npos);

    // dev_class passthrough lands in the averages table.
    const std::string averages = slurp(fs::path(config.out_dir) / "period_averages.csv");
    CHECK(averages.find("LDR") != std::string::npos);
    CHECK(averages.find("DER") != std::string::npos);

    // The window grid: 1990..2001 with length 5 ends one year short.
    const std::string windows = slurp(fs::path(config.out_dir) / "windows.csv");
    CHECK(windows.find("1990,1994") != std::string::npos);
    CHECK(windows.find("1996,2000") != std::string::npos);
    CHECK(windows.find("1997,2001") == std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    TempDir dir;
    RunConfig config = small_config(dir, "out_a");
    run(config);
    RunConfig config_b = config;
    config_b.out_dir = (dir.path / "out_b").string();
    run(config_b);

    for (const auto& entry : fs::directory_iterator(config.out_dir)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue;  // carries wall time
        CAPTURE(name);
        CHECK(slurp(entry.path()) == slurp(fs::path(config_b.out_dir) / name));
    }
}

TEST_CASE("window length beyond the panel span surfaces WindowTooLong") {
    TempDir dir;
    RunConfig config = small_config(dir, "out");
    config.window_length = 15;
    CHECK_THROWS_AS(run(config), WindowTooLong);
}

TEST_CASE("config validation") {
    TempDir dir;
    RunConfig config = small_config(dir, "out");

    SUBCASE("seed required") {
        config.seed.reset();
        CHECK_THROWS_AS(run(config), InvalidConfig);
    }
    SUBCASE("missing inputs") {
        config.emissions_path = (dir.path / "nope.csv").string();
        CHECK_THROWS_AS(run(config), InvalidConfig);
    }
    SUBCASE("period outside the data range") {
        config.periods = {{"bad", 1980, 2001}};
        CHECK_THROWS_AS(run(config), InvalidConfig);
    }
    SUBCASE("bootstrap floor") {
        config.bootstrap_replicates = 50;
        CHECK_THROWS_AS(run(config), InvalidConfig);
    }
    SUBCASE("locked output directory") {
        fs::create_directories(config.out_dir);
        std::ofstream(fs::path(config.out_dir) / ".growthdyn.lock") << "";
        CHECK_THROWS_AS(run(config), InvalidConfig);
    }
}

TEST_CASE("config file parsing and period specs") {
    TempDir dir;
    const auto path = (dir.path / "run.conf").string();
    std::ofstream(path) << "# comment\n"
                           "input_emissions = e.csv\n"
                           "input_gdp = g.csv\n"
                           "periods = full:1990-2022,pre-ETS:1990-2004\n"
                           "window_length = 7\n"
                           "bins = 15\n"
                           "bootstrap = 300\n"
                           "window_bootstrap = 150\n"
                           "aep_bootstrap = 120\n"
                           "seed = 99\n"
                           "out = results\n"
                           "average_periods = full,pre-ETS\n";
    const RunConfig config = load_config_file(path);
    CHECK(config.emissions_path == "e.csv");
    CHECK(config.gdp_path == "g.csv");
    REQUIRE(config.periods.size() == 2);
    CHECK(config.periods[1].name == "pre-ETS");
    CHECK(config.periods[1].start_year == 1990);
    CHECK(config.periods[1].end_year == 2004);
    CHECK(config.window_length == 7);
    CHECK(config.n_bins == 15);
    CHECK(config.bootstrap_replicates == 300);
    CHECK(config.window_bootstrap_replicates == 150);
    CHECK(config.aep_bootstrap_replicates == 120);
    REQUIRE(config.seed.has_value());
    CHECK(*config.seed == 99);
    CHECK(config.out_dir == "results");
    CHECK(config.average_period_a == "full");
    CHECK(config.average_period_b == "pre-ETS");

    std::ofstream(path) << "unknown_key = 1\n";
    CHECK_THROWS_AS(load_config_file(path), InvalidConfig);
    std::ofstream(path) << "window_length = abc\n";
    CHECK_THROWS_AS(load_config_file(path), InvalidConfig);

    CHECK_THROWS_AS(parse_periods_spec("oops"), InvalidConfig);
    CHECK_THROWS_AS(parse_periods_spec(""), InvalidConfig);
    const auto periods = parse_periods_spec("a:2000-2005,b:2006-2010");
    REQUIRE(periods.size() == 2);
    CHECK(periods[0].name == "a");
    CHECK(periods[1].end_year == 2010);
}
