#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "growthdyn/aep.hpp"
#include "growthdyn/errors.hpp"
#include "growthdyn/panel.hpp"
#include "growthdyn/synth.hpp"
#include "growthdyn/windows.hpp"
#include "oracles.hpp"

using namespace growthdyn;

namespace {

GrowthPanel stationary_panel(std::uint64_t seed, int n_regions = 100, int n_years = 33) {
    synth::GeneratorSpec spec;
    spec.n_regions = n_regions;
    spec.n_years = n_years;
    spec.alpha = -0.004;
    spec.phi = 0.25;
    spec.beta = -0.08;
    spec.residual.scale = 0.05;
    spec.seed = seed;
    return GrowthPanel::build(synth::generate_panel(spec));
}

WindowOptions fast_options() {
    WindowOptions options;
    options.compute_std_errors = false;
    options.fit_residual_distribution = false;
    return options;
}

}  // namespace

TEST_CASE("window grid arithmetic on a 1990-2022 panel") {
    const auto panel = stationary_panel(1, 20);
    const auto series = run_moving_windows(panel, 5, fast_options());
    REQUIRE(series.entries.size() == 28);
    CHECK(series.entries.front().start_year == 1990);
    CHECK(series.entries.front().end_year == 1994);
    CHECK(series.entries.back().start_year == 2017);
    CHECK(series.entries.back().end_year == 2021);
    CHECK(series.window_length == 5);
    CHECK(series.phase_markers == std::array<int, 4>{2005, 2008, 2013, 2021});
    for (const auto& w : series.entries) {
        CHECK(w.error.empty());
        REQUIRE(w.fit.has_value());
        CHECK(w.fit->converged);
    }
}

TEST_CASE("windows that cannot fit raise WindowTooLong") {
    const auto panel = stationary_panel(2, 10, 5);
    CHECK_THROWS_AS(run_moving_windows(panel, 5, fast_options()), WindowTooLong);
    CHECK_THROWS_AS(run_moving_windows(panel, 200, fast_options()), WindowTooLong);
    CHECK_NOTHROW(run_moving_windows(panel, 4, fast_options()));
}

TEST_CASE("each window equals a standalone fit on the same slice") {
    const auto panel = stationary_panel(3, 50, 10);
    WindowOptions options = fast_options();
    options.fit_residual_distribution = true;
    const auto series = run_moving_windows(panel, 5, options);
    REQUIRE(series.entries.size() == 5);
    for (const auto& w : series.entries) {
        REQUIRE(w.fit.has_value());
        const PanelSlice slice =
            restrict(panel, {w.fit->period.name, w.start_year, w.end_year});
        const auto standalone = fit_lad(slice, options.lad);
        CHECK(w.fit->alpha == standalone.alpha);
        CHECK(w.fit->phi == standalone.phi);
        CHECK(w.fit->beta == standalone.beta);
        CHECK(w.fit->objective == standalone.objective);

        // The residual distribution fit used exactly this window's
        // rescaled residuals.
        REQUIRE(w.residual_fit.has_value());
        CHECK(w.residual_fit->n == w.fit->residuals.size());
        double ll = 0.0;
        for (double eps : w.fit->residuals)
            ll += aep::log_pdf(eps, w.residual_fit->params);
        CHECK(w.residual_fit->log_likelihood == doctest::Approx(ll).epsilon(1e-10));
    }
}

TEST_CASE("window runs are repeatable") {
    const auto panel = stationary_panel(4, 40, 12);
    WindowOptions options;
    options.bootstrap_replicates = 100;
    options.fit_residual_distribution = false;
    options.seed = 99;
    const auto a = run_moving_windows(panel, 5, options);
    const auto b = run_moving_windows(panel, 5, options);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].fit->alpha == b.entries[i].fit->alpha);
        CHECK(a.entries[i].fit->std_errors == b.entries[i].fit->std_errors);
    }
}

TEST_CASE("stationary parameters show no trend across windows") {
    double mean_p = 0.0;
    const int seeds = 5;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto panel = stationary_panel(static_cast<std::uint64_t>(seed), 100, 33);
        const auto series = run_moving_windows(panel, 5, fast_options());
        std::vector<double> phis;
        for (const auto& w : series.entries) phis.push_back(w.fit->phi);
        mean_p += oracles::mann_kendall_p(phis);
    }
    CHECK(mean_p / seeds > 0.05);
}

TEST_CASE("a regime switch in phi is visible in the window series") {
    synth::GeneratorSpec spec;
    spec.n_regions = 242;
    spec.n_years = 33;
    spec.alpha = -0.004;
    spec.phi = 0.19;
    spec.phi_after = 0.36;
    spec.switch_year = 2006;  // year index 16
    spec.beta = -0.085;
    // Five-year windows carry ~1200 observations; this signal-to-noise
    // puts the per-window phi uncertainty near 0.01, well under the jump.
    spec.gdp.shock_scale = 0.05;
    spec.residual.scale = 0.03;
    spec.seed = 6;
    const auto panel = GrowthPanel::build(synth::generate_panel(spec));
    const auto series = run_moving_windows(panel, 5, fast_options());

    std::vector<double> pre, post, straddle;
    for (const auto& w : series.entries) {
        REQUIRE(w.fit.has_value());
        if (w.end_year < spec.switch_year) pre.push_back(w.fit->phi);
        else if (w.start_year >= spec.switch_year) post.push_back(w.fit->phi);
        else straddle.push_back(w.fit->phi);
    }
    CHECK(std::fabs(oracles::mean(pre) - 0.19) < 0.03);
    CHECK(std::fabs(oracles::mean(post) - 0.36) < 0.03);
    // The transition through the straddling windows is monotone up to
    // estimation noise.
    for (std::size_t i = 0; i + 1 < straddle.size(); ++i)
        CHECK(straddle[i + 1] > straddle[i] - 0.03);
}
