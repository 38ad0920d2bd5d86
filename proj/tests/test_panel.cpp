#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "growthdyn/errors.hpp"
#include "growthdyn/panel.hpp"
#include "growthdyn/synth.hpp"

using namespace growthdyn;

namespace {

std::vector<RegionYearObservation> two_region_panel(
    const std::vector<std::pair<double, double>>& emissions_by_year, int first_year) {
    std::vector<RegionYearObservation> obs;
    int year = first_year;
    for (const auto& [ea, eb] : emissions_by_year) {
        obs.push_back({"A", year, ea, 1.0, ""});
        obs.push_back({"B", year, eb, 1.0, ""});
        ++year;
    }
    return obs;
}

}  // namespace

TEST_CASE("equal emissions give zero sizes and growth") {
    const auto panel =
        GrowthPanel::build(two_region_panel({{3.0, 3.0}, {7.0, 7.0}, {2.0, 2.0}}, 2000));
    for (int year = 2000; year <= 2002; ++year) {
        CHECK(panel.s(0, year) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(panel.s(1, year) == doctest::Approx(0.0).epsilon(1e-14));
    }
    for (int year = 2001; year <= 2002; ++year) {
        CHECK(panel.r(0, year) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(panel.r(1, year) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("hand-computed two-region example") {
    // Year 1: equal. Year 2: region A at e^2, region B at 1.
    const double e2 = std::exp(2.0);
    const auto panel = GrowthPanel::build(two_region_panel({{1.0, 1.0}, {e2, 1.0}}, 1990));
    CHECK(panel.s(0, 1991) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(panel.s(1, 1991) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(panel.r(0, 1991) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(panel.r(1, 1991) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("a common factor leaves sizes and growth unchanged") {
    const auto base = two_region_panel({{1.0, 2.0}, {3.0, 5.0}, {4.0, 9.0}}, 1990);
    auto scaled = base;
    for (auto& obs : scaled)
        if (obs.year == 1991) obs.emissions *= 1234.5;

    const auto p0 = GrowthPanel::build(base);
    const auto p1 = GrowthPanel::build(scaled);
    for (std::size_t i = 0; i < 2; ++i)
        for (int year = 1990; year <= 1992; ++year)
            CHECK(p0.s(i, year) == doctest::Approx(p1.s(i, year)).epsilon(1e-13));
}

TEST_CASE("single-region factor shifts sizes by the centered amount") {
    const auto base = two_region_panel({{1.0, 2.0}, {3.0, 5.0}, {4.0, 9.0}}, 1990);
    auto scaled = base;
    const double factor = 7.5;
    for (auto& obs : scaled)
        if (obs.region_id == "A") obs.emissions *= factor;

    const auto p0 = GrowthPanel::build(base);
    const auto p1 = GrowthPanel::build(scaled);
    const double lf = std::log(factor);
    const double n = 2.0;
    for (int year = 1990; year <= 1992; ++year) {
        CHECK(p1.s(0, year) - p0.s(0, year) ==
              doctest::Approx(lf * (1.0 - 1.0 / n)).epsilon(1e-12));
        CHECK(p1.s(1, year) - p0.s(1, year) == doctest::Approx(-lf / n).epsilon(1e-12));
    }
    // Growth of the untouched region is unchanged across interior years.
    for (int year = 1991; year <= 1992; ++year)
        CHECK(p1.r(1, year) == doctest::Approx(p0.r(1, year)).epsilon(1e-12));
}

TEST_CASE("input validation") {
    SUBCASE("unbalanced panel lists the missing region-years") {
        auto obs = two_region_panel({{1.0, 2.0}, {3.0, 5.0}}, 1990);
        obs.pop_back();  // drop B:1991
        try {
            GrowthPanel::build(obs);
            FAIL("expected UnbalancedPanel");
        } catch (const UnbalancedPanel& e) {
            CHECK(std::string(e.what()).find("B:1991") != std::string::npos);
        }
    }
    SUBCASE("non-positive values are rejected with the offending record") {
        auto obs = two_region_panel({{1.0, 2.0}, {3.0, 5.0}}, 1990);
        obs[2].emissions = 0.0;
        try {
            GrowthPanel::build(obs);
            FAIL("expected NonPositiveValue");
        } catch (const NonPositiveValue& e) {
            const std::string what = e.what();
            CHECK(what.find("A") != std::string::npos);
            CHECK(what.find("1991") != std::string::npos);
        }
        obs[2].emissions = 3.0;
        obs[3].gdp = -1.0;
        CHECK_THROWS_AS(GrowthPanel::build(obs), NonPositiveValue);
    }
    SUBCASE("duplicates are rejected") {
        auto obs = two_region_panel({{1.0, 2.0}, {3.0, 5.0}}, 1990);
        obs.push_back({"A", 1990, 2.0, 1.0, ""});
        CHECK_THROWS_AS(GrowthPanel::build(obs), DuplicateRecord);
    }
}

TEST_CASE("growth reconstructs the size difference exactly") {
    synth::GeneratorSpec spec;
    spec.n_regions = 40;
    spec.n_years = 12;
    spec.alpha = -0.01;
    spec.phi = 0.2;
    spec.beta = -0.1;
    spec.seed = 3;
    const auto panel = GrowthPanel::build(synth::generate_panel(spec));
    for (std::size_t i = 0; i < panel.n_regions(); ++i) {
        double acc = 0.0;
        for (int t = panel.first_year() + 1; t <= panel.last_year(); ++t)
            acc += panel.r(i, t);
        CHECK(acc == doctest::Approx(panel.s(i, panel.last_year()) -
                                     panel.s(i, panel.first_year()))
                         .epsilon(1e-12));
    }
}

TEST_CASE("region ordering does not change values") {
    auto obs = two_region_panel({{1.0, 2.0}, {3.0, 5.0}, {4.0, 9.0}}, 1990);
    auto reversed = obs;
    std::reverse(reversed.begin(), reversed.end());
    const auto p0 = GrowthPanel::build(obs);
    const auto p1 = GrowthPanel::build(reversed);
    REQUIRE(p0.regions() == p1.regions());
    for (std::size_t i = 0; i < p0.n_regions(); ++i)
        for (int year = 1990; year <= 1992; ++year) {
            CHECK(p0.s(i, year) == p1.s(i, year));
            CHECK(p0.y(i, year) == p1.y(i, year));
        }
}

TEST_CASE("cross-sectional means are zero every year") {
    synth::GeneratorSpec spec;
    spec.n_regions = 242;
    spec.n_years = 33;
    spec.alpha = -0.004;
    spec.phi = 0.266;
    spec.beta = -0.085;
    spec.seed = 8;
    const auto panel = GrowthPanel::build(synth::generate_panel(spec));
    for (int year = panel.first_year(); year <= panel.last_year(); ++year) {
        double mean_s = 0.0, mean_y = 0.0;
        for (std::size_t i = 0; i < panel.n_regions(); ++i) {
            mean_s += panel.s(i, year);
            mean_y += panel.y(i, year);
        }
        CHECK(std::fabs(mean_s / panel.n_regions()) < 1e-10);
        CHECK(std::fabs(mean_y / panel.n_regions()) < 1e-10);
    }
    for (int year = panel.first_year() + 1; year <= panel.last_year(); ++year) {
        double mean_r = 0.0, mean_g = 0.0;
        for (std::size_t i = 0; i < panel.n_regions(); ++i) {
            mean_r += panel.r(i, year);
            mean_g += panel.g(i, year);
        }
        CHECK(std::fabs(mean_r / panel.n_regions()) < 1e-10);
        CHECK(std::fabs(mean_g / panel.n_regions()) < 1e-10);
    }
}

TEST_CASE("restrict: slicing rules") {
    synth::GeneratorSpec spec;
    spec.n_regions = 10;
    spec.n_years = 33;
    spec.first_year = 1990;
    spec.seed = 4;
    const auto panel = GrowthPanel::build(synth::generate_panel(spec));

    SUBCASE("full range is the identity") {
        const auto slice = restrict(panel, {"full", 1990, 2022});
        CHECK(slice.growth_start_year() == 1991);
        CHECK(slice.n_growth_years() == 32);
        CHECK(slice.n_obs() == 320);
    }
    SUBCASE("a leading slice loses its first growth year") {
        const auto slice = restrict(panel, {"pre", 1990, 2004});
        CHECK(slice.growth_start_year() == 1991);
        CHECK(slice.n_growth_years() == 14);
    }
    SUBCASE("an interior slice reaches back to the prior year") {
        const auto slice = restrict(panel, {"ets3", 2013, 2020});
        CHECK(slice.growth_start_year() == 2013);
        CHECK(slice.n_growth_years() == 8);
        // r for 2013 is computed against 2012 values inside the parent.
        CHECK(panel.r(0, 2013) ==
              doctest::Approx(panel.s(0, 2013) - panel.s(0, 2012)).epsilon(1e-15));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(restrict(panel, {"bad", 2005, 2004}), EmptyPeriod);
        CHECK_THROWS_AS(restrict(panel, {"outside", 1980, 1995}), EmptyPeriod);
        CHECK_THROWS_AS(restrict(panel, {"outside", 2000, 2030}), EmptyPeriod);
    }
}

TEST_CASE("canonical period set") {
    const auto periods = canonical_periods();
    REQUIRE(periods.size() == 5);
    CHECK(periods[0].name == "full");
    CHECK(periods[0].start_year == 1990);
    CHECK(periods[0].end_year == 2022);
    CHECK(periods[1].name == "pre-ETS");
    CHECK(periods[1].end_year == 2004);
    CHECK(periods[2].start_year == 2005);
    CHECK(periods[2].end_year == 2007);
    CHECK(periods[3].start_year == 2008);
    CHECK(periods[3].end_year == 2012);
    CHECK(periods[4].start_year == 2013);
    CHECK(periods[4].end_year == 2020);
}
