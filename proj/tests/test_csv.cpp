#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "growthdyn/csv.hpp"
#include "growthdyn/errors.hpp"
#include "growthdyn/synth.hpp"

using namespace growthdyn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("growthdyn_csv_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const std::string p = (path / name).string();
        std::ofstream out(p);
        out << content;
        return p;
    }
};

}  // namespace

TEST_CASE("well-formed long files join into observations") {
    TempDir dir;
    const auto em = dir.file("e.csv",
                             "region_id,year,emissions\n"
                             "A,2000,10\nA,2001,11\nA,2002,12\n"
                             "B,2000,20\nB,2001,21\nB,2002,22\n");
    const auto gd = dir.file("g.csv",
                             "region_id,year,gdp\n"
                             "A,2000,100\nA,2001,110\nA,2002,120\n"
                             "B,2000,200\nB,2001,210\nB,2002,220\n");
    const auto obs = csv::ingest(em, gd);
    REQUIRE(obs.size() == 6);
    CHECK(obs[0].region_id == "A");
    CHECK(obs[0].year == 2000);
    CHECK(obs[0].emissions == 10.0);
    CHECK(obs[0].gdp == 100.0);
    CHECK(obs[5].region_id == "B");
    CHECK(obs[5].year == 2002);
}

TEST_CASE("wide format is accepted") {
    TempDir dir;
    const auto em = dir.file("e.csv",
                             "region_id,2000,2001\n"
                             "A,10,11\nB,20,21\n");
    const auto gd = dir.file("g.csv",
                             "region_id,year,gdp\n"
                             "A,2000,100\nA,2001,110\nB,2000,200\nB,2001,210\n");
    const auto obs = csv::ingest(em, gd);
    REQUIRE(obs.size() == 4);
    CHECK(obs[1].emissions == 11.0);
    CHECK(obs[1].gdp == 110.0);
}

TEST_CASE("join failures name the missing region-year") {
    TempDir dir;
    const auto em = dir.file("e.csv",
                             "region_id,year,emissions\nA,2000,10\nA,2001,11\n");
    const auto gd = dir.file("g.csv", "region_id,year,gdp\nA,2000,100\n");
    try {
        csv::ingest(em, gd);
        FAIL("expected JoinError");
    } catch (const JoinError& e) {
        const std::string what = e.what();
        CHECK(what.find("A") != std::string::npos);
        CHECK(what.find("2001") != std::string::npos);
    }

    // The other direction too.
    const auto gd2 = dir.file("g2.csv",
                              "region_id,year,gdp\nA,2000,100\nA,2001,110\nB,2000,5\n");
    CHECK_THROWS_AS(csv::ingest(em, gd2), JoinError);
}

TEST_CASE("value and schema diagnostics carry file and line") {
    TempDir dir;
    SUBCASE("zero emissions") {
        const auto em = dir.file("e.csv", "region_id,year,emissions\nA,2000,0\n");
        try {
            csv::read_value_table(em, "emissions");
            FAIL("expected NonPositiveValue");
        } catch (const NonPositiveValue& e) {
            const std::string what = e.what();
            CHECK(what.find("e.csv:2") != std::string::npos);
        }
    }
    SUBCASE("bad header") {
        const auto em = dir.file("e.csv", "region,year,emissions\nA,2000,1\n");
        CHECK_THROWS_AS(csv::read_value_table(em, "emissions"), SchemaError);
        const auto em2 = dir.file("e2.csv", "region_id,year,gdp\nA,2000,1\n");
        CHECK_THROWS_AS(csv::read_value_table(em2, "emissions"), SchemaError);
    }
    SUBCASE("ragged row") {
        const auto em = dir.file("e.csv", "region_id,year,emissions\nA,2000\n");
        try {
            csv::read_value_table(em, "emissions");
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("unparseable year and value") {
        const auto em = dir.file("e.csv", "region_id,year,emissions\nA,20xx,1\n");
        CHECK_THROWS_AS(csv::read_value_table(em, "emissions"), ParseError);
        const auto em2 = dir.file("e2.csv", "region_id,year,emissions\nA,2000,abc\n");
        CHECK_THROWS_AS(csv::read_value_table(em2, "emissions"), ParseError);
    }
    SUBCASE("duplicate rows") {
        const auto em = dir.file("e.csv",
                                 "region_id,year,emissions\nA,2000,1\nA,2000,2\n");
        const auto gd = dir.file("g.csv",
                                 "region_id,year,gdp\nA,2000,1\n");
        CHECK_THROWS_AS(csv::ingest(em, gd), DuplicateRecord);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(csv::read_value_table((dir.path / "nope.csv").string(), "emissions"),
                        IoError);
    }
}

TEST_CASE("dev_class rides along from either input") {
    TempDir dir;
    const auto em = dir.file("e.csv",
                             "region_id,year,emissions,dev_class\n"
                             "A,2000,10,LDR\nB,2000,20,DER\n");
    const auto gd = dir.file("g.csv", "region_id,year,gdp\nA,2000,1\nB,2000,2\n");
    const auto obs = csv::ingest(em, gd);
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].dev_class == "LDR");
    CHECK(obs[1].dev_class == "DER");
}

TEST_CASE("generated panels round-trip through the ingest schema exactly") {
    synth::GeneratorSpec spec;
    spec.n_regions = 9;
    spec.n_years = 6;
    spec.seed = 77;
    const auto obs = synth::generate_panel(spec);

    TempDir dir;
    const auto em = (dir.path / "emissions.csv").string();
    const auto gd = (dir.path / "gdp.csv").string();
    csv::write_observations(obs, em, gd);
    const auto back = csv::ingest(em, gd);
    REQUIRE(back.size() == obs.size());
    // write_observations sorts by (region, year); the generator already
    // emits year-major but values must round-trip bit-exactly.
    for (const auto& o : obs) {
        bool found = false;
        for (const auto& b : back)
            if (b.region_id == o.region_id && b.year == o.year) {
                CHECK(b.emissions == o.emissions);
                CHECK(b.gdp == o.gdp);
                found = true;
                break;
            }
        CHECK(found);
    }
}

TEST_CASE("significant-digit formatting") {
    CHECK(csv::format_sig(0.0) == "0");
    CHECK(csv::format_sig(1.0) == "1");
    CHECK(csv::format_sig(-0.26600000001) == "-0.266");
    CHECK(csv::format_sig(123456789.0) == "1.23457e+08");
    CHECK(csv::format_sig(0.123456789, 3) == "0.123");
}
