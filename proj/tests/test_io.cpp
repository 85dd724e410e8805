#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "indist/io.hpp"

using namespace indist;
using namespace indist::io;

TEST_CASE("counts CSV round trip") {
    stats::CountsRecord counts;
    counts.entries[ModeOccupation({1, 1, 0, 0, 1, 1})] = 4200;
    counts.entries[ModeOccupation({2, 0, 0, 0, 1, 1})] = 1234;
    counts.entries[ModeOccupation({0, 2, 0, 0, 2, 0})] = 7;
    const std::string text = write_counts_csv(counts);
    std::istringstream in(text);
    const stats::CountsRecord back = read_counts_csv(in);
    CHECK(back.entries == counts.entries);
    CHECK(back.total() == 5441);
}

TEST_CASE("counts CSV rejects malformed input") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_counts_csv(empty), ParseError);

    std::istringstream bad_header("a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(read_counts_csv(bad_header), ParseError);

    std::istringstream bad_row("n1,n2,n3,n4,n5,n6,count\n1,1,0,0\n");
    CHECK_THROWS_AS(read_counts_csv(bad_row), ParseError);

    std::istringstream negative("n1,n2,n3,n4,n5,n6,count\n1,1,0,0,1,1,-4\n");
    CHECK_THROWS_AS(read_counts_csv(negative), ParseError);

    std::istringstream no_rows("n1,n2,n3,n4,n5,n6,count\n");
    CHECK_THROWS_AS(read_counts_csv(no_rows), ParseError);
}

TEST_CASE("distribution CSV round trip") {
    OutputDistribution dist;
    dist.add(ModeOccupation({1, 1, 0, 0, 1, 1}), 0.125);
    dist.add(ModeOccupation({2, 0, 0, 0, 1, 1}), 0.875);
    const std::string text = write_distribution_csv(dist);
    std::istringstream in(text);
    const OutputDistribution back = read_distribution_csv(in);
    REQUIRE(back.p.size() == 2);
    for (const auto& [occ, p] : dist.p)
        CHECK(back.probability(occ) == doctest::Approx(p).epsilon(1e-11));
}

TEST_CASE("dip CSV") {
    std::istringstream in("dx,count,sigma\n-0.2,100,10\n0.0,20,4.5\n0.2,101,10\n");
    const auto points = read_dip_csv(in);
    REQUIRE(points.size() == 3);
    CHECK(points[1].dx == doctest::Approx(0.0));
    CHECK(points[1].count == doctest::Approx(20));
    CHECK(points[1].sigma == doctest::Approx(4.5));

    std::istringstream no_sigma("dx,count\n-0.2,100\n0.0,20\n");
    CHECK(read_dip_csv(no_sigma).size() == 2);

    std::istringstream bad("delay,counts\n1,2\n");
    CHECK_THROWS_AS(read_dip_csv(bad), ParseError);
}

TEST_CASE("config round trip") {
    const ExperimentConfig cfg = default_config();
    const std::string text = write_config(cfg);
    std::istringstream in(text);
    const ExperimentConfig back = read_config(in);
    CHECK(back.interferometer.mode_count == cfg.interferometer.mode_count);
    REQUIRE(back.interferometer.layer2.size() == 3);
    CHECK(back.interferometer.layer2[0].reflectivity ==
          doctest::Approx(cfg.interferometer.layer2[0].reflectivity));
    CHECK(back.interferometer.mode_loss == cfg.interferometer.mode_loss);
    CHECK(back.source.injected_modes == cfg.source.injected_modes);
    CHECK(back.source.g == doctest::Approx(cfg.source.g));
    CHECK(back.detection.mmfbs_reflectivity == cfg.detection.mmfbs_reflectivity);
    CHECK(back.visibilities[0] == doctest::Approx(0.944));
    CHECK(back.visibilities[1] == doctest::Approx(0.835));
    CHECK(back.visibilities[2] == doctest::Approx(0.915));
}

TEST_CASE("config validation") {
    std::istringstream not_json("not json at all {");
    CHECK_THROWS_AS(read_config(not_json), ParseError);

    std::istringstream wrong_version(R"({"schema_version": 2})");
    CHECK_THROWS_AS(read_config(wrong_version), ParseError);

    // invariants are enforced on load
    auto corrupted = [](auto mutate) {
        ExperimentConfig cfg = default_config();
        mutate(cfg);
        std::istringstream in(write_config(cfg));
        return read_config(in);
    };
    CHECK_THROWS_AS(corrupted([](ExperimentConfig& c) { c.detection.eta_det = 1.5; }),
                    ParseError);
    CHECK_THROWS_AS(
        corrupted([](ExperimentConfig& c) { c.detection.mmfbs_reflectivity.pop_back(); }),
        ParseError);
    CHECK_THROWS_AS(corrupted([](ExperimentConfig& c) { c.visibilities[1] = -0.2; }),
                    ParseError);
    CHECK_THROWS_AS(corrupted([](ExperimentConfig& c) {
                        c.delays = {{0.0, 0.0, 0.0}};
                        c.widths = {{1.0, 0.0, 1.0}};
                    }),
                    ParseError);
    CHECK_THROWS_AS(
        corrupted([](ExperimentConfig& c) { c.interferometer.layer1[0].reflectivity = 2.0; }),
        Error);

    // modes are 1-based in the file
    ExperimentConfig cfg = default_config();
    const std::string text = write_config(cfg);
    CHECK(text.find("\"schema_version\": 1") != std::string::npos);
    CHECK(text.find("\"A\": 1") != std::string::npos);
}
