#include <fstream>
#include <sstream>

#include "doctest.h"
#include "putlab/config.hpp"
#include "putlab/report.hpp"

using namespace putlab;

TEST_CASE("empty config text yields the full default configuration") {
    const auto c = parse_config("");
    CHECK(c.market.spot == 50.0);
    CHECK(c.market.strike == 55.0);
    CHECK(c.market.rate == 0.05);
    CHECK(c.market.horizon == 1.0);
    REQUIRE(c.scenarios.size() == 3);
    CHECK(c.scenarios[0].label == "D");
    CHECK(c.scenarios[1].p_neutral == 0.6);
    REQUIRE(c.instances.size() == 3);
    CHECK(c.instances[2].up_move == 60.0);
    CHECK(c.replications == 100);
    CHECK(c.index_scheme.indices == std::vector<double>{0.333, 0.666, 0.999});
}

TEST_CASE("config overrides merge with defaults") {
    const auto c = parse_config("[simulation]\nreplications = 1000000\nseed = 7\n");
    CHECK(c.replications == 1000000);
    CHECK(c.seed == 7);
    CHECK(c.market.spot == 50.0);  // untouched defaults
    CHECK(c.scenarios.size() == 3);
}

TEST_CASE("config validation names the offending scenario") {
    const std::string text =
        "[[scenario]]\nname = \"bad\"\np_up = 0.5\np_neutral = 0.6\np_down = 0.1\n";
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("bad"), ValidationError);
}

TEST_CASE("config parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_config("[market]\nspot 50\n"), doctest::Contains("line 2"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("[market]\nspot = fifty\n"), doctest::Contains("line 2"),
                         ValidationError);
}

TEST_CASE("config round trip") {
    auto c = default_config();
    c.market.strike = 60.0;
    c.replications = 5000;
    c.seed = 987654321;
    c.price_source = "monte_carlo";
    c.index_scheme.indices = {0.111, 0.555, 0.999};
    c.out_dir = "results";
    c.format = "csv";
    CHECK(parse_config(write_config(c)) == c);
    CHECK(parse_config(write_config(default_config())) == default_config());
}

TEST_CASE("load_config reports missing files as I/O errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/putlab.toml"), IoError);
}

TEST_CASE("embedded dataset matches the shipped resource file") {
    std::ifstream in(std::string(PUTLAB_SOURCE_DIR) + "/data/paper_dataset.json");
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(nlohmann::json::parse(buf.str()) == nlohmann::json::parse(paper_dataset_json()));
    CHECK(paper_dataset().version == 1);
    CHECK(paper_dataset().a2_cells.size() == 9);
    CHECK_THROWS_AS(parse_paper_dataset("{not json"), IoError);
    CHECK_THROWS_AS(parse_paper_dataset("{}"), IoError);
}

TEST_CASE("figure_series sampling") {
    const QuadraticUtility q{24.777, -29.831, 9.1025};
    const std::vector<UtilityPoint> pts{{0.51, 0.333}, {0.75, 0.666}, {0.79, 0.999}};
    const auto s = figure_series(q, pts, 0.01);
    CHECK(s.fitted.size() == 29);
    CHECK(s.fitted.front().first == doctest::Approx(0.51).epsilon(1e-12));
    CHECK(s.fitted.back().first == doctest::Approx(0.79).epsilon(1e-12));
    for (std::size_t i = 1; i < s.fitted.size(); ++i)
        CHECK(s.fitted[i].first > s.fitted[i - 1].first);
    for (const auto& [x, u] : s.fitted)
        CHECK(u == doctest::Approx(evaluate_utility(q, x).u).epsilon(1e-12));

    const QuadraticUtility line{0.0, 1.0, 0.0};
    const auto ls = figure_series(line, {{0.0, 0.0}, {1.0, 1.0}}, 0.5);
    CHECK(ls.fitted.size() == 3);
    CHECK(ls.fitted[1].second == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(figure_series(q, {}, 0.01), ValidationError);
    CHECK_THROWS_AS(figure_series(q, pts, 0.0), ValidationError);
}

TEST_CASE("run_report with the paper-fixed source reproduces the D-scenario fit") {
    const auto bundle = run_report(default_config());
    REQUIRE(bundle.utilities.size() == 3);
    const auto& d = bundle.utilities[0];
    REQUIRE(d.fit.has_value());
    CHECK(d.fit->fit.a2 == doctest::Approx(24.777).epsilon(1e-2));
    CHECK(d.fit->fit.a1 == doctest::Approx(-29.831).epsilon(1e-2));
    CHECK(d.fit->fit.a0 == doctest::Approx(9.1025).epsilon(1e-2));
    CHECK(*d.fit->analysis.vertex_x == doctest::Approx(0.60199).epsilon(1e-4));

    // every configured cell appears exactly once
    CHECK(bundle.json["cells"].size() == 9);
    CHECK(bundle.json["schema"] == 1);
    CHECK(bundle.json["discrepancies"].size() > 0);
    CHECK(bundle.json["consistency"].size() == 9);
}

TEST_CASE("run_report with the analytic source yields a diagnostic, not a curve") {
    auto c = default_config();
    c.price_source = "analytic";
    const auto bundle = run_report(c);
    for (const auto& su : bundle.utilities) {
        CHECK_FALSE(su.fit.has_value());
        CHECK(su.diagnostic == "duplicate x");
    }
    CHECK(bundle.json["discrepancies"].empty());
}

TEST_CASE("run_report with a single cell marks the utility section insufficient") {
    auto c = default_config();
    c.scenarios = {c.scenarios[0]};
    c.instances = {c.instances[0]};
    c.index_scheme.indices = {0.999};
    const auto bundle = run_report(c);
    REQUIRE(bundle.utilities.size() == 1);
    CHECK(bundle.utilities[0].diagnostic == "insufficient points");
    CHECK(bundle.json["cells"].size() == 1);
}

TEST_CASE("report JSON is byte-deterministic across worker counts") {
    auto c = default_config();
    c.price_source = "monte_carlo";
    c.replications = 20000;
    c.seed = 11;
    const auto a = run_report(c, 1);
    const auto b = run_report(c, 4);
    CHECK(a.json.dump(2) == b.json.dump(2));
}

TEST_CASE("equity table CSV layout") {
    const ScenarioSpec down{"D", 0.1, 0.3, 0.6};
    const auto t = equity_table_a1(down, MoveInstance{15.0, 5.0, 1});
    const auto csv = equity_table_csv(t);
    CHECK(csv.find("move,probability,net_change,contribution\n") == 0);
    CHECK(csv.find("up,0.100000,15.00,1.50") != std::string::npos);
    CHECK(csv.find("TOTAL,,,-1.50") != std::string::npos);

    const QuadraticUtility q{0.0, 1.0, 0.0};
    const auto s = figure_series(q, {{0.0, 0.0}, {1.0, 1.0}}, 0.5);
    CHECK(figure_csv(s).find("x,u_fitted\n") == 0);
    CHECK(points_csv(s).find("x,u_observed\n") == 0);
}
