#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cyclicbp/scenario.hpp"

using namespace cyclicbp;

namespace {

std::string scenario_path(const char* name) {
    return std::string(CYCLICBP_SCENARIO_DIR) + "/" + name;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool region_equal(const Region& a, const Region& b) {
    if (a.kind() != b.kind() || a.dim() != b.dim()) return false;
    switch (a.kind()) {
        case RegionKind::Interval:
        case RegionKind::Box:
            return a.lower() == b.lower() && a.upper() == b.upper();
        case RegionKind::Ball:
            return a.center() == b.center() && a.radius() == b.radius();
        case RegionKind::Cloud:
            return a.points() == b.points();
    }
    return false;
}

bool scenario_equal(const Scenario& a, const Scenario& b) {
    if (a.name != b.name || a.dimension != b.dimension) return false;
    if (a.subsets.size() != b.subsets.size()) return false;
    for (std::size_t i = 0; i < a.subsets.size(); ++i) {
        if (!region_equal(a.subsets[i], b.subsets[i])) return false;
    }
    if (a.map.kind != b.map.kind || a.constants != b.constants) return false;
    if (a.map.kind == MapKind::Table) {
        if (a.map.table.size() != b.map.table.size()) return false;
        if (a.map.table_match_tol != b.map.table_match_tol) return false;
        for (std::size_t i = 0; i < a.map.table.size(); ++i) {
            if (a.map.table[i].size() != b.map.table[i].size()) return false;
            for (std::size_t e = 0; e < a.map.table[i].size(); ++e) {
                if (a.map.table[i][e].from != b.map.table[i][e].from) return false;
                if (!region_equal(a.map.table[i][e].image, b.map.table[i][e].image)) return false;
            }
        }
    } else {
        if (a.map.pieces.size() != b.map.pieces.size()) return false;
        for (std::size_t i = 0; i < a.map.pieces.size(); ++i) {
            if (a.map.pieces[i].offset != b.map.pieces[i].offset) return false;
            if (a.map.pieces[i].anchor != b.map.pieces[i].anchor) return false;
            if (a.map.pieces[i].linear.data != b.map.pieces[i].linear.data) return false;
            if (a.map.pieces[i].radius != b.map.pieces[i].radius) return false;
        }
    }
    return a.order.kind == b.order.kind && a.order.axis == b.order.axis &&
           a.order.pairs == b.order.pairs && a.thresholds.d0 == b.thresholds.d0 &&
           a.thresholds.d0i == b.thresholds.d0i && a.strategy.kind == b.strategy.kind &&
           a.strategy.image_samples == b.strategy.image_samples && a.seeds == b.seeds &&
           a.seed_samples_per_subset == b.seed_samples_per_subset && a.tol == b.tol &&
           a.max_steps == b.max_steps && a.rng_seed == b.rng_seed &&
           a.checker_samples == b.checker_samples;
}

}  // namespace

TEST_CASE("parsing the shipped two-interval scenario") {
    Scenario s = load_scenario(scenario_path("two_interval.json"));
    CHECK(s.name == "two_interval");
    CHECK(s.subsets.size() == 2);
    CHECK(s.constants == std::vector<double>{0.5, 0.5});
    CHECK(s.strategy.kind == StrategyKind::Nearest);
    CHECK(s.seeds.size() == 3);

    CyclicSystem sys = s.build_system();
    CHECK(sys.gap(1) == doctest::Approx(1.0));
    CHECK(sys.gap(2) == doctest::Approx(1.0));
}

TEST_CASE("parser rejections") {
    std::string base = slurp(scenario_path("two_interval.json"));

    SUBCASE("constants product at one") {
        std::string bad = base;
        auto pos = bad.find("[0.5, 0.5]");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 10, "[1.0, 1.0]");
        CHECK_THROWS_WITH_AS(parse_scenario(bad),
                             "scenario field \"constants\": product of constants >= 1",
                             ScenarioError);
    }
    SUBCASE("wrong d0i length") {
        std::string bad = base;
        auto pos = bad.find("\"d0i\": [1.5, 1.5]");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 17, "\"d0i\": [1.5]");
        CHECK_THROWS_AS(parse_scenario(bad), ScenarioError);
    }
    SUBCASE("unknown fields are errors") {
        std::string bad = base;
        auto pos = bad.find("\"name\"");
        REQUIRE(pos != std::string::npos);
        bad.insert(pos, "\"surprise\": 1, ");
        try {
            parse_scenario(bad);
            FAIL("expected a ScenarioError");
        } catch (const ScenarioError& e) {
            CHECK(std::string(e.what()).find("surprise") != std::string::npos);
        }
    }
    SUBCASE("syntax errors carry the byte position") {
        try {
            parse_scenario("{ \"name\": ");
            FAIL("expected a ScenarioError");
        } catch (const ScenarioError& e) {
            CHECK(std::string(e.what()).find("parse error at byte") != std::string::npos);
        }
    }
    SUBCASE("seeds and seed_samples_per_subset are exclusive") {
        std::string bad = base;
        auto pos = bad.find("\"tol\"");
        REQUIRE(pos != std::string::npos);
        bad.insert(pos, "\"seed_samples_per_subset\": 2, ");
        CHECK_THROWS_AS(parse_scenario(bad), ScenarioError);
    }
    SUBCASE("seed dimension mismatch") {
        std::string bad = base;
        auto pos = bad.find("[[0.0], [0.3], [0.9]]");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 21, "[[0.0, 1.0]]");
        CHECK_THROWS_AS(parse_scenario(bad), ScenarioError);
    }
}

TEST_CASE("canonical form round-trips") {
    for (const char* name :
         {"two_interval.json", "intersecting.json", "ball_valued.json", "violating.json",
          "three_box.json"}) {
        CAPTURE(name);
        Scenario original = load_scenario(scenario_path(name));
        Scenario reparsed = parse_scenario(canonical_scenario_json(original));
        CHECK(scenario_equal(original, reparsed));
    }
}

TEST_CASE("run artifacts are deterministic") {
    Scenario s = load_scenario(scenario_path("two_interval.json"));
    RunArtifacts first = run_scenario(s);
    RunArtifacts second = run_scenario(s);
    CHECK(first.report_text == second.report_text);
    CHECK(first.machine_json == second.machine_json);
    CHECK(first.traces == second.traces);

    RunOverrides parallel;
    parallel.parallel = true;
    RunArtifacts third = run_scenario(s, parallel);
    CHECK(first.report_text == third.report_text);
    CHECK(first.traces == third.traces);
}

TEST_CASE("report and trace stay coherent") {
    Scenario s = load_scenario(scenario_path("two_interval.json"));
    RunArtifacts artifacts = run_scenario(s);
    REQUIRE(artifacts.runs.size() == 3);
    for (std::size_t r = 0; r < artifacts.runs.size(); ++r) {
        const SeedRun& run = artifacts.runs[r];
        // one row per step plus the header
        std::istringstream trace(artifacts.traces[r]);
        std::string line;
        std::getline(trace, line);
        CHECK(line == "step,subset,x0,d_n,order_certified,in_band");
        std::vector<std::vector<std::string>> rows;
        while (std::getline(trace, line)) {
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            REQUIRE(cells.size() == 6);
            rows.push_back(std::move(cells));
        }
        CHECK(rows.size() == run.trajectory.steps());

        // each limit is reproducible from the last trace row of its subset
        for (const SubsetLimit& lim : run.report.limits) {
            REQUIRE(lim.converged);
            for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
                if (std::stoul((*it)[1]) == lim.subset) {
                    double coord = std::stod((*it)[2]);
                    CHECK(std::abs(coord - lim.limit[0]) <= s.tol);
                    break;
                }
            }
        }
    }
}

TEST_CASE("assumption verdicts for the shipped scenarios") {
    CheckResults tw = check_scenario(load_scenario(scenario_path("two_interval.json")));
    CHECK(tw.containment.verdict == Verdict::Pass);
    CHECK(tw.contraction.verdict == Verdict::Pass);
    CHECK(tw.assumption3.verdict == Verdict::Pass);
    CHECK(tw.assumption4.verdict == Verdict::Pass);
    CHECK(required_checks_pass(tw));
    CHECK_FALSE(tw.intersecting);

    CheckResults in = check_scenario(load_scenario(scenario_path("intersecting.json")));
    CHECK(required_checks_pass(in));
    CHECK(in.intersecting);

    CheckResults bad = check_scenario(load_scenario(scenario_path("violating.json")));
    CHECK(bad.contraction.verdict == Verdict::Fail);
    CHECK_FALSE(required_checks_pass(bad));
}

TEST_CASE("violating scenario still traces its trajectories") {
    Scenario s = load_scenario(scenario_path("violating.json"));
    RunArtifacts artifacts = run_scenario(s);
    CHECK(artifacts.checks.contraction.verdict == Verdict::Fail);
    REQUIRE(artifacts.runs.size() == 2);
    CHECK_FALSE(artifacts.traces[0].empty());

    // expansion times contraction composes to the identity, so every seed
    // sits on its own period-2 orbit: the per-subset subsequences converge
    // instantly while the orbits never approach the best proximity pair
    for (const SeedRun& run : artifacts.runs) {
        CHECK(run.report.status == "converged");
        CHECK(run.report.proximity_residuals[0] > 0.5);
    }
    // and the limits disagree across seeds, so no uniqueness claim survives
    REQUIRE(artifacts.probe_valid);
    CHECK(artifacts.probe.worst > 0.1);
}

TEST_CASE("empty seed list produces a report and no traces") {
    Scenario s = load_scenario(scenario_path("two_interval.json"));
    s.seeds.clear();
    RunArtifacts artifacts = run_scenario(s);
    CHECK(artifacts.runs.empty());
    CHECK(artifacts.traces.empty());
    CHECK_FALSE(artifacts.probe_valid);

    auto dir = std::filesystem::temp_directory_path() / "cyclicbp_test_noseeds";
    std::filesystem::remove_all(dir);
    auto written = emit(artifacts, dir);
    REQUIRE(written.size() == 1);
    CHECK(written[0].filename() == "report.txt");
    std::filesystem::remove_all(dir);
}

TEST_CASE("emitted files are byte-identical across reruns") {
    Scenario s = load_scenario(scenario_path("intersecting.json"));
    auto dir_a = std::filesystem::temp_directory_path() / "cyclicbp_test_emit_a";
    auto dir_b = std::filesystem::temp_directory_path() / "cyclicbp_test_emit_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    auto first = emit(run_scenario(s), dir_a);
    auto second = emit(run_scenario(s), dir_b);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(slurp(first[i]) == slurp(second[i]));
    }
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("remaining order and strategy kinds parse and round-trip") {
    std::string text = R"({
      "name": "axis_order",
      "dimension": 2,
      "subsets": [
        {"kind": "box", "lower": [0.0, 0.0], "upper": [1.0, 1.0]},
        {"kind": "box", "lower": [0.0, 0.0], "upper": [1.0, 1.0]}
      ],
      "map": {
        "kind": "affine_target",
        "pieces": [
          {"offset": [0.0, 0.0], "matrix": [[0.5, 0.0], [0.0, 0.5]], "anchor": [0.0, 0.0]},
          {"offset": [0.0, 0.0], "matrix": [[0.5, 0.0], [0.0, 0.5]], "anchor": [0.0, 0.0]}
        ]
      },
      "constants": [0.5, 0.5],
      "order": {"kind": "scalar_coordinate", "axis": 1},
      "thresholds": {"d0": 1.0, "d0i": [0.5, 0.5]},
      "strategy": {"kind": "order_greedy", "image_samples": 24},
      "seeds": [[0.5, 0.5]],
      "tol": 1e-9,
      "max_steps": 1000,
      "rng_seed": 3,
      "checker_samples": 20
    })";
    Scenario s = parse_scenario(text);
    CHECK(s.order.kind == OrderKind::ScalarCoordinate);
    CHECK(s.order.axis == 1);
    CHECK(s.strategy.kind == StrategyKind::OrderGreedy);
    CHECK(s.strategy.image_samples == 24);
    CHECK(scenario_equal(s, parse_scenario(canonical_scenario_json(s))));

    RunArtifacts artifacts = run_scenario(s);
    REQUIRE(artifacts.runs.size() == 1);
    CHECK(artifacts.runs[0].report.status == "converged");
}

TEST_CASE("emit surfaces filesystem failures") {
    Scenario s = load_scenario(scenario_path("two_interval.json"));
    s.seeds.clear();
    RunArtifacts artifacts = run_scenario(s);
    auto blocker = std::filesystem::temp_directory_path() / "cyclicbp_emit_blocker";
    std::filesystem::remove_all(blocker);
    std::ofstream(blocker) << "not a directory";
    CHECK_THROWS_AS(emit(artifacts, blocker / "out"), std::runtime_error);
    std::filesystem::remove(blocker);
}

TEST_CASE("table map scenarios parse and run") {
    std::string text = R"({
      "name": "table_demo",
      "dimension": 1,
      "subsets": [
        {"kind": "cloud", "points": [[0.0], [1.0]]},
        {"kind": "cloud", "points": [[2.0]]}
      ],
      "map": {
        "kind": "table",
        "pieces": [
          {"entries": [{"from": [0.0], "image": {"kind": "cloud", "points": [[2.0]]}},
                        {"from": [1.0], "image": {"kind": "cloud", "points": [[2.0]]}}]},
          {"entries": [{"from": [2.0], "image": {"kind": "cloud", "points": [[0.0]]}}]}
        ]
      },
      "constants": [0.5, 0.5],
      "order": {"kind": "componentwise"},
      "thresholds": {"d0": 3.0, "d0i": [1.5, 2.5]},
      "strategy": {"kind": "nearest"},
      "seeds": [[1.0]],
      "tol": 1e-9,
      "max_steps": 100,
      "rng_seed": 1,
      "checker_samples": 10
    })";
    Scenario s = parse_scenario(text);
    RunArtifacts artifacts = run_scenario(s);
    REQUIRE(artifacts.runs.size() == 1);
    CHECK(artifacts.runs[0].report.status == "converged");
    CHECK(artifacts.checks.containment.verdict == Verdict::Pass);

    Scenario reparsed = parse_scenario(canonical_scenario_json(s));
    CHECK(scenario_equal(s, reparsed));
}
