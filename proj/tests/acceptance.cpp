// Acceptance suite: every shipped guarantee gets one pass/fail line.
// Exit code 0 only when all criteria hold at their stated tolerances.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "cyclicbp/engine.hpp"
#include "cyclicbp/rng.hpp"
#include "cyclicbp/scenario.hpp"
#include "oracles.hpp"

using namespace cyclicbp;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli_path;

std::string scenario_path(const char* name) {
    const char* env = std::getenv("CYCLICBP_SCENARIO_DIR");
    return std::string(env ? env : CYCLICBP_SCENARIO_DIR) + "/" + name;
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }

    void summary(const std::string& what) {
        if (pass) detail = what;
    }
};

double run_budget_ms(const std::function<void(Outcome&)>& body, Outcome& outcome) {
    auto start = Clock::now();
    body(outcome);
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---- criterion 1 & 2 share the generated cloud pairs ----

struct CloudPair {
    oracle::Cloud a, b;
};

std::vector<CloudPair> make_pairs(std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<CloudPair> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t dim = 1 + rng.below(3);
        pairs.push_back({oracle::random_cloud(rng, 20, dim), oracle::random_cloud(rng, 20, dim)});
    }
    return pairs;
}

void criterion1(Outcome& out) {
    auto pairs = make_pairs(200, 2024);
    double worst = 0.0;
    for (const CloudPair& pair : pairs) {
        Region a = Region::cloud(pair.a);
        Region b = Region::cloud(pair.b);
        worst = std::max(worst, std::abs(hausdorff(a, b) - oracle::hausdorff(pair.a, pair.b)));
        worst = std::max(worst,
                         std::abs(set_distance(a, b) - oracle::set_distance(pair.a, pair.b)));
        worst = std::max(worst,
                         std::abs(sup_deviation(a, b) - oracle::sup_deviation(pair.a, pair.b)));
        worst = std::max(worst, std::abs(diameter(a) - oracle::diameter(pair.a)));
    }
    out.require(worst <= 1e-12,
                "max deviation from the brute-force oracle: " + format_number(worst));
    out.summary("200 cloud pairs, max |err| = " + format_number(worst));
}

void criterion2(Outcome& out) {
    auto pairs = make_pairs(200, 2024);
    for (const CloudPair& pair : pairs) {
        SetMetrics m = set_metrics(Region::cloud(pair.a), Region::cloud(pair.b));
        out.require(m.distance <= m.hausdorff + 1e-12, "D <= H violated");
        out.require(m.hausdorff <= m.sup_deviation + 1e-12, "H <= delta violated");
    }
    SplitMix64 rng(77);
    for (int i = 0; i < 200; ++i) {
        std::size_t dim = 1 + rng.below(3);
        auto a = oracle::random_cloud(rng, 15, dim);
        auto b = oracle::random_cloud(rng, 15, dim);
        auto c = oracle::random_cloud(rng, 15, dim);
        double ac = sup_deviation(Region::cloud(a), Region::cloud(c));
        double ab = sup_deviation(Region::cloud(a), Region::cloud(b));
        double bc = sup_deviation(Region::cloud(b), Region::cloud(c));
        out.require(ac <= ab + bc + 1e-12, "delta triangle inequality violated");
    }
    out.summary("chain on 200 pairs, delta-triangle on 200 triples");
}

void criterion3(Outcome& out) {
    SplitMix64 rng(31337);
    for (int i = 0; i < 100; ++i) {
        std::size_t dim = 1 + rng.below(3);
        auto a = oracle::random_cloud(rng, 15, dim);
        auto b = oracle::random_cloud(rng, 15, dim);
        double eps = hausdorff(Region::cloud(a), Region::cloud(b)) + 1e-9;
        for (const auto& p : a) {
            bool covered = false;
            for (const auto& q : b) {
                if (oracle::dist(p, q) < eps) {
                    covered = true;
                    break;
                }
            }
            out.require(covered, "point of A without an eps-close partner in B");
        }
    }
    out.summary("100 pairs, exhaustive cover at eps = H + 1e-9");
}

void criterion4(Outcome& out) {
    Scenario s = load_scenario(scenario_path("two_interval.json"));
    CyclicSystem sys = s.build_system();
    OrderRelation order = s.order.build();

    // (a) equality-case contraction on the 100 x 100 ordered-pair grid
    ContractionReport contraction = check_contraction(sys, order, 100, s.rng_seed);
    out.require(contraction.verdict == Verdict::Pass, "contraction verdict not PASS");
    out.require(contraction.per_subset[0].pairs_checked == 10000,
                "expected the full 100x100 ordered-pair grid");
    double worst_slack = 0.0;
    for (const Point& x : sample(sys.subset(1), 100, 0)) {
        for (const Point& y : sample(sys.subset(2), 100, 0)) {
            double bound = 0.5 * metric(x, y) + 0.5 * sys.gap(1);
            double slack = bound - hausdorff(sys.image_of(x, 1), sys.image_of(y, 2));
            worst_slack = std::max(worst_slack, std::abs(slack));
        }
    }
    out.require(worst_slack <= 1e-9, "equality-case slack above 1e-9");

    // (b) limits from the three seeds
    RunArtifacts artifacts = run_scenario(s);
    for (const SeedRun& run : artifacts.runs) {
        out.require(run.report.status == "converged", "trajectory did not converge");
        out.require(std::abs(run.report.limits[0].limit[0] - 1.0) <= 1e-8, "limit 1 off");
        out.require(std::abs(run.report.limits[1].limit[0] - 2.0) <= 1e-8, "limit 2 off");
        double adjacent = run.report.adjacent_limit_distance[0];
        out.require(std::abs(adjacent - 1.0) <= 1e-8, "adjacent limit distance off");

        // (c) excess distance shrinks by exactly k per step
        const Trajectory& traj = run.trajectory;
        for (std::size_t n = 0; n + 1 < traj.steps(); ++n) {
            double e0 = traj.step_distances[n] - 1.0;
            double e1 = traj.step_distances[n + 1] - 1.0;
            if (e0 > 1e-5) {
                out.require(std::abs(e1 / e0 - 0.5) <= 5e-10,
                            "geometric decay factor off at step " + std::to_string(n));
            }
        }

        // (d) composite fixed-point residuals
        out.require(run.report.composite_residuals[0] <= 1e-8, "composite residual 1 off");
        out.require(run.report.composite_residuals[1] <= 1e-8, "composite residual 2 off");
    }
    out.summary("equality slack <= " + format_number(worst_slack) +
                 ", limits (1, 2) from 3 seeds, decay factor 0.5, composite residuals");
}

void criterion5(Outcome& out) {
    Scenario s = load_scenario(scenario_path("intersecting.json"));
    RunArtifacts artifacts = run_scenario(s);
    out.require(artifacts.runs.size() == 2, "expected two seeds");
    std::vector<double> fixed;
    for (const SeedRun& run : artifacts.runs) {
        out.require(run.report.status == "converged", "trajectory did not converge");
        out.require(run.report.fixed_point.has_value(), "no fixed-point estimate");
        if (run.report.fixed_point) {
            fixed.push_back((*run.report.fixed_point)[0]);
            out.require(*run.report.fixed_point_residual <= 1e-8, "fixed-point residual off");
        }
    }
    out.require(fixed.size() == 2 && std::abs(fixed[0] - fixed[1]) <= 1e-8,
                "seeds disagree on the fixed point");
    out.summary("both seeds at x = 0 within 1e-8, residual <= 1e-8");
}

void criterion6(Outcome& out) {
    Scenario s = load_scenario(scenario_path("ball_valued.json"));
    CyclicSystem sys = s.build_system();
    RunArtifacts artifacts = run_scenario(s);
    for (const SeedRun& run : artifacts.runs) {
        out.require(run.report.status == "converged", "trajectory did not converge");
        const BandRecord& band = run.report.band;
        out.require(band.entry_step.has_value(), "band never entered");
        out.require(band.upper_violations.empty() && band.lower_violations.empty(),
                    "band violated after entry");
        double adjacent = run.report.adjacent_limit_distance[0];
        out.require(std::abs(adjacent - sys.max_gap()) <= 0.1 + 1e-8,
                    "radius-widened limit residual off");
    }
    out.summary("ball images (r=0.1), band kept after entry, |d - D| <= 0.1 + 1e-8");
}

void criterion7(Outcome& out) {
    Scenario s = load_scenario(scenario_path("violating.json"));
    CyclicSystem sys = s.build_system();
    ContractionReport report =
        check_contraction(sys, s.order.build(), s.checker_samples, s.rng_seed);
    out.require(report.verdict == Verdict::Fail, "violating map not detected");
    out.require(report.worst.has_value(), "no witness reported");
    if (report.worst) {
        const PairWitness& w = *report.worst;
        double bound = sys.constant(w.subset) * metric(w.x, w.y) +
                       (1.0 - sys.constant(w.subset)) * sys.gap(w.subset);
        double slack =
            bound - hausdorff(sys.image_of(w.x, w.subset),
                              sys.image_of(w.y, sys.next_index(w.subset)));
        out.require(slack < 0.0, "recomputed witness slack not negative");
    }

    if (g_cli_path.empty()) {
        out.require(false, "CLI path not provided (argv[1] or CYCLICBP_CLI)");
        return;
    }
    auto exit_code = [](const std::string& cmd) {
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    int bad = exit_code("'" + g_cli_path + "' check --scenario '" +
                        scenario_path("violating.json") + "' > /dev/null");
    out.require(bad == 1, "check exit code for the violating scenario: " + std::to_string(bad));
    int good = exit_code("'" + g_cli_path + "' check --scenario '" +
                         scenario_path("two_interval.json") + "' > /dev/null");
    out.require(good == 0, "check exit code for two_interval: " + std::to_string(good));

    auto garbled = std::filesystem::temp_directory_path() / "cyclicbp_acceptance_bad.json";
    std::ofstream(garbled) << "{ not json";
    int parse = exit_code("'" + g_cli_path + "' check --scenario '" + garbled.string() +
                          "' 2> /dev/null");
    std::filesystem::remove(garbled);
    out.require(parse == 2, "check exit code for a parse error: " + std::to_string(parse));
    out.summary("FAIL verdict with negative witness slack; check exits 1/0/2");
}

void criterion8(Outcome& out) {
    Scenario s = load_scenario(scenario_path("three_box.json"));
    CyclicSystem sys = s.build_system();
    out.require(sys.subset_count() == 3, "expected p = 3");
    out.require(std::abs(sys.constants_product() - 0.512) <= 1e-15, "expected k = 0.512");
    for (std::size_t i = 1; i <= 3; ++i) {
        out.require(std::abs(sys.gap(i) - 1.0) <= 1e-12, "boxes not at mutual distance 1");
    }

    // independent fixed points: compose the three diagonal affine pieces by hand
    Point expected[3];
    for (int axis = 0; axis < 2; ++axis) {
        double coeff[3], offset[3];
        for (int j = 0; j < 3; ++j) {
            coeff[j] = s.map.pieces[j].linear.data[axis * 2 + axis];
            offset[j] = s.map.pieces[j].offset[axis];
        }
        for (int j = 0; j < 3; ++j) {
            // composite starting at subset j+1: a = product, b by forward accumulation
            double a = 1.0, b = 0.0;
            for (int t = 0; t < 3; ++t) {
                int piece = (j + t) % 3;
                b = offset[piece] + coeff[piece] * b;
                a *= coeff[piece];
            }
            double fixed = b / (1.0 - a);
            expected[j].push_back(fixed);
        }
    }
    // brute-force iteration agrees with the solved fixed points
    for (int j = 0; j < 3; ++j) {
        Point x = expected[j];
        for (int t = 0; t < 60; ++t) {
            for (int piece = 0; piece < 3; ++piece) {
                int idx = (j + piece) % 3;
                Point next(2);
                for (int axis = 0; axis < 2; ++axis) {
                    next[axis] = s.map.pieces[idx].offset[axis] +
                                 s.map.pieces[idx].linear.data[axis * 2 + axis] * x[axis];
                }
                x = next;
            }
        }
        out.require(metric(x, expected[j]) <= 1e-10, "oracle fixed point drifts");
    }

    RunArtifacts artifacts = run_scenario(s);
    out.require(artifacts.runs.size() == 9, "expected 3 seeds per subset");
    for (const SeedRun& run : artifacts.runs) {
        out.require(run.report.status == "converged", "trajectory did not converge");
        for (const SubsetLimit& lim : run.report.limits) {
            out.require(lim.converged, "subset limit missing");
            out.require(metric(lim.limit, expected[lim.subset - 1]) <= 1e-8,
                        "limit differs from the composed affine fixed point");
        }
        for (double residual : run.report.composite_residuals) {
            out.require(residual <= 1e-8, "composite residual above 1e-8");
        }
    }
    // three distinct best proximity points
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            out.require(metric(expected[i], expected[j]) > 0.5, "limits not distinct");
        }
    }
    out.require(artifacts.probe_valid && artifacts.probe.reliable, "uniqueness probe unreliable");
    out.require(artifacts.probe.worst <= 1e-8,
                "uniqueness probe worst distance: " + format_number(artifacts.probe.worst));
    out.summary("3 distinct composite fixed points, probe worst = " +
                 format_number(artifacts.probe.worst));
}

void criterion9(Outcome& out) {
    for (const char* name : {"two_interval.json", "ball_valued.json", "three_box.json"}) {
        Scenario s = load_scenario(scenario_path(name));
        RunArtifacts first = run_scenario(s);
        RunArtifacts second = run_scenario(s);
        out.require(first.report_text == second.report_text,
                    std::string(name) + ": reports differ between reruns");
        out.require(first.traces == second.traces,
                    std::string(name) + ": traces differ between reruns");

        auto dir_a = std::filesystem::temp_directory_path() / "cyclicbp_acceptance_a";
        auto dir_b = std::filesystem::temp_directory_path() / "cyclicbp_acceptance_b";
        std::filesystem::remove_all(dir_a);
        std::filesystem::remove_all(dir_b);
        auto files_a = emit(first, dir_a);
        auto files_b = emit(second, dir_b);
        for (std::size_t i = 0; i < files_a.size(); ++i) {
            out.require(slurp(files_a[i]) == slurp(files_b[i]),
                        std::string(name) + ": emitted bytes differ");
        }
        std::filesystem::remove_all(dir_a);
        std::filesystem::remove_all(dir_b);
    }
    out.summary("rerun artifacts byte-identical (reports + traces, in memory and on disk)");
}

struct Criterion {
    int id;
    const char* name;
    double budget_ms;
    std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        g_cli_path = argv[1];
    } else if (const char* env = std::getenv("CYCLICBP_CLI")) {
        g_cli_path = env;
    }

    std::vector<Criterion> criteria{
        {1, "hausdorff oracle equivalence (1e-12)", 1000.0, criterion1},
        {2, "metric chain D <= H <= delta and delta-triangle", 1000.0, criterion2},
        {3, "eps-covering from small hausdorff distance", 1000.0, criterion3},
        {4, "two-interval equality case: slack, limits, decay, composites", 1000.0, criterion4},
        {5, "intersecting subsets: unique fixed point", 1000.0, criterion5},
        {6, "ball-valued images: band and widened residual", 1000.0, criterion6},
        {7, "counterexample detection and check exit codes", 5000.0, criterion7},
        {8, "p=3 boxes: distinct composite fixed points, uniqueness", 5000.0, criterion8},
        {9, "byte-identical reruns", 5000.0, criterion9},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        Outcome outcome;
        double ms = run_budget_ms(criterion.body, outcome);
        if (ms > criterion.budget_ms) {
            outcome.require(false, "runtime " + std::to_string(ms) + " ms over budget " +
                                       std::to_string(criterion.budget_ms) + " ms");
        }
        std::printf("[%s] criterion %d: %s (%s; %.0f ms)\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name, outcome.detail.c_str(), ms);
        if (!outcome.pass) ++failures;
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
    return failures == 0 ? 0 : 1;
}
