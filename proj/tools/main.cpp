#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cyclicbp/scenario.hpp"

namespace {

int run_command(const std::string& scenario_path, const std::string& out_dir,
                const cyclicbp::RunOverrides& overrides) {
    cyclicbp::Scenario scenario = cyclicbp::load_scenario(scenario_path);
    cyclicbp::RunArtifacts artifacts = cyclicbp::run_scenario(scenario, overrides);
    auto written = cyclicbp::emit(artifacts, out_dir);
    std::cout << "scenario: " << artifacts.scenario_name << "\n";
    std::cout << "containment: " << to_string(artifacts.checks.containment.verdict) << "\n";
    std::cout << "contraction: " << to_string(artifacts.checks.contraction.verdict) << "\n";
    std::cout << "assumption3: " << to_string(artifacts.checks.assumption3.verdict) << "\n";
    std::cout << "assumption4: " << to_string(artifacts.checks.assumption4.verdict) << "\n";
    std::size_t converged = 0;
    for (const auto& run : artifacts.runs) {
        if (run.trajectory.converged) ++converged;
    }
    std::cout << "trajectories: " << converged << "/" << artifacts.runs.size()
              << " converged\n";
    for (const auto& path : written) std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int check_command(const std::string& scenario_path) {
    cyclicbp::Scenario scenario = cyclicbp::load_scenario(scenario_path);
    cyclicbp::CheckResults checks = cyclicbp::check_scenario(scenario);
    std::cout << "scenario: " << scenario.name << "\n";
    std::cout << "containment: " << to_string(checks.containment.verdict) << "\n";
    std::cout << "contraction: " << to_string(checks.contraction.verdict)
              << " (min slack=" << cyclicbp::format_number(checks.contraction.min_slack)
              << ")\n";
    if (checks.contraction.worst &&
        checks.contraction.verdict == cyclicbp::Verdict::Fail) {
        const auto& w = *checks.contraction.worst;
        std::cout << "  witness: subset " << w.subset
                  << ", slack=" << cyclicbp::format_number(w.slack) << "\n";
    }
    std::cout << "assumption3: " << to_string(checks.assumption3.verdict) << "\n";
    std::cout << "assumption4: " << to_string(checks.assumption4.verdict)
              << " (d0=" << cyclicbp::format_number(checks.assumption4.actual)
              << ", required >= " << cyclicbp::format_number(checks.assumption4.required)
              << ")\n";
    std::cout << "assumption5 (optional): " << to_string(checks.assumption5.verdict) << "\n";
    std::cout << "intersecting: " << (checks.intersecting ? "yes" : "no") << "\n";
    return cyclicbp::required_checks_pass(checks) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"order-respecting cyclic iteration toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    double tol = -1.0;
    std::int64_t max_steps = -1;
    std::int64_t seed = -1;
    bool parallel = false;

    CLI::App* run = app.add_subcommand("run", "run a scenario and write report + traces");
    run->add_option("--scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--tol", tol, "override stopping tolerance");
    run->add_option("--max-steps", max_steps, "override maximum iteration steps");
    run->add_option("--seed", seed, "override the rng seed");
    run->add_flag("--parallel", parallel, "run independent trajectories concurrently");

    CLI::App* check = app.add_subcommand("check", "evaluate assumption checks only");
    check->add_option("--scenario", scenario_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) {
            cyclicbp::RunOverrides overrides;
            if (tol > 0.0) overrides.tol = tol;
            if (max_steps >= 0) overrides.max_steps = static_cast<std::size_t>(max_steps);
            if (seed >= 0) overrides.seed = static_cast<std::uint64_t>(seed);
            overrides.parallel = parallel;
            return run_command(scenario_path, out_dir, overrides);
        }
        return check_command(scenario_path);
    } catch (const cyclicbp::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
