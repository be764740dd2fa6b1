#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclicbp/cyclic_system.hpp"
#include "cyclicbp/engine.hpp"
#include "cyclicbp/geometry.hpp"
#include "cyclicbp/order.hpp"

namespace cyclicbp {

/// Raised for malformed scenario documents: syntax errors carry the byte
/// position, semantic errors name the offending field.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Declarative order description, kept separate from OrderRelation so a
/// scenario can be re-serialized in canonical form.
struct OrderSpec {
    OrderKind kind = OrderKind::Componentwise;
    std::size_t axis = 0;
    std::vector<std::pair<Point, Point>> pairs;
    bool transitive_closure = false;
    bool strict = false;

    OrderRelation build() const;
};

/// A fully validated run description.
struct Scenario {
    std::string name;
    std::size_t dimension = 1;
    std::vector<Region> subsets;
    MultiMap map;
    std::vector<double> constants;
    OrderSpec order;
    OrderThresholds thresholds;
    SelectionStrategy strategy;
    std::vector<Point> seeds;
    std::size_t seed_samples_per_subset = 0;  // alternative to explicit seeds
    double tol = kDefaultTol;
    std::size_t max_steps = 10000;
    std::uint64_t rng_seed = 1;
    std::size_t checker_samples = 100;

    CyclicSystem build_system() const;
    /// Explicit seeds, or seed_samples_per_subset deterministic samples of
    /// every subset when no explicit seeds were given.
    std::vector<Point> start_points() const;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON form; parse_scenario(canonical_scenario_json(s)) is
/// equivalent to s. Numbers carry 17 significant digits.
std::string canonical_scenario_json(const Scenario& s);

struct RunOverrides {
    std::optional<double> tol;
    std::optional<std::size_t> max_steps;
    std::optional<std::uint64_t> seed;
    bool parallel = false;
};

/// Assumption/containment verdicts for one system.
struct CheckResults {
    ContainmentReport containment;
    ContractionReport contraction;
    Assumption3Report assumption3;
    ThresholdReport assumption4;
    ThresholdReport assumption5;
    bool intersecting = false;
};

CheckResults check_scenario(const Scenario& s);

/// True when every required certificate holds: containment, the contraction
/// inequality, assumption 3, and assumption 4 (assumption 5 is an optional
/// strengthening and does not gate).
bool required_checks_pass(const CheckResults& checks);

struct SeedRun {
    Point start;
    Trajectory trajectory;
    ProximityReport report;
    std::optional<Assumption7Report> assumption7;  // evaluated when the gaps vanish
};

struct RunArtifacts {
    std::string scenario_name;
    double tol = kDefaultTol;
    CheckResults checks;
    std::vector<SeedRun> runs;
    UniquenessProbe probe;  // meaningful when probe_valid
    bool probe_valid = false;
    std::string report_text;          // human-readable sections + machine block
    std::string machine_json;         // the machine-readable block on its own
    std::vector<std::string> traces;  // CSV, one per seed
};

/// Runs all checkers, one trajectory per start point, the uniqueness probe,
/// and assembles the report. Deterministic: equal inputs give byte-identical
/// artifacts. Check failures do not abort the run.
RunArtifacts run_scenario(const Scenario& s, const RunOverrides& overrides = {});

/// Writes report.txt and trace_<k>.csv under out_dir (created if missing).
/// Returns the paths written.
std::vector<std::filesystem::path> emit(const RunArtifacts& artifacts,
                                        const std::filesystem::path& out_dir);

/// "%.17g" formatting used for every number the library emits.
std::string format_number(double v);

}  // namespace cyclicbp
