#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cyclicbp/cyclic_system.hpp"
#include "cyclicbp/geometry.hpp"
#include "cyclicbp/order.hpp"
#include "cyclicbp/rng.hpp"

namespace cyclicbp {

enum class StrategyKind { Nearest, OrderGreedy, SeededRandom };

const char* to_string(StrategyKind kind);

/// How one successor is picked from a multivalued image:
///  - nearest: the metric projection of the current point onto the image;
///  - order-greedy: nearest among sampled image points y with x <= y,
///    falling back to nearest when no sampled point is comparable;
///  - seeded-random: uniform choice over sampled image points.
struct SelectionStrategy {
    StrategyKind kind = StrategyKind::Nearest;
    std::size_t image_samples = 64;
};

/// Picks the successor of x from its image under the strategy. Sets
/// *used_fallback when order-greedy found no comparable image point.
Point select_successor(const CyclicSystem& sys, const OrderRelation& order,
                       const SelectionStrategy& strategy, const Point& x,
                       std::size_t from_subset, SplitMix64& rng,
                       bool* used_fallback = nullptr);

/// Applies the map `times` times starting from x (times == 0 returns x).
Point composite_apply(const CyclicSystem& sys, const OrderRelation& order,
                      const SelectionStrategy& strategy, const Point& x, std::size_t times,
                      std::uint64_t seed);

/// An iterated orbit x_0, x_1, ... with cyclically advancing subset
/// annotations, per-step distances d_n, per-step order-induction
/// certificates, and the p per-subset subsequences {x_{np+j}}.
struct Trajectory {
    std::vector<Point> points;
    std::vector<std::size_t> subsets;        // 1-based, aligned with points
    std::vector<double> step_distances;      // d_n = d(x_n, x_{n+1})
    std::vector<bool> order_certified;       // induction rule fired on step n
    std::vector<std::vector<std::size_t>> per_subset;  // point indices, slot j-1
    std::size_t start_subset = 1;
    bool converged = false;
    std::vector<std::size_t> fallback_steps;  // order-greedy fell back to nearest

    std::size_t steps() const { return step_distances.size(); }
};

/// Iterates from x0 until every per-subset Cauchy increment over a full cycle
/// drops to tol, or max_steps is hit. Throws std::runtime_error with a step
/// diagnostic when an iterate goes non-finite.
Trajectory run_trajectory(const CyclicSystem& sys, const OrderRelation& order,
                          const OrderThresholds& thresholds, const SelectionStrategy& strategy,
                          const Point& x0, std::size_t max_steps, double tol,
                          std::uint64_t seed);

/// Per-step record of the quasi-proximity band D_i <= d_n <= D. Trajectories
/// may start outside the band, so the upper bound is asserted only from the
/// first step it holds; the lower bound is geometric and asserted throughout.
struct BandRecord {
    std::optional<std::size_t> entry_step;
    std::vector<std::size_t> lower_violations;
    std::vector<std::size_t> upper_violations;  // post-entry only
    std::vector<bool> in_band;                  // per step
    bool ok = true;
};

BandRecord quasi_proximity_check(const Trajectory& traj, const CyclicSystem& sys, double tol);

struct SubsetLimit {
    std::size_t subset = 0;
    bool converged = false;
    Point limit;                    // last element of the per-subset subsequence
    double last_increment = 0.0;
    bool chain_certified_tail = false;  // induced order chains the subsequence tail
};

/// Convergence diagnostics of a finished trajectory: per-subset limit
/// estimates, adjacent-limit distances against the gaps D_j, composite
/// fixed-point residuals, the band record, and (when all gaps vanish) the
/// single fixed-point estimate with its residual.
struct ProximityReport {
    std::string status;  // "converged" | "incomplete"
    std::vector<SubsetLimit> limits;
    std::vector<double> adjacent_limit_distance;  // slot j-1: d(limit_j, limit_{j+1})
    std::vector<double> proximity_residuals;      // |adjacent - D_j|
    std::vector<double> composite_residuals;      // return distance of p steps from limit_j
    BandRecord band;
    std::size_t first_certified_step = 0;  // all steps from here on were order-certified
    bool all_steps_certified = false;
    bool uniform_gaps = false;   // D_j equal for all j
    bool intersecting = false;   // all D_j == 0
    std::optional<Point> fixed_point;
    std::optional<double> fixed_point_residual;
};

ProximityReport convergence_report(const Trajectory& traj, const CyclicSystem& sys,
                                   const OrderRelation& order, const OrderThresholds& thresholds,
                                   const SelectionStrategy& strategy, double tol,
                                   std::uint64_t seed);

/// The comparable-limit inequality H(T xbar, T x_n) > k_i d(xbar, x_n) over
/// trajectory elements below their subset limit. Vacuous when no element is
/// comparable. Throws on a non-converged trajectory.
struct Assumption7Report {
    Verdict verdict = Verdict::Pass;
    bool vacuous = true;
    std::size_t pairs_checked = 0;
    std::optional<std::size_t> violating_step;
};

Assumption7Report check_assumption7(const CyclicSystem& sys, const OrderRelation& order,
                                    const Trajectory& traj, double tol);

/// Re-runs trajectories from several seeds and reports, per subset, the
/// maximum pairwise distance between the converged limit estimates.
struct UniquenessProbe {
    bool reliable = true;  // false when any trajectory failed to converge
    std::vector<double> max_pairwise;  // slot j-1
    double worst = 0.0;
};

UniquenessProbe uniqueness_probe(const CyclicSystem& sys, const OrderRelation& order,
                                 const OrderThresholds& thresholds,
                                 const SelectionStrategy& strategy,
                                 const std::vector<Point>& seeds, std::size_t max_steps,
                                 double tol, std::uint64_t seed);

}  // namespace cyclicbp
