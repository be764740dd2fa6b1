#include "cyclicbp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cyclicbp {

const char* to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Nearest: return "nearest";
        case StrategyKind::OrderGreedy: return "order_greedy";
        case StrategyKind::SeededRandom: return "seeded_random";
    }
    return "?";
}

Point select_successor(const CyclicSystem& sys, const OrderRelation& order,
                       const SelectionStrategy& strategy, const Point& x,
                       std::size_t from_subset, SplitMix64& rng, bool* used_fallback) {
    if (used_fallback) *used_fallback = false;
    Region image = sys.image_of(x, from_subset);

    switch (strategy.kind) {
        case StrategyKind::Nearest:
            return nearest_point(x, image);
        case StrategyKind::OrderGreedy: {
            auto candidates = sample(image, strategy.image_samples, rng.next());
            const Point* best = nullptr;
            double best_d = std::numeric_limits<double>::infinity();
            for (const Point& y : candidates) {
                if (!order.leq(x, y)) continue;
                double d = metric(x, y);
                if (d < best_d) {
                    best_d = d;
                    best = &y;
                }
            }
            if (best) return *best;
            if (used_fallback) *used_fallback = true;
            return nearest_point(x, image);
        }
        case StrategyKind::SeededRandom: {
            auto candidates = sample(image, strategy.image_samples, rng.next());
            return candidates[rng.below(candidates.size())];
        }
    }
    return nearest_point(x, image);
}

Point composite_apply(const CyclicSystem& sys, const OrderRelation& order,
                      const SelectionStrategy& strategy, const Point& x, std::size_t times,
                      std::uint64_t seed) {
    Point current = x;
    if (times == 0) return current;
    SplitMix64 rng(seed);
    std::size_t idx = sys.subset_index(current);
    for (std::size_t t = 0; t < times; ++t) {
        current = select_successor(sys, order, strategy, current, idx, rng);
        idx = sys.next_index(idx);
    }
    return current;
}

Trajectory run_trajectory(const CyclicSystem& sys, const OrderRelation& order,
                          const OrderThresholds& thresholds, const SelectionStrategy& strategy,
                          const Point& x0, std::size_t max_steps, double tol,
                          std::uint64_t seed) {
    validate_point(x0);
    const std::size_t p = sys.subset_count();
    if (max_steps < p) throw std::invalid_argument("run_trajectory: max_steps must be >= p");

    Trajectory traj;
    traj.per_subset.resize(p);
    traj.start_subset = sys.subset_index(x0);
    traj.points.push_back(x0);
    traj.subsets.push_back(traj.start_subset);
    traj.per_subset[traj.start_subset - 1].push_back(0);

    // latest per-subset Cauchy increment; converged once every subset has two
    // elements and every latest increment sits at or below tol
    std::vector<double> latest_increment(p, std::numeric_limits<double>::infinity());

    SplitMix64 rng(derive_seed(seed, 0x5e1ec7));
    Point x = x0;
    std::size_t current = traj.start_subset;

    for (std::size_t n = 0; n < max_steps; ++n) {
        bool fallback = false;
        Point next = select_successor(sys, order, strategy, x, current, rng, &fallback);
        for (double c : next) {
            if (!std::isfinite(c)) {
                throw std::runtime_error("trajectory diverged: non-finite coordinate at step " +
                                         std::to_string(n));
            }
        }
        if (fallback) traj.fallback_steps.push_back(n);

        double d = metric(x, next);
        traj.step_distances.push_back(d);
        traj.order_certified.push_back(induced_by_iteration(thresholds, x, next, true, d));

        current = sys.next_index(current);
        x = std::move(next);
        traj.points.push_back(x);
        traj.subsets.push_back(current);

        auto& slots = traj.per_subset[current - 1];
        slots.push_back(traj.points.size() - 1);
        if (slots.size() >= 2) {
            latest_increment[current - 1] =
                metric(traj.points[slots[slots.size() - 2]], traj.points[slots.back()]);
        }

        bool done = true;
        for (double inc : latest_increment) {
            if (!(inc <= tol)) {
                done = false;
                break;
            }
        }
        if (done) {
            traj.converged = true;
            break;
        }
    }
    return traj;
}

BandRecord quasi_proximity_check(const Trajectory& traj, const CyclicSystem& sys, double tol) {
    BandRecord record;
    const double cap = sys.max_gap();
    record.in_band.reserve(traj.steps());
    for (std::size_t n = 0; n < traj.steps(); ++n) {
        const double d = traj.step_distances[n];
        const double floor = sys.gap(traj.subsets[n]);
        bool below = d < floor - tol;
        bool above = d > cap + tol;
        record.in_band.push_back(!below && !above);
        if (below) record.lower_violations.push_back(n);
        if (!above && !record.entry_step) record.entry_step = n;
        if (record.entry_step && n >= *record.entry_step && above) {
            record.upper_violations.push_back(n);
        }
    }
    record.ok = record.lower_violations.empty() && record.upper_violations.empty();
    return record;
}

ProximityReport convergence_report(const Trajectory& traj, const CyclicSystem& sys,
                                   const OrderRelation& order, const OrderThresholds& thresholds,
                                   const SelectionStrategy& strategy, double tol,
                                   std::uint64_t seed) {
    (void)thresholds;  // certificates were already recorded while iterating
    const std::size_t p = sys.subset_count();
    ProximityReport report;
    report.status = traj.converged ? "converged" : "incomplete";
    report.band = quasi_proximity_check(traj, sys, tol);

    // first step after the last uncertified one: from here on the induction
    // rule fired on every step, so transitivity chains every later pair
    std::size_t first_certified = 0;
    for (std::size_t n = 0; n < traj.steps(); ++n) {
        if (!traj.order_certified[n]) first_certified = n + 1;
    }
    report.first_certified_step = first_certified;
    report.all_steps_certified = first_certified == 0 && traj.steps() > 0;

    report.limits.resize(p);
    for (std::size_t j = 1; j <= p; ++j) {
        SubsetLimit& lim = report.limits[j - 1];
        lim.subset = j;
        const auto& slots = traj.per_subset[j - 1];
        if (slots.empty()) continue;
        lim.limit = traj.points[slots.back()];
        if (slots.size() >= 2) {
            lim.last_increment =
                metric(traj.points[slots[slots.size() - 2]], traj.points[slots.back()]);
            lim.converged = traj.converged && lim.last_increment <= tol;
        }
        std::size_t certified_elements = 0;
        for (std::size_t idx : slots) {
            if (idx >= first_certified) ++certified_elements;
        }
        lim.chain_certified_tail = certified_elements >= 2;
    }

    report.adjacent_limit_distance.assign(p, std::numeric_limits<double>::quiet_NaN());
    report.proximity_residuals.assign(p, std::numeric_limits<double>::quiet_NaN());
    report.composite_residuals.assign(p, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 1; j <= p; ++j) {
        const SubsetLimit& a = report.limits[j - 1];
        const SubsetLimit& b = report.limits[sys.next_index(j) - 1];
        if (a.converged && b.converged) {
            double d = metric(a.limit, b.limit);
            report.adjacent_limit_distance[j - 1] = d;
            report.proximity_residuals[j - 1] = std::abs(d - sys.gap(j));
        }
        if (a.converged) {
            Point back = a.limit;
            SplitMix64 rng(derive_seed(seed, 0xc0421e + j));
            std::size_t idx = j;
            for (std::size_t t = 0; t < p; ++t) {
                back = select_successor(sys, order, strategy, back, idx, rng);
                idx = sys.next_index(idx);
            }
            report.composite_residuals[j - 1] = metric(a.limit, back);
        }
    }

    double spread = 0.0;
    for (double g : sys.gaps()) spread = std::max(spread, std::abs(g - sys.max_gap()));
    report.uniform_gaps = spread <= tol;
    report.intersecting = sys.intersecting();

    if (report.intersecting && traj.converged) {
        report.fixed_point = traj.points.back();
        Region image = sys.image_of(*report.fixed_point, traj.subsets.back());
        report.fixed_point_residual = point_to_set_distance(*report.fixed_point, image);
    }
    return report;
}

Assumption7Report check_assumption7(const CyclicSystem& sys, const OrderRelation& order,
                                    const Trajectory& traj, double tol) {
    if (!traj.converged) {
        throw std::runtime_error("check_assumption7: trajectory did not converge");
    }
    Assumption7Report report;
    const std::size_t p = sys.subset_count();
    std::vector<const Point*> limits(p, nullptr);
    for (std::size_t j = 0; j < p; ++j) {
        if (!traj.per_subset[j].empty()) {
            limits[j] = &traj.points[traj.per_subset[j].back()];
        }
    }
    for (std::size_t n = 0; n < traj.points.size(); ++n) {
        const std::size_t j = traj.subsets[n];
        const Point* limit = limits[j - 1];
        if (!limit) continue;
        double dist = metric(traj.points[n], *limit);
        if (dist <= tol) continue;  // x_n == xbar is excluded
        if (!order.leq(traj.points[n], *limit)) continue;
        ++report.pairs_checked;
        double lhs = hausdorff(sys.image_of(*limit, j), sys.image_of(traj.points[n], j));
        double rhs = sys.constant(j) * dist;
        if (!(lhs > rhs)) {
            report.verdict = Verdict::Fail;
            if (!report.violating_step) report.violating_step = n;
        }
    }
    report.vacuous = report.pairs_checked == 0;
    if (report.vacuous) report.verdict = Verdict::Pass;
    return report;
}

UniquenessProbe uniqueness_probe(const CyclicSystem& sys, const OrderRelation& order,
                                 const OrderThresholds& thresholds,
                                 const SelectionStrategy& strategy,
                                 const std::vector<Point>& seeds, std::size_t max_steps,
                                 double tol, std::uint64_t seed) {
    const std::size_t p = sys.subset_count();
    UniquenessProbe probe;
    probe.max_pairwise.assign(p, 0.0);

    std::vector<std::vector<Point>> limits(p);
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        Trajectory traj = run_trajectory(sys, order, thresholds, strategy, seeds[s], max_steps,
                                         tol, derive_seed(seed, s));
        if (!traj.converged) {
            probe.reliable = false;
            continue;
        }
        for (std::size_t j = 0; j < p; ++j) {
            const auto& slots = traj.per_subset[j];
            if (slots.size() >= 2) limits[j].push_back(traj.points[slots.back()]);
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t a = 0; a < limits[j].size(); ++a) {
            for (std::size_t b = a + 1; b < limits[j].size(); ++b) {
                probe.max_pairwise[j] =
                    std::max(probe.max_pairwise[j], metric(limits[j][a], limits[j][b]));
            }
        }
        probe.worst = std::max(probe.worst, probe.max_pairwise[j]);
    }
    return probe;
}

}  // namespace cyclicbp
