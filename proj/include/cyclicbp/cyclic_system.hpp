#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cyclicbp/geometry.hpp"
#include "cyclicbp/order.hpp"

namespace cyclicbp {

/// Small dense matrix, row-major. Only what affine map pieces need.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    static Matrix identity(std::size_t n);
    static Matrix uniform_scaling(std::size_t n, double s);

    Point apply(const Point& x) const;
};

enum class MapKind { AffineTarget, BallValued, Table };

const char* to_string(MapKind kind);

/// One affine piece: x in A_i maps to the point offset + linear * (x - anchor),
/// or to the ball of that center and `radius` when the map is ball-valued.
struct AffinePiece {
    Point offset;
    Matrix linear;
    Point anchor;
    double radius = 0.0;
};

/// Table piece entry: an explicit image region for one domain point.
struct TableEntry {
    Point from;
    Region image;
};

/// The multivalued map, one piece per subset.
struct MultiMap {
    MapKind kind = MapKind::AffineTarget;
    std::vector<AffinePiece> pieces;             // affine-target / ball-valued
    std::vector<std::vector<TableEntry>> table;  // table kind
    double table_match_tol = kDefaultTol;

    std::size_t piece_count() const {
        return kind == MapKind::Table ? table.size() : pieces.size();
    }
};

/// The p-cyclic system: subsets A_1..A_p, the multivalued map T with
/// T(A_i) restricted into A_{i+1}, the declared contraction constants k_i,
/// and the cached adjacent set distances D_i. Subset indices are 1-based
/// with cyclic wraparound (A_{p+1} = A_1). Immutable after construction.
class CyclicSystem {
public:
    /// Throws std::invalid_argument when the subsets disagree in dimension,
    /// the piece count differs from p, any k_i < 0, or the product of the
    /// constants is >= 1.
    CyclicSystem(std::vector<Region> subsets, MultiMap map, std::vector<double> constants,
                 double tol = kDefaultTol);

    std::size_t subset_count() const { return subsets_.size(); }
    const Region& subset(std::size_t i) const { return subsets_.at(i - 1); }
    double constant(std::size_t i) const { return constants_.at(i - 1); }
    const std::vector<double>& constants() const { return constants_; }
    double constants_product() const { return product_; }
    double gap(std::size_t i) const { return gaps_.at(i - 1); }           // D_i
    const std::vector<double>& gaps() const { return gaps_; }
    double max_gap() const { return max_gap_; }                           // D
    double tol() const { return tol_; }
    const MultiMap& map() const { return map_; }
    std::size_t dim() const { return subsets_.front().dim(); }

    /// 1-based cyclic successor index.
    std::size_t next_index(std::size_t i) const { return i % subsets_.size() + 1; }

    /// Smallest i with point_to_set_distance(x, A_i) <= tol.
    /// Throws std::runtime_error("outside cyclic union") when there is none.
    std::size_t subset_index(const Point& x) const;

    /// The image T x of x treated as a member of A_i.
    Region image_of(const Point& x, std::size_t i) const;

    /// Image of x plus the target subset index (subset_index(x) advanced by one).
    std::pair<Region, std::size_t> apply(const Point& x) const;

    /// True when all adjacent gaps vanish (the subsets intersect pairwise
    /// along the cycle).
    bool intersecting() const;

private:
    std::vector<Region> subsets_;
    MultiMap map_;
    std::vector<double> constants_;
    std::vector<double> gaps_;
    double max_gap_ = 0.0;
    double product_ = 0.0;
    double tol_ = kDefaultTol;
};

enum class Verdict { Pass, Fail, Vacuous };

const char* to_string(Verdict verdict);

/// Worst sampled pair of a contraction scan.
struct PairWitness {
    std::size_t subset = 0;  // the i of the pair (x in A_i, y in A_{i+1})
    Point x, y;
    double slack = 0.0;  // k_i d(x,y) + (1-k_i) D_i - H(Tx, Ty)
};

struct ContractionSubsetResult {
    std::size_t subset = 0;
    Verdict verdict = Verdict::Vacuous;
    std::size_t pairs_checked = 0;
    double min_slack = 0.0;  // meaningful only when pairs_checked > 0
};

/// Sample-based certificate for the cyclic contraction inequality
/// H(Tx, Ty) <= k_i d(x, y) + (1 - k_i) D_i over ordered pairs.
struct ContractionReport {
    Verdict verdict = Verdict::Vacuous;
    double min_slack = 0.0;
    std::optional<PairWitness> worst;
    std::vector<ContractionSubsetResult> per_subset;
};

ContractionReport check_contraction(const CyclicSystem& sys, const OrderRelation& order,
                                    std::size_t samples_per_subset, std::uint64_t seed);

/// Existence of a seed pair x_i, x_{i+1} in T x_i with d < d0i[i] and d0i[i] > D_i.
struct Assumption3Report {
    Verdict verdict = Verdict::Fail;
    std::size_t subset = 0;  // witness fields meaningful only on Pass
    Point x, successor;
    double distance = 0.0;
};

Assumption3Report check_assumption3(const CyclicSystem& sys, const OrderThresholds& thresholds,
                                    std::size_t samples_per_subset, std::uint64_t seed);

/// d0 against the required lower bound (assumption 4: >=, assumption 5: strict >).
struct ThresholdReport {
    Verdict verdict = Verdict::Fail;
    double required = 0.0;
    double actual = 0.0;
};

ThresholdReport check_assumption4(const CyclicSystem& sys, const OrderThresholds& thresholds);
ThresholdReport check_assumption5(const CyclicSystem& sys, const OrderThresholds& thresholds);

/// Sampled verification that T(A_i) stays inside A_{i+1}.
struct ContainmentReport {
    Verdict verdict = Verdict::Pass;
    std::size_t samples_checked = 0;
    double worst_excess = 0.0;  // max distance of an image point from the target subset
    std::optional<std::pair<std::size_t, Point>> witness;  // subset + offending source point
};

ContainmentReport check_containment(const CyclicSystem& sys, std::size_t samples_per_subset,
                                    std::uint64_t seed);

}  // namespace cyclicbp
