#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cyclicbp {

/// A point of R^d, d >= 1, all coordinates finite.
using Point = std::vector<double>;

/// Absolute tolerance for zero/equality comparisons unless a caller overrides it.
inline constexpr double kDefaultTol = 1e-9;

/// Throws std::invalid_argument when x is empty or has a non-finite coordinate.
void validate_point(const Point& x);

/// Euclidean distance. Throws std::invalid_argument on dimension mismatch.
double metric(const Point& a, const Point& b);

enum class RegionKind { Interval, Box, Ball, Cloud };

const char* to_string(RegionKind kind);

/// A nonempty compact subset of R^d: a 1-d interval, an axis-aligned box,
/// a closed Euclidean ball, or a finite point cloud. All four kinds are
/// bounded and closed by construction; all except multi-point clouds are
/// convex.
class Region {
public:
    static Region interval(double lower, double upper);
    static Region box(Point lower, Point upper);
    static Region ball(Point center, double radius);
    static Region cloud(std::vector<Point> points);

    RegionKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    bool convex() const { return kind_ != RegionKind::Cloud || points_.size() == 1; }

    const Point& lower() const;   // interval/box
    const Point& upper() const;   // interval/box
    const Point& center() const;  // ball
    double radius() const;        // ball
    const std::vector<Point>& points() const;  // cloud

    bool contains(const Point& x, double tol = kDefaultTol) const;

private:
    Region() = default;

    RegionKind kind_ = RegionKind::Interval;
    std::size_t dim_ = 0;
    Point lower_, upper_;   // interval/box
    Point center_;          // ball
    double radius_ = 0.0;   // ball
    std::vector<Point> points_;  // cloud
};

/// inf_{a in A} d(x, a). Exact for every region kind.
double point_to_set_distance(const Point& x, const Region& a);

/// A point of A attaining point_to_set_distance(x, A). Boxes clamp per axis,
/// balls project radially, clouds break ties by lowest index.
Point nearest_point(const Point& x, const Region& a);

/// inf over A x B of the metric. Exact for every kind pair.
double set_distance(const Region& a, const Region& b);

/// sup over A x B of the metric. Symmetric; exact for every kind pair.
double sup_deviation(const Region& a, const Region& b);

/// sup_deviation(A, A): box diagonal, 2r for balls, max pairwise for clouds.
double diameter(const Region& a);

/// Hausdorff value together with its discretization bound: the true value
/// lies in [value, value + dispersion]. dispersion == 0 on exact paths
/// (cloud/cloud, ball/ball, box->ball, small-dimension box/box, ...).
struct HausdorffEstimate {
    double value = 0.0;
    double dispersion = 0.0;
    bool exact = true;
};

HausdorffEstimate hausdorff_detailed(const Region& a, const Region& b,
                                     std::size_t grid = 4096);

/// One-sided deviation sup_{x in a} d(x, b), same bound semantics.
HausdorffEstimate directed_deviation(const Region& a, const Region& b,
                                     std::size_t grid = 4096);

/// max(sup_{x in A} d(x,B), sup_{y in B} d(y,A)).
double hausdorff(const Region& a, const Region& b);

struct SetMetrics {
    double distance = 0.0;       // D of the pair
    double hausdorff = 0.0;      // H of the pair
    double sup_deviation = 0.0;  // delta of the pair
};

/// All three set metrics at once; distance <= hausdorff <= sup_deviation.
SetMetrics set_metrics(const Region& a, const Region& b);

/// Deterministic sample of n member points: uniform grid with endpoints for
/// intervals, stratified grid + jitter for boxes, seeded rejection from the
/// bounding box for balls, the points themselves for clouds (n capped at the
/// cloud size). Identical (region, n, seed) always yields identical output.
std::vector<Point> sample(const Region& a, std::size_t n, std::uint64_t seed);

}  // namespace cyclicbp
