#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cyclicbp/geometry.hpp"

namespace cyclicbp {

enum class OrderKind { Componentwise, ScalarCoordinate, CustomTable };

const char* to_string(OrderKind kind);

/// A partial order on R^d. Componentwise is the default order of the
/// library; scalar-coordinate compares a single axis; custom-table holds an
/// explicit list of ordered pairs (matched within a tolerance), optionally
/// closed under transitivity. Unless `strict` is set, every relation is
/// reflexively closed: leq(x, x) is always true.
class OrderRelation {
public:
    static OrderRelation componentwise();
    static OrderRelation scalar_coordinate(std::size_t axis);
    static OrderRelation custom_table(std::vector<std::pair<Point, Point>> pairs,
                                      bool transitive_closure = false,
                                      bool strict = false,
                                      double match_tol = kDefaultTol);

    OrderKind kind() const { return kind_; }
    std::size_t axis() const { return axis_; }
    bool strict() const { return strict_; }

    /// True iff x precedes-or-equals y. Throws on dimension mismatch.
    bool leq(const Point& x, const Point& y) const;

private:
    OrderRelation() = default;

    OrderKind kind_ = OrderKind::Componentwise;
    std::size_t axis_ = 0;
    bool strict_ = false;
    double match_tol_ = kDefaultTol;
    std::vector<std::pair<Point, Point>> pairs_;
};

/// The distance thresholds driving order induction: the global d0 plus the
/// per-subset d0i (intended to satisfy d0i > D_i).
struct OrderThresholds {
    double d0 = 0.0;
    std::vector<double> d0i;

    /// Throws std::invalid_argument unless d0 > 0, every d0i > 0, and
    /// d0i has exactly p entries.
    void validate(std::size_t p) const;
};

/// The order-induction rule: x precedes y whenever y lies in the image of x
/// and d(x, y) < d0 (strict). `dist` must be metric(x, y).
bool induced_by_iteration(const OrderThresholds& thresholds, const Point& x,
                          const Point& y, bool y_in_image, double dist);

struct ChainCheck {
    bool ordered = true;
    std::size_t first_violation = 0;  // meaningful only when !ordered
};

/// Checks that seq is a nondecreasing chain: leq(seq[t], seq[t+1]) for all t.
ChainCheck verify_chain(const OrderRelation& order, const std::vector<Point>& seq);

}  // namespace cyclicbp
