#include "cyclicbp/order.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cyclicbp {

namespace {

bool points_match(const Point& a, const Point& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

}  // namespace

const char* to_string(OrderKind kind) {
    switch (kind) {
        case OrderKind::Componentwise: return "componentwise";
        case OrderKind::ScalarCoordinate: return "scalar_coordinate";
        case OrderKind::CustomTable: return "custom_table";
    }
    return "?";
}

OrderRelation OrderRelation::componentwise() {
    OrderRelation o;
    o.kind_ = OrderKind::Componentwise;
    return o;
}

OrderRelation OrderRelation::scalar_coordinate(std::size_t axis) {
    OrderRelation o;
    o.kind_ = OrderKind::ScalarCoordinate;
    o.axis_ = axis;
    return o;
}

OrderRelation OrderRelation::custom_table(std::vector<std::pair<Point, Point>> pairs,
                                          bool transitive_closure, bool strict,
                                          double match_tol) {
    for (const auto& [x, y] : pairs) {
        validate_point(x);
        validate_point(y);
        if (x.size() != y.size()) {
            throw std::invalid_argument("custom_table: pair with mismatched dimensions");
        }
    }
    OrderRelation o;
    o.kind_ = OrderKind::CustomTable;
    o.strict_ = strict;
    o.match_tol_ = match_tol;
    o.pairs_ = std::move(pairs);

    if (transitive_closure) {
        // Floyd-Warshall over the distinct points of the table.
        std::vector<Point> nodes;
        auto node_id = [&](const Point& p) -> std::size_t {
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (points_match(nodes[i], p, match_tol)) return i;
            }
            nodes.push_back(p);
            return nodes.size() - 1;
        };
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (const auto& [x, y] : o.pairs_) edges.emplace_back(node_id(x), node_id(y));
        const std::size_t n = nodes.size();
        std::vector<bool> reach(n * n, false);
        for (auto [u, v] : edges) reach[u * n + v] = true;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!reach[i * n + k]) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (reach[k * n + j]) reach[i * n + j] = true;
                }
            }
        }
        std::vector<std::pair<Point, Point>> closed;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (reach[i * n + j]) closed.emplace_back(nodes[i], nodes[j]);
            }
        }
        o.pairs_ = std::move(closed);
    }
    return o;
}

bool OrderRelation::leq(const Point& x, const Point& y) const {
    validate_point(x);
    validate_point(y);
    if (x.size() != y.size()) {
        throw std::invalid_argument("leq: dimension mismatch (" + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()) + ")");
    }
    switch (kind_) {
        case OrderKind::Componentwise:
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] > y[i]) return false;
            }
            return true;
        case OrderKind::ScalarCoordinate:
            if (axis_ >= x.size()) {
                throw std::invalid_argument("leq: axis out of range");
            }
            return x[axis_] <= y[axis_];
        case OrderKind::CustomTable:
            if (!strict_ && points_match(x, y, match_tol_)) return true;
            for (const auto& [a, b] : pairs_) {
                if (points_match(a, x, match_tol_) && points_match(b, y, match_tol_)) {
                    return true;
                }
            }
            return false;
    }
    return false;
}

void OrderThresholds::validate(std::size_t p) const {
    if (!(d0 > 0.0)) throw std::invalid_argument("thresholds: d0 must be > 0");
    if (d0i.size() != p) {
        throw std::invalid_argument("thresholds: d0i must have exactly " + std::to_string(p) +
                                    " entries, got " + std::to_string(d0i.size()));
    }
    for (double v : d0i) {
        if (!(v > 0.0)) throw std::invalid_argument("thresholds: every d0i must be > 0");
    }
}

bool induced_by_iteration(const OrderThresholds& thresholds, const Point& x, const Point& y,
                          bool y_in_image, double dist) {
    validate_point(x);
    validate_point(y);
    if (x.size() != y.size()) {
        throw std::invalid_argument("induced_by_iteration: dimension mismatch");
    }
    return y_in_image && dist < thresholds.d0;  // boundary dist == d0 does not induce
}

ChainCheck verify_chain(const OrderRelation& order, const std::vector<Point>& seq) {
    if (seq.empty()) throw std::invalid_argument("verify_chain: empty sequence");
    for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
        if (!order.leq(seq[t], seq[t + 1])) return {false, t};
    }
    return {true, 0};
}

}  // namespace cyclicbp
