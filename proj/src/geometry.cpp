#include "cyclicbp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cyclicbp/rng.hpp"

namespace cyclicbp {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

double norm(const Point& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

Point clamp_to_box(const Point& x, const Point& lo, const Point& hi) {
    Point out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::clamp(x[i], lo[i], hi[i]);
    return out;
}

// max_{y in box} d(x, y); attained per axis at the farther endpoint
double farthest_box_distance(const Point& x, const Point& lo, const Point& hi) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double g = std::max(std::abs(x[i] - lo[i]), std::abs(x[i] - hi[i]));
        s += g * g;
    }
    return std::sqrt(s);
}

bool is_boxlike(const Region& r) {
    return r.kind() == RegionKind::Interval || r.kind() == RegionKind::Box;
}

// Deterministic cover of a region with a known dispersion bound
// (sup over the region of the distance to the cover). Grid points of the
// bounding box are projected onto the region; projection onto a convex set
// is 1-Lipschitz so the cell-diagonal bound survives it.
struct Cover {
    std::vector<Point> points;
    double dispersion = 0.0;
};

Cover cover(const Region& a, std::size_t target) {
    Cover out;
    if (a.kind() == RegionKind::Cloud) {
        out.points = a.points();
        out.dispersion = 0.0;
        return out;
    }

    Point lo, hi;
    if (is_boxlike(a)) {
        lo = a.lower();
        hi = a.upper();
    } else {  // ball
        lo = a.center();
        hi = a.center();
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] -= a.radius();
            hi[i] += a.radius();
        }
    }

    const std::size_t d = lo.size();
    std::size_t m = static_cast<std::size_t>(
        std::ceil(std::pow(static_cast<double>(std::max<std::size_t>(target, 1)),
                           1.0 / static_cast<double>(d))));
    m = std::max<std::size_t>(m, 1);

    Point width(d);
    double half_diag_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        width[i] = (hi[i] - lo[i]) / static_cast<double>(m);
        half_diag_sq += 0.25 * width[i] * width[i];
    }
    out.dispersion = std::sqrt(half_diag_sq);

    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= m;

    std::vector<std::size_t> idx(d, 0);
    out.points.reserve(total);
    for (std::size_t t = 0; t < total; ++t) {
        Point p(d);
        for (std::size_t i = 0; i < d; ++i) {
            p[i] = lo[i] + (static_cast<double>(idx[i]) + 0.5) * width[i];
        }
        if (a.kind() == RegionKind::Ball) p = nearest_point(p, a);
        out.points.push_back(std::move(p));
        for (std::size_t i = d; i-- > 0;) {
            if (++idx[i] < m) break;
            idx[i] = 0;
        }
    }
    return out;
}

// Enumerate box corners; only used for small dimensions.
std::vector<Point> box_corners(const Point& lo, const Point& hi) {
    const std::size_t d = lo.size();
    std::vector<Point> corners;
    corners.reserve(std::size_t{1} << d);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        Point p(d);
        for (std::size_t i = 0; i < d; ++i) p[i] = (mask >> i) & 1 ? hi[i] : lo[i];
        corners.push_back(std::move(p));
    }
    return corners;
}

constexpr std::size_t kCornerDimLimit = 16;

// sup_{x in a} d(x, b) with a discretization bound when no exact path exists
struct DirectedSup {
    double value = 0.0;
    double dispersion = 0.0;
    bool exact = true;
};

DirectedSup directed_sup(const Region& a, const Region& b, std::size_t grid) {
    DirectedSup out;
    if (a.kind() == RegionKind::Cloud) {
        for (const Point& p : a.points()) {
            out.value = std::max(out.value, point_to_set_distance(p, b));
        }
        return out;
    }
    if (a.kind() == RegionKind::Ball && b.kind() == RegionKind::Ball) {
        out.value = std::max(0.0, metric(a.center(), b.center()) + a.radius() - b.radius());
        return out;
    }
    if (is_boxlike(a) && b.kind() == RegionKind::Ball) {
        out.value = std::max(
            0.0, farthest_box_distance(b.center(), a.lower(), a.upper()) - b.radius());
        return out;
    }
    if (is_boxlike(a) && is_boxlike(b) && a.dim() <= kCornerDimLimit) {
        // the distance-to-a-convex-set function is convex, so its max over a
        // box sits on a corner
        for (const Point& c : box_corners(a.lower(), a.upper())) {
            out.value = std::max(out.value, point_to_set_distance(c, b));
        }
        return out;
    }
    Cover cv = cover(a, grid);
    for (const Point& p : cv.points) {
        out.value = std::max(out.value, point_to_set_distance(p, b));
    }
    out.dispersion = cv.dispersion;  // d(., b) is 1-Lipschitz
    out.exact = false;
    return out;
}

}  // namespace

void validate_point(const Point& x) {
    if (x.empty()) throw std::invalid_argument("point: dimension must be >= 1");
    for (double c : x) {
        if (!std::isfinite(c)) throw std::invalid_argument("point: non-finite coordinate");
    }
}

double metric(const Point& a, const Point& b) {
    require_same_dim(a.size(), b.size(), "metric");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

const char* to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::Interval: return "interval";
        case RegionKind::Box: return "box";
        case RegionKind::Ball: return "ball";
        case RegionKind::Cloud: return "cloud";
    }
    return "?";
}

Region Region::interval(double lower, double upper) {
    Region r;
    r.kind_ = RegionKind::Interval;
    r.dim_ = 1;
    r.lower_ = {lower};
    r.upper_ = {upper};
    validate_point(r.lower_);
    validate_point(r.upper_);
    if (lower > upper) throw std::invalid_argument("interval: lower > upper");
    return r;
}

Region Region::box(Point lower, Point upper) {
    validate_point(lower);
    validate_point(upper);
    require_same_dim(lower.size(), upper.size(), "box");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i]) {
            throw std::invalid_argument("box: lower > upper on axis " + std::to_string(i));
        }
    }
    Region r;
    r.kind_ = RegionKind::Box;
    r.dim_ = lower.size();
    r.lower_ = std::move(lower);
    r.upper_ = std::move(upper);
    return r;
}

Region Region::ball(Point center, double radius) {
    validate_point(center);
    if (!(radius >= 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("ball: radius must be finite and >= 0");
    }
    Region r;
    r.kind_ = RegionKind::Ball;
    r.dim_ = center.size();
    r.center_ = std::move(center);
    r.radius_ = radius;
    return r;
}

Region Region::cloud(std::vector<Point> points) {
    if (points.empty()) throw std::invalid_argument("cloud: needs at least one point");
    validate_point(points.front());
    const std::size_t d = points.front().size();
    for (const Point& p : points) {
        validate_point(p);
        require_same_dim(p.size(), d, "cloud");
    }
    Region r;
    r.kind_ = RegionKind::Cloud;
    r.dim_ = d;
    r.points_ = std::move(points);
    return r;
}

const Point& Region::lower() const {
    if (!is_boxlike(*this)) throw std::logic_error("lower(): not an interval/box");
    return lower_;
}

const Point& Region::upper() const {
    if (!is_boxlike(*this)) throw std::logic_error("upper(): not an interval/box");
    return upper_;
}

const Point& Region::center() const {
    if (kind_ != RegionKind::Ball) throw std::logic_error("center(): not a ball");
    return center_;
}

double Region::radius() const {
    if (kind_ != RegionKind::Ball) throw std::logic_error("radius(): not a ball");
    return radius_;
}

const std::vector<Point>& Region::points() const {
    if (kind_ != RegionKind::Cloud) throw std::logic_error("points(): not a cloud");
    return points_;
}

bool Region::contains(const Point& x, double tol) const {
    return point_to_set_distance(x, *this) <= tol;
}

double point_to_set_distance(const Point& x, const Region& a) {
    require_same_dim(x.size(), a.dim(), "point_to_set_distance");
    switch (a.kind()) {
        case RegionKind::Interval:
        case RegionKind::Box:
            return metric(x, clamp_to_box(x, a.lower(), a.upper()));
        case RegionKind::Ball:
            return std::max(0.0, metric(x, a.center()) - a.radius());
        case RegionKind::Cloud: {
            double best = std::numeric_limits<double>::infinity();
            for (const Point& p : a.points()) best = std::min(best, metric(x, p));
            return best;
        }
    }
    return 0.0;
}

Point nearest_point(const Point& x, const Region& a) {
    require_same_dim(x.size(), a.dim(), "nearest_point");
    switch (a.kind()) {
        case RegionKind::Interval:
        case RegionKind::Box:
            return clamp_to_box(x, a.lower(), a.upper());
        case RegionKind::Ball: {
            double dist = metric(x, a.center());
            if (dist <= a.radius()) return x;
            Point out(x.size());
            double scale = a.radius() / dist;
            for (std::size_t i = 0; i < x.size(); ++i) {
                out[i] = a.center()[i] + scale * (x[i] - a.center()[i]);
            }
            return out;
        }
        case RegionKind::Cloud: {
            std::size_t best = 0;
            double best_d = metric(x, a.points()[0]);
            for (std::size_t i = 1; i < a.points().size(); ++i) {
                double d = metric(x, a.points()[i]);
                if (d < best_d) {  // ties keep the lowest index
                    best_d = d;
                    best = i;
                }
            }
            return a.points()[best];
        }
    }
    return x;
}

double set_distance(const Region& a, const Region& b) {
    require_same_dim(a.dim(), b.dim(), "set_distance");
    if (a.kind() == RegionKind::Cloud) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& p : a.points()) best = std::min(best, point_to_set_distance(p, b));
        return best;
    }
    if (b.kind() == RegionKind::Cloud) return set_distance(b, a);
    if (a.kind() == RegionKind::Ball && b.kind() == RegionKind::Ball) {
        return std::max(0.0, metric(a.center(), b.center()) - a.radius() - b.radius());
    }
    if (a.kind() == RegionKind::Ball) {
        return std::max(0.0, point_to_set_distance(a.center(), b) - a.radius());
    }
    if (b.kind() == RegionKind::Ball) {
        return std::max(0.0, point_to_set_distance(b.center(), a) - b.radius());
    }
    // box/box: per-axis gaps
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double g = std::max({0.0, b.lower()[i] - a.upper()[i], a.lower()[i] - b.upper()[i]});
        s += g * g;
    }
    return std::sqrt(s);
}

double sup_deviation(const Region& a, const Region& b) {
    require_same_dim(a.dim(), b.dim(), "sup_deviation");
    if (a.kind() == RegionKind::Cloud) {
        double worst = 0.0;
        for (const Point& p : a.points()) {
            if (b.kind() == RegionKind::Cloud) {
                for (const Point& q : b.points()) worst = std::max(worst, metric(p, q));
            } else if (b.kind() == RegionKind::Ball) {
                worst = std::max(worst, metric(p, b.center()) + b.radius());
            } else {
                worst = std::max(worst, farthest_box_distance(p, b.lower(), b.upper()));
            }
        }
        return worst;
    }
    if (b.kind() == RegionKind::Cloud) return sup_deviation(b, a);
    if (a.kind() == RegionKind::Ball && b.kind() == RegionKind::Ball) {
        return metric(a.center(), b.center()) + a.radius() + b.radius();
    }
    if (a.kind() == RegionKind::Ball) {
        return farthest_box_distance(a.center(), b.lower(), b.upper()) + a.radius();
    }
    if (b.kind() == RegionKind::Ball) {
        return farthest_box_distance(b.center(), a.lower(), a.upper()) + b.radius();
    }
    // box/box: the sup factors per axis, attained at interval endpoints
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double g = std::max(std::abs(a.upper()[i] - b.lower()[i]),
                            std::abs(b.upper()[i] - a.lower()[i]));
        g = std::max(g, std::abs(a.lower()[i] - b.lower()[i]));
        g = std::max(g, std::abs(a.upper()[i] - b.upper()[i]));
        s += g * g;
    }
    return std::sqrt(s);
}

double diameter(const Region& a) {
    switch (a.kind()) {
        case RegionKind::Interval:
        case RegionKind::Box: {
            Point w(a.dim());
            for (std::size_t i = 0; i < a.dim(); ++i) w[i] = a.upper()[i] - a.lower()[i];
            return norm(w);
        }
        case RegionKind::Ball:
            return 2.0 * a.radius();
        case RegionKind::Cloud: {
            double worst = 0.0;
            const auto& pts = a.points();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                for (std::size_t j = i + 1; j < pts.size(); ++j) {
                    worst = std::max(worst, metric(pts[i], pts[j]));
                }
            }
            return worst;
        }
    }
    return 0.0;
}

HausdorffEstimate hausdorff_detailed(const Region& a, const Region& b, std::size_t grid) {
    require_same_dim(a.dim(), b.dim(), "hausdorff");
    DirectedSup ab = directed_sup(a, b, grid);
    DirectedSup ba = directed_sup(b, a, grid);
    HausdorffEstimate out;
    out.value = std::max(ab.value, ba.value);
    out.dispersion = std::max(ab.dispersion, ba.dispersion);
    out.exact = ab.exact && ba.exact;
    return out;
}

HausdorffEstimate directed_deviation(const Region& a, const Region& b, std::size_t grid) {
    require_same_dim(a.dim(), b.dim(), "directed_deviation");
    DirectedSup sup = directed_sup(a, b, grid);
    return {sup.value, sup.dispersion, sup.exact};
}

double hausdorff(const Region& a, const Region& b) {
    return hausdorff_detailed(a, b).value;
}

SetMetrics set_metrics(const Region& a, const Region& b) {
    SetMetrics m;
    m.distance = set_distance(a, b);
    m.hausdorff = hausdorff(a, b);
    m.sup_deviation = sup_deviation(a, b);
    return m;
}

std::vector<Point> sample(const Region& a, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    std::vector<Point> out;
    SplitMix64 rng(seed);

    switch (a.kind()) {
        case RegionKind::Cloud: {
            std::size_t take = std::min(n, a.points().size());
            out.assign(a.points().begin(), a.points().begin() + take);
            return out;
        }
        case RegionKind::Interval: {
            double lo = a.lower()[0], hi = a.upper()[0];
            if (n == 1) {
                out.push_back({0.5 * (lo + hi)});
                return out;
            }
            for (std::size_t i = 0; i < n; ++i) {
                double t = static_cast<double>(i) / static_cast<double>(n - 1);
                out.push_back({lo + t * (hi - lo)});
            }
            return out;
        }
        case RegionKind::Box: {
            const std::size_t d = a.dim();
            std::size_t m = static_cast<std::size_t>(std::ceil(
                std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d))));
            m = std::max<std::size_t>(m, 1);
            std::size_t total = 1;
            for (std::size_t i = 0; i < d; ++i) total *= m;
            out.reserve(n);
            // one jittered point per selected cell; cells spread evenly over
            // the lexicographic enumeration so the whole box is covered even
            // when n < m^d
            for (std::size_t t = 0; t < n; ++t) {
                std::size_t cell = static_cast<std::size_t>(
                    static_cast<double>(t) * static_cast<double>(total) /
                    static_cast<double>(n));
                Point p(d);
                std::size_t rem = cell;
                for (std::size_t i = d; i-- > 0;) {
                    std::size_t ci = rem % m;
                    rem /= m;
                    double w = (a.upper()[i] - a.lower()[i]) / static_cast<double>(m);
                    p[i] = a.lower()[i] + (static_cast<double>(ci) + rng.uniform()) * w;
                }
                out.push_back(std::move(p));
            }
            return out;
        }
        case RegionKind::Ball: {
            const std::size_t d = a.dim();
            if (a.radius() <= 0.0) {
                out.assign(n, a.center());
                return out;
            }
            out.reserve(n);
            std::size_t attempts = 0;
            const std::size_t max_attempts = 1000 * n;
            while (out.size() < n) {
                Point p(d);
                double s = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    double u = 2.0 * rng.uniform() - 1.0;
                    p[i] = a.center()[i] + u * a.radius();
                    s += u * u;
                }
                if (s <= 1.0) {
                    out.push_back(std::move(p));
                } else if (++attempts > max_attempts) {
                    out.push_back(nearest_point(p, a));  // degenerate acceptance rates
                }
            }
            return out;
        }
    }
    return out;
}

}  // namespace cyclicbp
