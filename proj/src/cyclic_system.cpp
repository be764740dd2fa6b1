#include "cyclicbp/cyclic_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cyclicbp/rng.hpp"

namespace cyclicbp {

Matrix Matrix::identity(std::size_t n) {
    Matrix m;
    m.rows = m.cols = n;
    m.data.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m.data[i * n + i] = 1.0;
    return m;
}

Matrix Matrix::uniform_scaling(std::size_t n, double s) {
    Matrix m = identity(n);
    for (std::size_t i = 0; i < n; ++i) m.data[i * n + i] = s;
    return m;
}

Point Matrix::apply(const Point& x) const {
    if (x.size() != cols) throw std::invalid_argument("matrix apply: dimension mismatch");
    Point out(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) s += data[r * cols + c] * x[c];
        out[r] = s;
    }
    return out;
}

const char* to_string(MapKind kind) {
    switch (kind) {
        case MapKind::AffineTarget: return "affine_target";
        case MapKind::BallValued: return "ball_valued";
        case MapKind::Table: return "table";
    }
    return "?";
}

const char* to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Vacuous: return "VACUOUS";
    }
    return "?";
}

CyclicSystem::CyclicSystem(std::vector<Region> subsets, MultiMap map,
                           std::vector<double> constants, double tol)
    : subsets_(std::move(subsets)),
      map_(std::move(map)),
      constants_(std::move(constants)),
      tol_(tol) {
    if (subsets_.empty()) throw std::invalid_argument("cyclic system: needs p >= 1 subsets");
    const std::size_t d = subsets_.front().dim();
    for (const Region& r : subsets_) {
        if (r.dim() != d) throw std::invalid_argument("cyclic system: mixed subset dimensions");
    }
    const std::size_t p = subsets_.size();
    if (constants_.size() != p) {
        throw std::invalid_argument("cyclic system: expected " + std::to_string(p) +
                                    " constants, got " + std::to_string(constants_.size()));
    }
    product_ = 1.0;
    for (double k : constants_) {
        if (!(k >= 0.0) || !std::isfinite(k)) {
            throw std::invalid_argument("cyclic system: constants must be finite and >= 0");
        }
        product_ *= k;
    }
    if (!(product_ < 1.0)) {
        throw std::invalid_argument("cyclic system: product of constants >= 1");
    }
    if (map_.piece_count() != p) {
        throw std::invalid_argument("cyclic system: map needs one piece per subset");
    }
    if (map_.kind != MapKind::Table) {
        for (const AffinePiece& piece : map_.pieces) {
            validate_point(piece.offset);
            validate_point(piece.anchor);
            if (piece.offset.size() != d || piece.anchor.size() != d ||
                piece.linear.rows != d || piece.linear.cols != d) {
                throw std::invalid_argument("cyclic system: map piece dimension mismatch");
            }
            if (piece.radius < 0.0) {
                throw std::invalid_argument("cyclic system: negative image radius");
            }
        }
    } else {
        for (const auto& entries : map_.table) {
            if (entries.empty()) {
                throw std::invalid_argument("cyclic system: empty table piece");
            }
            for (const TableEntry& e : entries) {
                validate_point(e.from);
                if (e.from.size() != d || e.image.dim() != d) {
                    throw std::invalid_argument("cyclic system: table entry dimension mismatch");
                }
            }
        }
    }

    gaps_.resize(p);
    max_gap_ = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        gaps_[i] = set_distance(subsets_[i], subsets_[(i + 1) % p]);
        max_gap_ = std::max(max_gap_, gaps_[i]);
    }
}

std::size_t CyclicSystem::subset_index(const Point& x) const {
    validate_point(x);
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
        if (point_to_set_distance(x, subsets_[i]) <= tol_) return i + 1;
    }
    throw std::runtime_error("outside cyclic union");
}

Region CyclicSystem::image_of(const Point& x, std::size_t i) const {
    if (i < 1 || i > subsets_.size()) throw std::invalid_argument("image_of: bad subset index");
    if (map_.kind == MapKind::Table) {
        const auto& entries = map_.table[i - 1];
        for (const TableEntry& e : entries) {
            if (metric(e.from, x) <= map_.table_match_tol) return e.image;
        }
        throw std::runtime_error("table map: point has no entry in subset " + std::to_string(i));
    }
    const AffinePiece& piece = map_.pieces[i - 1];
    Point shifted(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) shifted[c] = x[c] - piece.anchor[c];
    Point target = piece.linear.apply(shifted);
    for (std::size_t c = 0; c < target.size(); ++c) {
        target[c] += piece.offset[c];
        if (!std::isfinite(target[c])) {
            throw std::runtime_error("map image has non-finite coordinates");
        }
    }
    if (map_.kind == MapKind::BallValued && piece.radius > 0.0) {
        return Region::ball(std::move(target), piece.radius);
    }
    return Region::cloud({std::move(target)});
}

std::pair<Region, std::size_t> CyclicSystem::apply(const Point& x) const {
    std::size_t i = subset_index(x);
    return {image_of(x, i), next_index(i)};
}

bool CyclicSystem::intersecting() const {
    for (double g : gaps_) {
        if (g > tol_) return false;
    }
    return true;
}

ContractionReport check_contraction(const CyclicSystem& sys, const OrderRelation& order,
                                    std::size_t samples_per_subset, std::uint64_t seed) {
    const std::size_t p = sys.subset_count();
    ContractionReport report;
    report.min_slack = std::numeric_limits<double>::infinity();

    bool any_pairs = false;
    bool any_fail = false;
    for (std::size_t i = 1; i <= p; ++i) {
        const std::size_t j = sys.next_index(i);
        auto xs = sample(sys.subset(i), samples_per_subset, derive_seed(seed, i));
        auto ys = sample(sys.subset(j), samples_per_subset, derive_seed(seed, p + j));

        ContractionSubsetResult sub;
        sub.subset = i;
        sub.min_slack = std::numeric_limits<double>::infinity();
        const double k = sys.constant(i);
        const double gap = sys.gap(i);
        for (const Point& x : xs) {
            Region tx = sys.image_of(x, i);
            for (const Point& y : ys) {
                if (!order.leq(x, y)) continue;
                Region ty = sys.image_of(y, j);
                double bound = k * metric(x, y) + (1.0 - k) * gap;
                double slack = bound - hausdorff(tx, ty);
                ++sub.pairs_checked;
                if (slack < sub.min_slack) sub.min_slack = slack;
                if (slack < report.min_slack) {
                    report.min_slack = slack;
                    report.worst = PairWitness{i, x, y, slack};
                }
            }
        }
        if (sub.pairs_checked == 0) {
            sub.verdict = Verdict::Vacuous;
        } else {
            any_pairs = true;
            sub.verdict = sub.min_slack >= -sys.tol() ? Verdict::Pass : Verdict::Fail;
            if (sub.verdict == Verdict::Fail) any_fail = true;
        }
        report.per_subset.push_back(std::move(sub));
    }
    if (!any_pairs) {
        report.verdict = Verdict::Vacuous;
        report.min_slack = 0.0;
    } else {
        report.verdict = any_fail ? Verdict::Fail : Verdict::Pass;
    }
    return report;
}

Assumption3Report check_assumption3(const CyclicSystem& sys, const OrderThresholds& thresholds,
                                    std::size_t samples_per_subset, std::uint64_t seed) {
    thresholds.validate(sys.subset_count());
    Assumption3Report report;
    for (std::size_t i = 1; i <= sys.subset_count(); ++i) {
        const double d0i = thresholds.d0i[i - 1];
        if (!(d0i > sys.gap(i))) continue;  // the assumption demands d0i > D_i
        for (const Point& x : sample(sys.subset(i), samples_per_subset, derive_seed(seed, i))) {
            Region image = sys.image_of(x, i);
            Point candidate = nearest_point(x, image);
            double dist = metric(x, candidate);
            if (dist < d0i) {
                report.verdict = Verdict::Pass;
                report.subset = i;
                report.x = x;
                report.successor = std::move(candidate);
                report.distance = dist;
                return report;
            }
        }
    }
    report.verdict = Verdict::Fail;
    return report;
}

ThresholdReport check_assumption4(const CyclicSystem& sys, const OrderThresholds& thresholds) {
    thresholds.validate(sys.subset_count());
    double required = 0.0;
    for (std::size_t j = 1; j <= sys.subset_count(); ++j) {
        const double d0j = thresholds.d0i[j - 1];
        required = std::max(required, d0j);
        required = std::max(required, sys.constant(j) * (d0j - sys.gap(j)) + sys.gap(j));
    }
    ThresholdReport report;
    report.required = required;
    report.actual = thresholds.d0;
    report.verdict = thresholds.d0 >= required ? Verdict::Pass : Verdict::Fail;
    return report;
}

ThresholdReport check_assumption5(const CyclicSystem& sys, const OrderThresholds& thresholds) {
    thresholds.validate(sys.subset_count());
    double required = 0.0;
    for (std::size_t j = 1; j <= sys.subset_count(); ++j) {
        const double d0j = thresholds.d0i[j - 1];
        required = std::max(required, sys.gap(j) + diameter(sys.subset(j)));
        required = std::max(required, sys.constant(j) * (d0j - sys.gap(j)) + sys.gap(j));
    }
    ThresholdReport report;
    report.required = required;
    report.actual = thresholds.d0;
    report.verdict = thresholds.d0 > required ? Verdict::Pass : Verdict::Fail;  // strict
    return report;
}

ContainmentReport check_containment(const CyclicSystem& sys, std::size_t samples_per_subset,
                                    std::uint64_t seed) {
    ContainmentReport report;
    for (std::size_t i = 1; i <= sys.subset_count(); ++i) {
        const Region& target = sys.subset(sys.next_index(i));
        for (const Point& x : sample(sys.subset(i), samples_per_subset, derive_seed(seed, i))) {
            Region image = sys.image_of(x, i);
            // one-sided deviation of the whole image from the target subset
            double excess = directed_deviation(image, target, 256).value;
            ++report.samples_checked;
            if (excess > report.worst_excess) {
                report.worst_excess = excess;
                report.witness = {i, x};
            }
        }
    }
    report.verdict = report.worst_excess <= sys.tol() ? Verdict::Pass : Verdict::Fail;
    return report;
}

}  // namespace cyclicbp
