#include "cyclicbp/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace cyclicbp {

using nlohmann::json;

std::string format_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ScenarioError("scenario field \"" + path + "\": " + message);
}

const json& field(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing required field \"") + key + "\"");
    return *it;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) fail(path, "unknown field \"" + it.key() + "\"");
    }
}

double parse_real(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::size_t parse_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected an integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) fail(path, "expected >= 0");
    return v.get<std::uint64_t>();
}

Point parse_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a nonempty number array");
    Point p;
    p.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        p.push_back(parse_real(v[i], path + "[" + std::to_string(i) + "]"));
    }
    try {
        validate_point(p);
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
    return p;
}

std::vector<double> parse_reals(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected a number array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(parse_real(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Region parse_region(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    std::string kind = field(v, "kind", path).get<std::string>();
    try {
        if (kind == "interval") {
            reject_unknown(v, {"kind", "lower", "upper"}, path);
            return Region::interval(parse_real(field(v, "lower", path), path + ".lower"),
                                    parse_real(field(v, "upper", path), path + ".upper"));
        }
        if (kind == "box") {
            reject_unknown(v, {"kind", "lower", "upper"}, path);
            return Region::box(parse_point(field(v, "lower", path), path + ".lower"),
                               parse_point(field(v, "upper", path), path + ".upper"));
        }
        if (kind == "ball") {
            reject_unknown(v, {"kind", "center", "radius"}, path);
            return Region::ball(parse_point(field(v, "center", path), path + ".center"),
                                parse_real(field(v, "radius", path), path + ".radius"));
        }
        if (kind == "cloud") {
            reject_unknown(v, {"kind", "points"}, path);
            const json& pts = field(v, "points", path);
            if (!pts.is_array() || pts.empty()) fail(path + ".points", "expected point array");
            std::vector<Point> points;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                points.push_back(parse_point(pts[i], path + ".points[" + std::to_string(i) + "]"));
            }
            return Region::cloud(std::move(points));
        }
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown region kind \"" + kind + "\"");
}

Matrix parse_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a row array");
    Matrix m;
    m.rows = v.size();
    for (std::size_t r = 0; r < v.size(); ++r) {
        std::vector<double> row = parse_reals(v[r], path + "[" + std::to_string(r) + "]");
        if (r == 0) m.cols = row.size();
        if (row.size() != m.cols) fail(path, "ragged matrix rows");
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    return m;
}

MultiMap parse_map(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    std::string kind = field(v, "kind", path).get<std::string>();
    MultiMap map;
    if (kind == "affine_target" || kind == "ball_valued") {
        map.kind = kind == "ball_valued" ? MapKind::BallValued : MapKind::AffineTarget;
        reject_unknown(v, {"kind", "pieces"}, path);
        const json& pieces = field(v, "pieces", path);
        if (!pieces.is_array()) fail(path + ".pieces", "expected an array");
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            std::string ppath = path + ".pieces[" + std::to_string(i) + "]";
            const json& pv = pieces[i];
            AffinePiece piece;
            if (map.kind == MapKind::BallValued) {
                reject_unknown(pv, {"offset", "matrix", "anchor", "radius"}, ppath);
                piece.radius = parse_real(field(pv, "radius", ppath), ppath + ".radius");
                if (piece.radius < 0.0) fail(ppath + ".radius", "expected >= 0");
            } else {
                reject_unknown(pv, {"offset", "matrix", "anchor"}, ppath);
            }
            piece.offset = parse_point(field(pv, "offset", ppath), ppath + ".offset");
            piece.linear = parse_matrix(field(pv, "matrix", ppath), ppath + ".matrix");
            piece.anchor = parse_point(field(pv, "anchor", ppath), ppath + ".anchor");
            map.pieces.push_back(std::move(piece));
        }
        return map;
    }
    if (kind == "table") {
        map.kind = MapKind::Table;
        reject_unknown(v, {"kind", "pieces", "match_tol"}, path);
        if (v.contains("match_tol")) {
            map.table_match_tol = parse_real(v["match_tol"], path + ".match_tol");
        }
        const json& pieces = field(v, "pieces", path);
        if (!pieces.is_array()) fail(path + ".pieces", "expected an array");
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            std::string ppath = path + ".pieces[" + std::to_string(i) + "]";
            reject_unknown(pieces[i], {"entries"}, ppath);
            const json& entries = field(pieces[i], "entries", ppath);
            if (!entries.is_array() || entries.empty()) {
                fail(ppath + ".entries", "expected a nonempty array");
            }
            std::vector<TableEntry> parsed;
            for (std::size_t e = 0; e < entries.size(); ++e) {
                std::string epath = ppath + ".entries[" + std::to_string(e) + "]";
                reject_unknown(entries[e], {"from", "image"}, epath);
                parsed.push_back(
                    TableEntry{parse_point(field(entries[e], "from", epath), epath + ".from"),
                               parse_region(field(entries[e], "image", epath), epath + ".image")});
            }
            map.table.push_back(std::move(parsed));
        }
        return map;
    }
    fail(path + ".kind", "unknown map kind \"" + kind + "\"");
}

OrderSpec parse_order(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    std::string kind = field(v, "kind", path).get<std::string>();
    OrderSpec spec;
    if (kind == "componentwise") {
        reject_unknown(v, {"kind"}, path);
        spec.kind = OrderKind::Componentwise;
        return spec;
    }
    if (kind == "scalar_coordinate") {
        reject_unknown(v, {"kind", "axis"}, path);
        spec.kind = OrderKind::ScalarCoordinate;
        spec.axis = parse_count(field(v, "axis", path), path + ".axis");
        return spec;
    }
    if (kind == "custom_table") {
        reject_unknown(v, {"kind", "pairs", "transitive_closure", "strict"}, path);
        spec.kind = OrderKind::CustomTable;
        const json& pairs = field(v, "pairs", path);
        if (!pairs.is_array()) fail(path + ".pairs", "expected an array");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            std::string ppath = path + ".pairs[" + std::to_string(i) + "]";
            if (!pairs[i].is_array() || pairs[i].size() != 2) {
                fail(ppath, "expected a [x, y] pair");
            }
            spec.pairs.emplace_back(parse_point(pairs[i][0], ppath + "[0]"),
                                    parse_point(pairs[i][1], ppath + "[1]"));
        }
        if (v.contains("transitive_closure")) {
            if (!v["transitive_closure"].is_boolean()) {
                fail(path + ".transitive_closure", "expected a boolean");
            }
            spec.transitive_closure = v["transitive_closure"].get<bool>();
        }
        if (v.contains("strict")) {
            if (!v["strict"].is_boolean()) fail(path + ".strict", "expected a boolean");
            spec.strict = v["strict"].get<bool>();
        }
        return spec;
    }
    fail(path + ".kind", "unknown order kind \"" + kind + "\"");
}

SelectionStrategy parse_strategy(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    reject_unknown(v, {"kind", "image_samples"}, path);
    std::string kind = field(v, "kind", path).get<std::string>();
    SelectionStrategy strategy;
    if (kind == "nearest") {
        strategy.kind = StrategyKind::Nearest;
    } else if (kind == "order_greedy") {
        strategy.kind = StrategyKind::OrderGreedy;
    } else if (kind == "seeded_random") {
        strategy.kind = StrategyKind::SeededRandom;
    } else {
        fail(path + ".kind", "unknown strategy kind \"" + kind + "\"");
    }
    if (v.contains("image_samples")) {
        strategy.image_samples = parse_count(v["image_samples"], path + ".image_samples");
        if (strategy.image_samples == 0) fail(path + ".image_samples", "expected >= 1");
    }
    return strategy;
}

std::string fmt_point(const Point& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ", ";
        out += format_number(p[i]);
    }
    return out + ")";
}

std::string fmt_reals(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_number(v[i]);
    }
    return out + "]";
}

std::string json_point(const Point& p) {
    std::string out = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ",";
        out += format_number(p[i]);
    }
    return out + "]";
}

std::string json_reals(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_number(v[i]);
    }
    return out + "]";
}

std::string json_counts(const std::vector<std::size_t>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + "]";
}

std::string json_str(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

const char* yesno(bool b) { return b ? "yes" : "no"; }

std::string region_json(const Region& r) {
    std::string out = "{\"kind\":\"";
    out += to_string(r.kind());
    out += "\"";
    switch (r.kind()) {
        case RegionKind::Interval:
            out += ",\"lower\":" + format_number(r.lower()[0]);
            out += ",\"upper\":" + format_number(r.upper()[0]);
            break;
        case RegionKind::Box:
            out += ",\"lower\":" + json_point(r.lower());
            out += ",\"upper\":" + json_point(r.upper());
            break;
        case RegionKind::Ball:
            out += ",\"center\":" + json_point(r.center());
            out += ",\"radius\":" + format_number(r.radius());
            break;
        case RegionKind::Cloud: {
            out += ",\"points\":[";
            for (std::size_t i = 0; i < r.points().size(); ++i) {
                if (i) out += ",";
                out += json_point(r.points()[i]);
            }
            out += "]";
            break;
        }
    }
    return out + "}";
}

std::string matrix_json(const Matrix& m) {
    std::string out = "[";
    for (std::size_t r = 0; r < m.rows; ++r) {
        if (r) out += ",";
        out += "[";
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (c) out += ",";
            out += format_number(m.data[r * m.cols + c]);
        }
        out += "]";
    }
    return out + "]";
}

std::string map_json(const MultiMap& map) {
    std::string out = "{\"kind\":\"";
    out += to_string(map.kind);
    out += "\"";
    if (map.kind == MapKind::Table) {
        out += ",\"match_tol\":" + format_number(map.table_match_tol);
        out += ",\"pieces\":[";
        for (std::size_t i = 0; i < map.table.size(); ++i) {
            if (i) out += ",";
            out += "{\"entries\":[";
            for (std::size_t e = 0; e < map.table[i].size(); ++e) {
                if (e) out += ",";
                out += "{\"from\":" + json_point(map.table[i][e].from);
                out += ",\"image\":" + region_json(map.table[i][e].image) + "}";
            }
            out += "]}";
        }
        out += "]";
    } else {
        out += ",\"pieces\":[";
        for (std::size_t i = 0; i < map.pieces.size(); ++i) {
            if (i) out += ",";
            const AffinePiece& piece = map.pieces[i];
            out += "{\"offset\":" + json_point(piece.offset);
            out += ",\"matrix\":" + matrix_json(piece.linear);
            out += ",\"anchor\":" + json_point(piece.anchor);
            if (map.kind == MapKind::BallValued) {
                out += ",\"radius\":" + format_number(piece.radius);
            }
            out += "}";
        }
        out += "]";
    }
    return out + "}";
}

std::string order_json(const OrderSpec& order) {
    std::string out = "{\"kind\":\"";
    out += to_string(order.kind);
    out += "\"";
    if (order.kind == OrderKind::ScalarCoordinate) {
        out += ",\"axis\":" + std::to_string(order.axis);
    } else if (order.kind == OrderKind::CustomTable) {
        out += ",\"pairs\":[";
        for (std::size_t i = 0; i < order.pairs.size(); ++i) {
            if (i) out += ",";
            out += "[" + json_point(order.pairs[i].first) + "," +
                   json_point(order.pairs[i].second) + "]";
        }
        out += "],\"transitive_closure\":";
        out += order.transitive_closure ? "true" : "false";
        out += ",\"strict\":";
        out += order.strict ? "true" : "false";
    }
    return out + "}";
}

}  // namespace

OrderRelation OrderSpec::build() const {
    switch (kind) {
        case OrderKind::Componentwise:
            return OrderRelation::componentwise();
        case OrderKind::ScalarCoordinate:
            return OrderRelation::scalar_coordinate(axis);
        case OrderKind::CustomTable:
            return OrderRelation::custom_table(pairs, transitive_closure, strict);
    }
    return OrderRelation::componentwise();
}

CyclicSystem Scenario::build_system() const {
    return CyclicSystem(subsets, map, constants, tol);
}

std::vector<Point> Scenario::start_points() const {
    if (!seeds.empty() || seed_samples_per_subset == 0) return seeds;
    std::vector<Point> starts;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        auto pts = sample(subsets[i], seed_samples_per_subset, derive_seed(rng_seed, 0xbeef + i));
        starts.insert(starts.end(), pts.begin(), pts.end());
    }
    return starts;
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("scenario parse error at byte " + std::to_string(e.byte) + ": " +
                            e.what());
    }
    if (!doc.is_object()) throw ScenarioError("scenario document must be a JSON object");
    reject_unknown(doc,
                   {"name", "dimension", "subsets", "map", "constants", "order", "thresholds",
                    "strategy", "seeds", "seed_samples_per_subset", "tol", "max_steps",
                    "rng_seed", "checker_samples"},
                   "<root>");

    Scenario s;
    s.name = field(doc, "name", "<root>").get<std::string>();
    s.dimension = parse_count(field(doc, "dimension", "<root>"), "dimension");
    if (s.dimension == 0) fail("dimension", "expected >= 1");

    const json& subsets = field(doc, "subsets", "<root>");
    if (!subsets.is_array() || subsets.empty()) fail("subsets", "expected a nonempty array");
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        std::string path = "subsets[" + std::to_string(i) + "]";
        Region r = parse_region(subsets[i], path);
        if (r.dim() != s.dimension) fail(path, "dimension disagrees with scenario dimension");
        s.subsets.push_back(std::move(r));
    }
    const std::size_t p = s.subsets.size();

    s.map = parse_map(field(doc, "map", "<root>"), "map");
    if (s.map.piece_count() != p) fail("map.pieces", "expected one piece per subset");

    s.constants = parse_reals(field(doc, "constants", "<root>"), "constants");
    if (s.constants.size() != p) fail("constants", "expected one constant per subset");
    double product = 1.0;
    for (double k : s.constants) {
        if (!(k >= 0.0)) fail("constants", "constants must be >= 0");
        product *= k;
    }
    if (!(product < 1.0)) fail("constants", "product of constants >= 1");

    s.order = parse_order(field(doc, "order", "<root>"), "order");

    const json& th = field(doc, "thresholds", "<root>");
    reject_unknown(th, {"d0", "d0i"}, "thresholds");
    s.thresholds.d0 = parse_real(field(th, "d0", "thresholds"), "thresholds.d0");
    s.thresholds.d0i = parse_reals(field(th, "d0i", "thresholds"), "thresholds.d0i");
    try {
        s.thresholds.validate(p);
    } catch (const std::exception& e) {
        fail("thresholds", e.what());
    }

    if (doc.contains("strategy")) s.strategy = parse_strategy(doc["strategy"], "strategy");

    if (doc.contains("seeds") && doc.contains("seed_samples_per_subset")) {
        fail("seeds", "give either seeds or seed_samples_per_subset, not both");
    }
    if (doc.contains("seeds")) {
        const json& seeds = doc["seeds"];
        if (!seeds.is_array()) fail("seeds", "expected an array");
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            std::string path = "seeds[" + std::to_string(i) + "]";
            Point seed = parse_point(seeds[i], path);
            if (seed.size() != s.dimension) fail(path, "dimension mismatch");
            s.seeds.push_back(std::move(seed));
        }
    }
    if (doc.contains("seed_samples_per_subset")) {
        s.seed_samples_per_subset =
            parse_count(doc["seed_samples_per_subset"], "seed_samples_per_subset");
    }
    if (doc.contains("tol")) {
        s.tol = parse_real(doc["tol"], "tol");
        if (!(s.tol > 0.0)) fail("tol", "expected > 0");
    }
    if (doc.contains("max_steps")) {
        s.max_steps = parse_count(doc["max_steps"], "max_steps");
        if (s.max_steps < p) fail("max_steps", "expected >= p");
    }
    if (doc.contains("rng_seed")) s.rng_seed = parse_count(doc["rng_seed"], "rng_seed");
    if (doc.contains("checker_samples")) {
        s.checker_samples = parse_count(doc["checker_samples"], "checker_samples");
        if (s.checker_samples == 0) fail("checker_samples", "expected >= 1");
    }

    try {
        (void)s.build_system();  // surfaces remaining cross-field violations
        (void)s.order.build();
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("scenario validation: ") + e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string canonical_scenario_json(const Scenario& s) {
    std::string out = "{\n";
    out += "  \"name\": " + json_str(s.name) + ",\n";
    out += "  \"dimension\": " + std::to_string(s.dimension) + ",\n";
    out += "  \"subsets\": [";
    for (std::size_t i = 0; i < s.subsets.size(); ++i) {
        if (i) out += ", ";
        out += region_json(s.subsets[i]);
    }
    out += "],\n";
    out += "  \"map\": " + map_json(s.map) + ",\n";
    out += "  \"constants\": " + json_reals(s.constants) + ",\n";
    out += "  \"order\": " + order_json(s.order) + ",\n";
    out += "  \"thresholds\": {\"d0\":" + format_number(s.thresholds.d0) +
           ",\"d0i\":" + json_reals(s.thresholds.d0i) + "},\n";
    out += "  \"strategy\": {\"kind\":\"" + std::string(to_string(s.strategy.kind)) +
           "\",\"image_samples\":" + std::to_string(s.strategy.image_samples) + "},\n";
    if (s.seed_samples_per_subset > 0) {
        out += "  \"seed_samples_per_subset\": " + std::to_string(s.seed_samples_per_subset) +
               ",\n";
    } else {
        out += "  \"seeds\": [";
        for (std::size_t i = 0; i < s.seeds.size(); ++i) {
            if (i) out += ", ";
            out += json_point(s.seeds[i]);
        }
        out += "],\n";
    }
    out += "  \"tol\": " + format_number(s.tol) + ",\n";
    out += "  \"max_steps\": " + std::to_string(s.max_steps) + ",\n";
    out += "  \"rng_seed\": " + std::to_string(s.rng_seed) + ",\n";
    out += "  \"checker_samples\": " + std::to_string(s.checker_samples) + "\n";
    out += "}\n";
    return out;
}

CheckResults check_scenario(const Scenario& s) {
    CyclicSystem sys = s.build_system();
    OrderRelation order = s.order.build();
    CheckResults checks;
    checks.containment = check_containment(sys, s.checker_samples, s.rng_seed);
    checks.contraction = check_contraction(sys, order, s.checker_samples, s.rng_seed);
    checks.assumption3 = check_assumption3(sys, s.thresholds, s.checker_samples, s.rng_seed);
    checks.assumption4 = check_assumption4(sys, s.thresholds);
    checks.assumption5 = check_assumption5(sys, s.thresholds);
    checks.intersecting = sys.intersecting();
    return checks;
}

bool required_checks_pass(const CheckResults& checks) {
    return checks.containment.verdict != Verdict::Fail &&
           checks.contraction.verdict != Verdict::Fail &&
           checks.assumption3.verdict == Verdict::Pass &&
           checks.assumption4.verdict == Verdict::Pass;
}

namespace {

std::string make_trace_csv(const SeedRun& run, std::size_t dim) {
    std::string out = "step,subset";
    for (std::size_t c = 0; c < dim; ++c) out += ",x" + std::to_string(c);
    out += ",d_n,order_certified,in_band\n";
    const Trajectory& traj = run.trajectory;
    for (std::size_t n = 0; n < traj.steps(); ++n) {
        out += std::to_string(n) + "," + std::to_string(traj.subsets[n]);
        for (double c : traj.points[n]) out += "," + format_number(c);
        out += "," + format_number(traj.step_distances[n]);
        out += traj.order_certified[n] ? ",1" : ",0";
        out += run.report.band.in_band[n] ? ",1" : ",0";
        out += "\n";
    }
    return out;
}

std::string checks_json(const CheckResults& checks) {
    std::string out = "{";
    out += "\"containment\":{\"verdict\":" + json_str(to_string(checks.containment.verdict)) +
           ",\"probes\":" + std::to_string(checks.containment.samples_checked) +
           ",\"worst_excess\":" + format_number(checks.containment.worst_excess) + "}";
    out += ",\"contraction\":{\"verdict\":" + json_str(to_string(checks.contraction.verdict)) +
           ",\"min_slack\":" + format_number(checks.contraction.min_slack);
    if (checks.contraction.worst) {
        const PairWitness& w = *checks.contraction.worst;
        out += ",\"witness\":{\"subset\":" + std::to_string(w.subset) +
               ",\"x\":" + json_point(w.x) + ",\"y\":" + json_point(w.y) +
               ",\"slack\":" + format_number(w.slack) + "}";
    }
    out += ",\"per_subset\":[";
    for (std::size_t i = 0; i < checks.contraction.per_subset.size(); ++i) {
        const auto& sub = checks.contraction.per_subset[i];
        if (i) out += ",";
        out += "{\"subset\":" + std::to_string(sub.subset) +
               ",\"verdict\":" + json_str(to_string(sub.verdict)) +
               ",\"pairs\":" + std::to_string(sub.pairs_checked) +
               ",\"min_slack\":" + format_number(sub.pairs_checked ? sub.min_slack : 0.0) + "}";
    }
    out += "]}";
    out += ",\"assumption3\":{\"verdict\":" + json_str(to_string(checks.assumption3.verdict));
    if (checks.assumption3.verdict == Verdict::Pass) {
        out += ",\"subset\":" + std::to_string(checks.assumption3.subset) +
               ",\"x\":" + json_point(checks.assumption3.x) +
               ",\"successor\":" + json_point(checks.assumption3.successor) +
               ",\"distance\":" + format_number(checks.assumption3.distance);
    }
    out += "}";
    out += ",\"assumption4\":{\"verdict\":" + json_str(to_string(checks.assumption4.verdict)) +
           ",\"d0\":" + format_number(checks.assumption4.actual) +
           ",\"required\":" + format_number(checks.assumption4.required) + "}";
    out += ",\"assumption5\":{\"verdict\":" + json_str(to_string(checks.assumption5.verdict)) +
           ",\"d0\":" + format_number(checks.assumption5.actual) +
           ",\"required\":" + format_number(checks.assumption5.required) + "}";
    out += ",\"intersecting\":";
    out += checks.intersecting ? "true" : "false";
    return out + "}";
}

std::string run_json(const SeedRun& run) {
    const ProximityReport& rep = run.report;
    std::string out = "{\"start\":" + json_point(run.start);
    out += ",\"status\":" + json_str(rep.status);
    out += ",\"steps\":" + std::to_string(run.trajectory.steps());
    out += ",\"limits\":[";
    for (std::size_t j = 0; j < rep.limits.size(); ++j) {
        const SubsetLimit& lim = rep.limits[j];
        if (j) out += ",";
        out += "{\"subset\":" + std::to_string(lim.subset);
        out += ",\"converged\":";
        out += lim.converged ? "true" : "false";
        out += ",\"point\":" + (lim.limit.empty() ? std::string("null") : json_point(lim.limit));
        out += ",\"last_increment\":" + format_number(lim.last_increment);
        out += ",\"chain_certified_tail\":";
        out += lim.chain_certified_tail ? "true" : "false";
        out += "}";
    }
    out += "]";
    out += ",\"adjacent_limit_distances\":" + json_reals(rep.adjacent_limit_distance);
    out += ",\"proximity_residuals\":" + json_reals(rep.proximity_residuals);
    out += ",\"composite_residuals\":" + json_reals(rep.composite_residuals);
    out += ",\"band\":{\"entry_step\":";
    out += rep.band.entry_step ? std::to_string(*rep.band.entry_step) : std::string("null");
    out += ",\"ok\":";
    out += rep.band.ok ? "true" : "false";
    out += ",\"lower_violations\":" + json_counts(rep.band.lower_violations);
    out += ",\"upper_violations\":" + json_counts(rep.band.upper_violations) + "}";
    out += ",\"first_certified_step\":" + std::to_string(rep.first_certified_step);
    out += ",\"all_steps_certified\":";
    out += rep.all_steps_certified ? "true" : "false";
    out += ",\"fixed_point\":";
    out += rep.fixed_point ? json_point(*rep.fixed_point) : std::string("null");
    out += ",\"fixed_point_residual\":";
    out += rep.fixed_point_residual ? format_number(*rep.fixed_point_residual)
                                    : std::string("null");
    out += ",\"uniform_gaps\":";
    out += rep.uniform_gaps ? "true" : "false";
    out += ",\"fallback_steps\":" + json_counts(run.trajectory.fallback_steps);
    out += ",\"assumption7\":";
    if (run.assumption7) {
        out += "{\"verdict\":" + json_str(to_string(run.assumption7->verdict));
        out += ",\"vacuous\":";
        out += run.assumption7->vacuous ? "true" : "false";
        out += ",\"pairs_checked\":" + std::to_string(run.assumption7->pairs_checked) + "}";
    } else {
        out += "null";
    }
    return out + "}";
}

std::string machine_block(const RunArtifacts& artifacts, const CyclicSystem& sys) {
    std::string out = "{";
    out += "\"scenario\":" + json_str(artifacts.scenario_name);
    out += ",\"p\":" + std::to_string(sys.subset_count());
    out += ",\"dimension\":" + std::to_string(sys.dim());
    out += ",\"constants\":" + json_reals(sys.constants());
    out += ",\"constants_product\":" + format_number(sys.constants_product());
    out += ",\"gaps\":" + json_reals(sys.gaps());
    out += ",\"max_gap\":" + format_number(sys.max_gap());
    out += ",\"tol\":" + format_number(artifacts.tol);
    out += ",\"checks\":" + checks_json(artifacts.checks);
    out += ",\"runs\":[";
    for (std::size_t i = 0; i < artifacts.runs.size(); ++i) {
        if (i) out += ",";
        out += run_json(artifacts.runs[i]);
    }
    out += "]";
    out += ",\"uniqueness\":";
    if (artifacts.probe_valid) {
        out += "{\"reliable\":";
        out += artifacts.probe.reliable ? "true" : "false";
        out += ",\"max_pairwise\":" + json_reals(artifacts.probe.max_pairwise);
        out += ",\"worst\":" + format_number(artifacts.probe.worst) + "}";
    } else {
        out += "null";
    }
    return out + "}";
}

std::string human_report(const RunArtifacts& artifacts, const Scenario& s,
                         const CyclicSystem& sys) {
    std::string out;
    out += "cyclicbp report\n";
    out += "===============\n";
    out += "scenario: " + artifacts.scenario_name + "\n";
    out += "p: " + std::to_string(sys.subset_count()) + "\n";
    out += "dimension: " + std::to_string(sys.dim()) + "\n";
    out += "map: " + std::string(to_string(s.map.kind)) + "\n";
    out += "order: " + std::string(to_string(s.order.kind)) + "\n";
    out += "strategy: " + std::string(to_string(s.strategy.kind)) + "\n";
    out += "constants k_i: " + fmt_reals(sys.constants()) + "\n";
    out += "product k: " + format_number(sys.constants_product()) + "\n";
    out += "gaps D_i: " + fmt_reals(sys.gaps()) + "\n";
    out += "max gap D: " + format_number(sys.max_gap()) + "\n";
    double spread = 0.0;
    for (double g : sys.gaps()) spread = std::max(spread, std::abs(g - sys.max_gap()));
    out += "uniform gaps: ";
    out += yesno(spread <= artifacts.tol);
    out += spread <= artifacts.tol ? "\n"
                                   : " (step distances approach D_i per edge, not a common D)\n";
    out += "tol: " + format_number(artifacts.tol) + "\n";
    out += "note: best-proximity sets read as BP(A_i) = { z in A_i : d(z, T z) = D_i } "
           "(adopted reading)\n";
    out += "\nchecks\n------\n";

    const CheckResults& checks = artifacts.checks;
    out += "containment: " + std::string(to_string(checks.containment.verdict)) + " (probes=" +
           std::to_string(checks.containment.samples_checked) +
           ", worst excess=" + format_number(checks.containment.worst_excess) + ")\n";
    out += "contraction: " + std::string(to_string(checks.contraction.verdict)) +
           " (min slack=" + format_number(checks.contraction.min_slack) + ")\n";
    for (const auto& sub : checks.contraction.per_subset) {
        out += "  subset " + std::to_string(sub.subset) + ": " +
               std::string(to_string(sub.verdict));
        if (sub.verdict == Verdict::Vacuous) {
            out += " (warning: no ordered sample pairs)\n";
        } else {
            out += " (pairs=" + std::to_string(sub.pairs_checked) +
                   ", min slack=" + format_number(sub.min_slack) + ")\n";
        }
    }
    if (checks.contraction.worst) {
        const PairWitness& w = *checks.contraction.worst;
        out += "  worst pair: subset " + std::to_string(w.subset) + ", x=" + fmt_point(w.x) +
               ", y=" + fmt_point(w.y) + ", slack=" + format_number(w.slack) + "\n";
    }
    out += "assumption3: " + std::string(to_string(checks.assumption3.verdict));
    if (checks.assumption3.verdict == Verdict::Pass) {
        out += " (subset " + std::to_string(checks.assumption3.subset) +
               ", x=" + fmt_point(checks.assumption3.x) +
               ", successor=" + fmt_point(checks.assumption3.successor) +
               ", distance=" + format_number(checks.assumption3.distance) + ")";
    }
    out += "\n";
    out += "assumption4: " + std::string(to_string(checks.assumption4.verdict)) + " (d0=" +
           format_number(checks.assumption4.actual) +
           ", required >= " + format_number(checks.assumption4.required) + ")\n";
    out += "assumption5 (optional strengthening): " +
           std::string(to_string(checks.assumption5.verdict)) + " (d0=" +
           format_number(checks.assumption5.actual) +
           ", required > " + format_number(checks.assumption5.required) + ")\n";
    out += "assumption6 intersecting subsets: " + std::string(yesno(checks.intersecting)) + "\n";

    for (std::size_t i = 0; i < artifacts.runs.size(); ++i) {
        const SeedRun& run = artifacts.runs[i];
        const ProximityReport& rep = run.report;
        out += "\nrun " + std::to_string(i + 1) + ": start=" + fmt_point(run.start) + "\n";
        out += "----------------\n";
        out += "status: " + rep.status + " (steps=" + std::to_string(run.trajectory.steps()) +
               ")\n";
        for (const SubsetLimit& lim : rep.limits) {
            out += "subset " + std::to_string(lim.subset) + ": ";
            if (lim.limit.empty()) {
                out += "never visited\n";
                continue;
            }
            out += "limit=" + fmt_point(lim.limit) +
                   ", last increment=" + format_number(lim.last_increment) +
                   ", converged=" + yesno(lim.converged) +
                   ", chain-certified tail=" + yesno(lim.chain_certified_tail) + "\n";
        }
        if (rep.status == "converged") {
            for (std::size_t j = 0; j < rep.adjacent_limit_distance.size(); ++j) {
                out += "edge " + std::to_string(j + 1) + "->" +
                       std::to_string(sys.next_index(j + 1)) +
                       ": distance=" + format_number(rep.adjacent_limit_distance[j]) +
                       ", residual=" + format_number(rep.proximity_residuals[j]) +
                       ", composite residual=" + format_number(rep.composite_residuals[j]) +
                       "\n";
            }
        }
        out += "band: entry=";
        out += rep.band.entry_step ? std::to_string(*rep.band.entry_step) : std::string("never");
        out += ", ok=" + std::string(yesno(rep.band.ok)) +
               ", lower violations=" + std::to_string(rep.band.lower_violations.size()) +
               ", upper violations=" + std::to_string(rep.band.upper_violations.size()) + "\n";
        out += "order certificates: all steps from " +
               std::to_string(rep.first_certified_step) + " on\n";
        if (rep.fixed_point) {
            out += "fixed point: " + fmt_point(*rep.fixed_point) +
                   ", residual=" + format_number(*rep.fixed_point_residual) + "\n";
        }
        out += "assumption7: ";
        if (run.assumption7) {
            out += std::string(to_string(run.assumption7->verdict));
            if (run.assumption7->vacuous) out += " (vacuous: no comparable pairs)";
            out += " (pairs=" + std::to_string(run.assumption7->pairs_checked) + ")\n";
        } else if (!checks.intersecting) {
            out += "not applicable (gaps > 0)\n";
        } else {
            out += "skipped (trajectory incomplete)\n";
        }
    }

    out += "\nuniqueness probe\n----------------\n";
    if (artifacts.probe_valid) {
        out += "reliable: " + std::string(yesno(artifacts.probe.reliable)) + "\n";
        out += "max pairwise limit distance per subset: " +
               fmt_reals(artifacts.probe.max_pairwise) + "\n";
        out += "worst: " + format_number(artifacts.probe.worst) + "\n";
    } else {
        out += "skipped (no seeds)\n";
    }
    return out;
}

}  // namespace

RunArtifacts run_scenario(const Scenario& input, const RunOverrides& overrides) {
    Scenario s = input;
    if (overrides.tol) s.tol = *overrides.tol;
    if (overrides.max_steps) s.max_steps = *overrides.max_steps;
    if (overrides.seed) s.rng_seed = *overrides.seed;

    CyclicSystem sys = s.build_system();
    OrderRelation order = s.order.build();

    RunArtifacts artifacts;
    artifacts.scenario_name = s.name;
    artifacts.tol = s.tol;
    artifacts.checks.containment = check_containment(sys, s.checker_samples, s.rng_seed);
    artifacts.checks.contraction = check_contraction(sys, order, s.checker_samples, s.rng_seed);
    artifacts.checks.assumption3 =
        check_assumption3(sys, s.thresholds, s.checker_samples, s.rng_seed);
    artifacts.checks.assumption4 = check_assumption4(sys, s.thresholds);
    artifacts.checks.assumption5 = check_assumption5(sys, s.thresholds);
    artifacts.checks.intersecting = sys.intersecting();

    const std::vector<Point> starts = s.start_points();
    auto make_run = [&](std::size_t idx) {
        SeedRun run;
        run.start = starts[idx];
        run.trajectory = run_trajectory(sys, order, s.thresholds, s.strategy, starts[idx],
                                        s.max_steps, s.tol, derive_seed(s.rng_seed, idx));
        run.report = convergence_report(run.trajectory, sys, order, s.thresholds, s.strategy,
                                        s.tol, derive_seed(s.rng_seed, idx));
        if (sys.intersecting() && run.trajectory.converged) {
            run.assumption7 = check_assumption7(sys, order, run.trajectory, s.tol);
        }
        return run;
    };
    if (overrides.parallel && starts.size() > 1) {
        std::vector<std::future<SeedRun>> futures;
        futures.reserve(starts.size());
        for (std::size_t i = 0; i < starts.size(); ++i) {
            futures.push_back(std::async(std::launch::async, make_run, i));
        }
        for (auto& f : futures) artifacts.runs.push_back(f.get());
    } else {
        for (std::size_t i = 0; i < starts.size(); ++i) artifacts.runs.push_back(make_run(i));
    }

    if (!artifacts.runs.empty()) {
        artifacts.probe_valid = true;
        artifacts.probe.max_pairwise.assign(sys.subset_count(), 0.0);
        std::vector<std::vector<Point>> limits(sys.subset_count());
        for (const SeedRun& run : artifacts.runs) {
            if (!run.trajectory.converged) {
                artifacts.probe.reliable = false;
                continue;
            }
            for (const SubsetLimit& lim : run.report.limits) {
                if (lim.converged) limits[lim.subset - 1].push_back(lim.limit);
            }
        }
        for (std::size_t j = 0; j < limits.size(); ++j) {
            for (std::size_t a = 0; a < limits[j].size(); ++a) {
                for (std::size_t b = a + 1; b < limits[j].size(); ++b) {
                    artifacts.probe.max_pairwise[j] = std::max(
                        artifacts.probe.max_pairwise[j], metric(limits[j][a], limits[j][b]));
                }
            }
            artifacts.probe.worst = std::max(artifacts.probe.worst,
                                             artifacts.probe.max_pairwise[j]);
        }
    }

    for (const SeedRun& run : artifacts.runs) {
        artifacts.traces.push_back(make_trace_csv(run, sys.dim()));
    }
    artifacts.machine_json = machine_block(artifacts, sys);
    artifacts.report_text = human_report(artifacts, s, sys);
    artifacts.report_text += "\nmachine-readable\n----------------\n";
    artifacts.report_text += artifacts.machine_json;
    artifacts.report_text += "\n";
    return artifacts;
}

std::vector<std::filesystem::path> emit(const RunArtifacts& artifacts,
                                        const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("emit: cannot create " + out_dir.string() + ": " +
                                     ec.message());
    std::vector<std::filesystem::path> written;

    auto write_file = [&](const std::filesystem::path& path, const std::string& data) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("emit: cannot open " + path.string());
        out << data;
        if (!out) throw std::runtime_error("emit: write failed for " + path.string());
        written.push_back(path);
    };

    write_file(out_dir / "report.txt", artifacts.report_text);
    for (std::size_t i = 0; i < artifacts.traces.size(); ++i) {
        write_file(out_dir / ("trace_" + std::to_string(i + 1) + ".csv"), artifacts.traces[i]);
    }
    return written;
}

}  // namespace cyclicbp
