#include "sob/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sob {

namespace {

i128 cross(Pt o, Pt a, Pt b) {
    return static_cast<i128>(a.x - o.x) * (b.y - o.y) - static_cast<i128>(a.y - o.y) * (b.x - o.x);
}

int sgn(i128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

bool on_segment_bbox(Pt a, Pt b, Pt p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

mpq_class qcross(const QPt& o, const QPt& a, const QPt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool q_on_bbox(const QPt& a, const QPt& b, const QPt& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool is_pow2(const mpz_class& z) { return z > 0 && mpz_popcount(z.get_mpz_t()) == 1; }

}  // namespace

std::string to_string(const Square& q) {
    return "(" + std::to_string(q.level) + "," + std::to_string(q.i) + "," + std::to_string(q.j) + ")";
}

QPt to_q(Pt p) {
    mpq_class x(p.x), y(p.y);
    mpq_class s;
    mpq_set_ui(s.get_mpq_t(), 1, 1);
    mpq_mul_2exp(s.get_mpq_t(), s.get_mpq_t(), kFrac);
    x /= s;
    y /= s;
    return {x, y};
}

QPt grid_point(int level, int64_t i, int64_t j) {
    mpq_class x(static_cast<long>(i)), y(static_cast<long>(j));
    mpq_div_2exp(x.get_mpq_t(), x.get_mpq_t(), level);
    mpq_div_2exp(y.get_mpq_t(), y.get_mpq_t(), level);
    return {x, y};
}

double to_double(const mpq_class& q) { return q.get_d(); }

int orient(Pt a, Pt b, Pt c) { return sgn(cross(a, b, c)); }

bool segments_intersect(Pt a, Pt b, Pt c, Pt d) {
    const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    if (o1 == 0 && on_segment_bbox(a, b, c)) return true;
    if (o2 == 0 && on_segment_bbox(a, b, d)) return true;
    if (o3 == 0 && on_segment_bbox(c, d, a)) return true;
    if (o4 == 0 && on_segment_bbox(c, d, b)) return true;
    return false;
}

bool segment_meets_box(Pt a, Pt b, const Box& q) {
    if (std::max(a.x, b.x) < q.x0 || std::min(a.x, b.x) > q.x1) return false;
    if (std::max(a.y, b.y) < q.y0 || std::min(a.y, b.y) > q.y1) return false;
    // separating axis along the segment normal
    const Pt c[4] = {{q.x0, q.y0}, {q.x1, q.y0}, {q.x1, q.y1}, {q.x0, q.y1}};
    bool pos = false, neg = false;
    for (const Pt& p : c) {
        const int o = orient(a, b, p);
        if (o == 0) return true;
        (o > 0 ? pos : neg) = true;
    }
    return pos && neg;
}

const char* to_string(Location l) {
    switch (l) {
        case Location::inside: return "inside";
        case Location::boundary: return "boundary";
        default: return "outside";
    }
}

Location contains_point(const Domain& d, Pt p) {
    bool in = false;
    const size_t n = d.size();
    for (size_t k = 0; k < n; ++k) {
        const Pt a = d.v[k], b = d.at(k + 1);
        if (orient(a, b, p) == 0 && on_segment_bbox(a, b, p)) return Location::boundary;
        if ((a.y > p.y) != (b.y > p.y)) {
            const i128 lhs = static_cast<i128>(p.x - a.x) * (b.y - a.y);
            const i128 rhs = static_cast<i128>(p.y - a.y) * (b.x - a.x);
            const bool left = (b.y > a.y) ? (lhs < rhs) : (lhs > rhs);
            if (left) in = !in;
        }
    }
    return in ? Location::inside : Location::outside;
}

Location contains_point(const Domain& d, const QPt& p) {
    bool in = false;
    const size_t n = d.size();
    for (size_t k = 0; k < n; ++k) {
        const QPt a = to_q(d.v[k]), b = to_q(d.at(k + 1));
        if (qcross(a, b, p) == 0 && q_on_bbox(a, b, p)) return Location::boundary;
        if ((a.y > p.y) != (b.y > p.y)) {
            const mpq_class lhs = (p.x - a.x) * (b.y - a.y);
            const mpq_class rhs = (p.y - a.y) * (b.x - a.x);
            const bool left = (b.y > a.y) ? (lhs < rhs) : (lhs > rhs);
            if (left) in = !in;
        }
    }
    return in ? Location::inside : Location::outside;
}

bool box_meets_boundary(const Domain& d, const Box& b) {
    const size_t n = d.size();
    for (size_t k = 0; k < n; ++k)
        if (segment_meets_box(d.v[k], d.at(k + 1), b)) return true;
    return false;
}

bool box_in_domain(const Domain& d, const Box& b) {
    if (!b.intersects(d.bbox)) return false;
    if (box_meets_boundary(d, b)) return false;
    return contains_point(d, Pt{b.x0 + (b.x1 - b.x0) / 2, b.y0 + (b.y1 - b.y0) / 2}) == Location::inside;
}

bool square_in_domain(const Domain& d, const Square& q) { return box_in_domain(d, q.box()); }

bool box_meets_closure(const Domain& d, const Box& b) {
    if (!b.intersects(d.bbox)) return false;
    if (box_meets_boundary(d, b)) return true;
    return contains_point(d, Pt{b.x0 + (b.x1 - b.x0) / 2, b.y0 + (b.y1 - b.y0) / 2}) != Location::outside;
}

double Dist2::value() const {
    // num/den scaled by 2^-64
    const long double r = static_cast<long double>(num) / static_cast<long double>(den);
    return static_cast<double>(std::ldexp(r, -2 * kFrac));
}

Dist2 dist2_point_segment(Pt p, Pt a, Pt b) {
    const i128 dx = b.x - a.x, dy = b.y - a.y;
    const i128 px = p.x - a.x, py = p.y - a.y;
    const i128 t = px * dx + py * dy;
    const i128 len2 = dx * dx + dy * dy;
    if (t <= 0 || len2 == 0) return {i256(px * px + py * py), 1};
    if (t >= len2) {
        const i128 qx = p.x - b.x, qy = p.y - b.y;
        return {i256(qx * qx + qy * qy), 1};
    }
    const i256 c = i256(px * dy - py * dx);
    return {c * c, i256(len2)};
}

static i128 dist2_point_box(Pt p, const Box& q) {
    const i128 dx = p.x < q.x0 ? q.x0 - p.x : (p.x > q.x1 ? p.x - q.x1 : 0);
    const i128 dy = p.y < q.y0 ? q.y0 - p.y : (p.y > q.y1 ? p.y - q.y1 : 0);
    return dx * dx + dy * dy;
}

Dist2 dist2_box_segment(const Box& q, Pt a, Pt b) {
    if (segment_meets_box(a, b, q)) return {0, 1};
    Dist2 best{i256(dist2_point_box(a, q)), 1};
    const Dist2 db{i256(dist2_point_box(b, q)), 1};
    if (db < best) best = db;
    const Pt c[4] = {{q.x0, q.y0}, {q.x1, q.y0}, {q.x1, q.y1}, {q.x0, q.y1}};
    for (const Pt& p : c) {
        const Dist2 dc = dist2_point_segment(p, a, b);
        if (dc < best) best = dc;
    }
    return best;
}

Dist2 dist2_point_boundary(const Domain& d, Pt p) {
    Dist2 best{-1, 1};
    for (size_t k = 0; k < d.size(); ++k) {
        const Dist2 c = dist2_point_segment(p, d.v[k], d.at(k + 1));
        if (best.num < 0 || c < best) best = c;
    }
    return best;
}

Dist2 dist2_box_boundary(const Domain& d, const Box& q) {
    Dist2 best{-1, 1};
    for (size_t k = 0; k < d.size(); ++k) {
        const Dist2 c = dist2_box_segment(q, d.v[k], d.at(k + 1));
        if (best.num < 0 || c < best) best = c;
        if (best.num == 0) break;
    }
    return best;
}

double dist_point_boundary(const Domain& d, double x, double y) {
    double best = INFINITY;
    for (size_t k = 0; k < d.size(); ++k) {
        const double ax = to_double(d.v[k].x), ay = to_double(d.v[k].y);
        const double bx = to_double(d.at(k + 1).x), by = to_double(d.at(k + 1).y);
        const double dx = bx - ax, dy = by - ay;
        const double l2 = dx * dx + dy * dy;
        double t = l2 > 0 ? ((x - ax) * dx + (y - ay) * dy) / l2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::hypot(x - ax - t * dx, y - ay - t * dy));
    }
    return best;
}

int orient(const QPt& a, const QPt& b, const QPt& c) { return sgn(qcross(a, b, c)); }

bool segments_intersect(const QPt& a, const QPt& b, const QPt& c, const QPt& d) {
    const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    if (o1 == 0 && q_on_bbox(a, b, c)) return true;
    if (o2 == 0 && q_on_bbox(a, b, d)) return true;
    if (o3 == 0 && q_on_bbox(c, d, a)) return true;
    if (o4 == 0 && q_on_bbox(c, d, b)) return true;
    return false;
}

mpq_class dist2(const QPt& a, const QPt& b) {
    const mpq_class dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

QPt closest_on_segment(const QPt& p, const QPt& a, const QPt& b) {
    const mpq_class dx = b.x - a.x, dy = b.y - a.y;
    const mpq_class l2 = dx * dx + dy * dy;
    if (l2 == 0) return a;
    mpq_class t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / l2;
    if (t <= 0) return a;
    if (t >= 1) return b;
    return {a.x + t * dx, a.y + t * dy};
}

std::optional<std::pair<QPt, QPt>> clip_segment(const QPt& a, const QPt& b, const mpq_class& x0,
                                                const mpq_class& y0, const mpq_class& x1,
                                                const mpq_class& y1) {
    mpq_class t0 = 0, t1 = 1;
    const mpq_class dx = b.x - a.x, dy = b.y - a.y;
    const mpq_class p[4] = {-dx, dx, -dy, dy};
    const mpq_class q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0) {
            if (q[k] < 0) return std::nullopt;
            continue;
        }
        const mpq_class r = q[k] / p[k];
        if (p[k] < 0) {
            if (r > t0) t0 = r;
        } else if (r < t1) {
            t1 = r;
        }
    }
    if (t0 > t1) return std::nullopt;
    return std::make_pair(QPt{a.x + t0 * dx, a.y + t0 * dy}, QPt{a.x + t1 * dx, a.y + t1 * dy});
}

bool segment_meets_open_box(const QPt& a, const QPt& b, const mpq_class& x0, const mpq_class& y0,
                            const mpq_class& x1, const mpq_class& y1) {
    // the parameters t with x0 < x(t) < x1 and y0 < y(t) < y1 form an open interval
    bool has_lo = false, has_hi = false;
    mpq_class lo, hi;
    auto axis = [&](const mpq_class& s, const mpq_class& d, const mpq_class& l, const mpq_class& h) {
        if (d == 0) return l < s && s < h;
        mpq_class ta = (l - s) / d, tb = (h - s) / d;
        if (ta > tb) std::swap(ta, tb);
        if (!has_lo || ta > lo) lo = ta, has_lo = true;
        if (!has_hi || tb < hi) hi = tb, has_hi = true;
        return true;
    };
    if (!axis(a.x, b.x - a.x, x0, x1)) return false;
    if (!axis(a.y, b.y - a.y, y0, y1)) return false;
    if (!has_lo) return true;  // degenerate segment strictly inside
    return lo < hi && lo < 1 && hi > 0;
}

std::optional<QPt> first_boundary_hit(const Domain& d, const QPt& p, const QPt& q) {
    const QPt r{q.x - p.x, q.y - p.y};
    std::optional<mpq_class> best;
    for (size_t k = 0; k < d.size(); ++k) {
        const QPt a = to_q(d.v[k]), b = to_q(d.at(k + 1));
        const QPt s{b.x - a.x, b.y - a.y};
        const mpq_class den = r.x * s.y - r.y * s.x;
        const QPt ap{a.x - p.x, a.y - p.y};
        if (den != 0) {
            const mpq_class t = (ap.x * s.y - ap.y * s.x) / den;
            const mpq_class u = (ap.x * r.y - ap.y * r.x) / den;
            if (t >= 0 && t <= 1 && u >= 0 && u <= 1 && (!best || t < *best)) best = t;
        } else if (ap.x * r.y - ap.y * r.x == 0) {
            const mpq_class rr = r.x * r.x + r.y * r.y;
            if (rr == 0) {
                if (q_on_bbox(a, b, p) && qcross(a, b, p) == 0) best = 0;
                continue;
            }
            mpq_class ta = (ap.x * r.x + ap.y * r.y) / rr;
            mpq_class tb = ((b.x - p.x) * r.x + (b.y - p.y) * r.y) / rr;
            if (ta > tb) std::swap(ta, tb);
            mpq_class lo = ta > 0 ? ta : mpq_class(0);
            mpq_class hi = tb < 1 ? tb : mpq_class(1);
            if (lo <= hi && (!best || lo < *best)) best = lo;
        }
    }
    if (!best) return std::nullopt;
    return QPt{p.x + *best * r.x, p.y + *best * r.y};
}

double Polyline::length() const {
    double s = 0;
    const size_t m = points.size();
    if (m < 2) return 0;
    for (size_t k = 0; k + 1 < m; ++k) s += std::sqrt(dist2(points[k], points[k + 1]).get_d());
    if (closed) s += std::sqrt(dist2(points.back(), points.front()).get_d());
    return s;
}

static uint64_t vkey(std::pair<int64_t, int64_t> v) {
    return (static_cast<uint64_t>(v.first) << 32) ^ static_cast<uint64_t>(static_cast<uint32_t>(v.second));
}

void BoundaryCycle::build_index() {
    index_.clear();
    for (size_t k = 0; k < edges(); ++k) index_.emplace(vkey(y[k]), k);
}

bool BoundaryCycle::has_vertex(std::pair<int64_t, int64_t> v) const {
    if (index_.empty() && edges() > 0) {
        return std::find(y.begin(), y.end(), v) != y.end();
    }
    return index_.count(vkey(v)) != 0;
}

size_t BoundaryCycle::index_of(std::pair<int64_t, int64_t> v) const {
    if (!index_.empty()) {
        auto it = index_.find(vkey(v));
        if (it != index_.end()) return it->second;
    } else {
        for (size_t k = 0; k < edges(); ++k)
            if (y[k] == v) return k;
    }
    throw Error("NotOnCycle", "vertex (" + std::to_string(v.first) + "," + std::to_string(v.second) +
                                  ") is not on the cycle");
}

size_t cycle_arc(const BoundaryCycle& c, std::pair<int64_t, int64_t> x, std::pair<int64_t, int64_t> y) {
    const size_t a = c.index_of(x), b = c.index_of(y);
    const size_t d = a > b ? a - b : b - a;
    return std::min(d, c.edges() - d);
}

double cycle_distance(const BoundaryCycle& c, std::pair<int64_t, int64_t> x, std::pair<int64_t, int64_t> y) {
    return static_cast<double>(cycle_arc(c, x, y)) * c.spacing();
}

// ---- domain loading ----

namespace {

mpq_class parse_coord(const nlohmann::json& j) {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) throw Error("NonDyadicCoordinate", "non-finite coordinate");
        return mpq_class(v);
    }
    if (j.is_string()) {
        mpq_class q;
        if (q.set_str(j.get<std::string>(), 10) != 0) throw Error("ParseError", "bad rational '" + j.get<std::string>() + "'");
        q.canonicalize();
        return q;
    }
    throw Error("ParseError", "coordinate must be a number or a rational string");
}

std::pair<mpq_class, mpq_class> parse_vertex(const nlohmann::json& v) {
    if (!v.is_array()) throw Error("ParseError", "vertex must be an array");
    if (v.size() == 3 && v[0].is_number_integer() && v[1].is_number_integer() && v[2].is_number_integer()) {
        const long e = v[2].get<long>();
        if (e < 0 || e > 62) throw Error("NonDyadicCoordinate", "log2 denominator out of range");
        mpq_class x(v[0].get<long>()), y(v[1].get<long>());
        mpq_div_2exp(x.get_mpq_t(), x.get_mpq_t(), e);
        mpq_div_2exp(y.get_mpq_t(), y.get_mpq_t(), e);
        return {x, y};
    }
    if (v.size() == 2) return {parse_coord(v[0]), parse_coord(v[1])};
    throw Error("ParseError", "vertex must be [nx, ny, log2den] or [x, y]");
}

std::string qstr(const mpq_class& q) { return q.get_str(); }

}  // namespace

Domain make_domain(std::vector<Pt> v, std::string name) {
    if (v.size() < 3) throw Error("TooFewVertices", "a domain needs at least 3 vertices, got " + std::to_string(v.size()));
    const size_t n = v.size();
    for (size_t k = 0; k < n; ++k)
        if (v[k] == v[(k + 1) % n]) throw Error("NonSimplePolygon", "repeated consecutive vertex " + std::to_string(k));
    i128 area2 = 0;
    for (size_t k = 0; k < n; ++k) {
        const Pt a = v[k], b = v[(k + 1) % n];
        area2 += static_cast<i128>(a.x) * b.y - static_cast<i128>(b.x) * a.y;
    }
    if (area2 == 0) throw Error("NonSimplePolygon", "zero area polygon");
    for (size_t i = 0; i < n; ++i) {
        const Pt a = v[i], b = v[(i + 1) % n], c = v[(i + 2) % n];
        // adjacent edges may only share their common vertex
        if (orient(a, b, c) == 0) {
            const i128 dot = static_cast<i128>(b.x - a.x) * (c.x - b.x) + static_cast<i128>(b.y - a.y) * (c.y - b.y);
            if (dot < 0) throw Error("NonSimplePolygon", "edges " + std::to_string(i) + " and " + std::to_string((i + 1) % n) + " fold back");
        }
        for (size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_intersect(a, b, v[j], v[(j + 1) % n]))
                throw Error("NonSimplePolygon", "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
        }
    }
    if (area2 < 0) std::reverse(v.begin(), v.end());
    Domain d;
    d.name = std::move(name);
    d.v = std::move(v);
    d.bbox = {d.v[0].x, d.v[0].y, d.v[0].x, d.v[0].y};
    for (const Pt& p : d.v) {
        d.bbox.x0 = std::min(d.bbox.x0, p.x);
        d.bbox.y0 = std::min(d.bbox.y0, p.y);
        d.bbox.x1 = std::max(d.bbox.x1, p.x);
        d.bbox.y1 = std::max(d.bbox.y1, p.y);
    }
    const int64_t one = int64_t(1) << kFrac;
    if (d.bbox.x0 < 0 || d.bbox.y0 < 0 || d.bbox.x1 > one || d.bbox.y1 > one)
        throw Error("DomainOutOfRange", "vertices must lie in [0,1]^2 after normalization");
    return d;
}

Domain load_domain(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", e.what());
    }
    if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
        throw Error("ParseError", "domain document needs a 'vertices' array");
    std::vector<std::pair<mpq_class, mpq_class>> raw;
    for (const auto& v : j["vertices"]) {
        auto p = parse_vertex(v);
        for (const mpq_class* c : {&p.first, &p.second})
            if (!is_pow2(c->get_den()))
                throw Error("NonDyadicCoordinate", "coordinate " + c->get_str() + " has a denominator that is not a power of two");
        raw.push_back(std::move(p));
    }
    if (raw.size() < 3) throw Error("TooFewVertices", "a domain needs at least 3 vertices, got " + std::to_string(raw.size()));

    int scale = 0;
    mpq_class ox = 0, oy = 0;
    if (j.contains("normalization")) {
        const auto& nz = j["normalization"];
        scale = nz.value("scale_log2", 0);
        if (nz.contains("offset")) {
            ox = parse_coord(nz["offset"].at(0));
            oy = parse_coord(nz["offset"].at(1));
        }
    }
    mpq_class mnx = raw[0].first, mny = raw[0].second, mxx = mnx, mxy = mny;
    for (const auto& [x, y] : raw) {
        mnx = std::min(mnx, x), mny = std::min(mny, y);
        mxx = std::max(mxx, x), mxy = std::max(mxy, y);
    }
    if (mnx < 0 || mny < 0 || mxx > 1 || mxy > 1) {
        // translate to the origin and shrink by the smallest power of two that fits
        int s = 0;
        mpq_class ext = std::max(mxx - mnx, mxy - mny);
        while (ext > 1) {
            ext /= 2;
            ++s;
        }
        for (auto& [x, y] : raw) {
            x -= mnx, y -= mny;
            mpq_div_2exp(x.get_mpq_t(), x.get_mpq_t(), s);
            mpq_div_2exp(y.get_mpq_t(), y.get_mpq_t(), s);
        }
        mpq_class sx = mnx, sy = mny;
        mpq_mul_2exp(sx.get_mpq_t(), sx.get_mpq_t(), scale);
        mpq_mul_2exp(sy.get_mpq_t(), sy.get_mpq_t(), scale);
        ox += sx, oy += sy;
        scale += s;
    }
    std::vector<Pt> pts;
    for (auto& [x, y] : raw) {
        mpq_class fx = x, fy = y;
        mpq_mul_2exp(fx.get_mpq_t(), fx.get_mpq_t(), kFrac);
        mpq_mul_2exp(fy.get_mpq_t(), fy.get_mpq_t(), kFrac);
        if (fx.get_den() != 1 || fy.get_den() != 1)
            throw Error("NonDyadicCoordinate", "coordinate finer than 2^-" + std::to_string(kFrac));
        pts.push_back({fx.get_num().get_si(), fy.get_num().get_si()});
    }
    Domain d = make_domain(std::move(pts), j.value("name", std::string{}));
    d.scale_log2 = scale;
    d.offset_x = ox;
    d.offset_y = oy;
    return d;
}

Domain load_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", "domain file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_domain(ss.str());
}

std::string domain_to_json(const Domain& d) {
    nlohmann::ordered_json j;
    if (!d.name.empty()) j["name"] = d.name;
    auto verts = nlohmann::ordered_json::array();
    for (const Pt& p : d.v) {
        int e = 0;
        for (int64_t c : {p.x, p.y}) {
            if (c == 0) continue;
            e = std::max(e, kFrac - std::min(kFrac, __builtin_ctzll(static_cast<uint64_t>(c))));
        }
        verts.push_back({p.x >> (kFrac - e), p.y >> (kFrac - e), e});
    }
    j["vertices"] = verts;
    if (d.scale_log2 != 0 || d.offset_x != 0 || d.offset_y != 0)
        j["normalization"] = {{"scale_log2", d.scale_log2}, {"offset", {qstr(d.offset_x), qstr(d.offset_y)}}};
    return j.dump(2) + "\n";
}

}  // namespace sob
