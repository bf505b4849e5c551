#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <gmpxx.h>

namespace sob {

// Every failure carries a kind string ("NonSimplePolygon", "NoChain", ...)
// so callers and the CLI can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

using i128 = __int128;
using i256 = boost::multiprecision::int256_t;

// Coordinates are fixed point: value = raw / 2^kFrac.
constexpr int kFrac = 32;
constexpr int kMaxLevel = 28;

inline double to_double(int64_t v) { return static_cast<double>(v) * 0x1p-32; }

struct Pt {
    int64_t x = 0, y = 0;
    auto operator<=>(const Pt&) const = default;
};

// closed axis-aligned box in fixed point
struct Box {
    int64_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool contains(Pt p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    bool intersects(const Box& o) const { return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1; }
};

// [i 2^-level, (i+1) 2^-level] x [j 2^-level, (j+1) 2^-level]
struct Square {
    int level = 0;
    int64_t i = 0, j = 0;

    auto operator<=>(const Square&) const = default;

    int64_t side() const { return int64_t(1) << (kFrac - level); }
    Box box() const {
        const int64_t s = side();
        return {i * s, j * s, (i + 1) * s, (j + 1) * s};
    }
    Pt center() const {
        const int64_t s = side();
        return {i * s + s / 2, j * s + s / 2};
    }
    double length() const { return to_double(side()); }
    // ancestor at a coarser level L <= level (floor division on negative indices too)
    Square ancestor(int L) const { return {L, i >> (level - L), j >> (level - L)}; }
    Square parent() const { return ancestor(level - 1); }
    bool contains(const Square& o) const { return o.level >= level && o.ancestor(level) == *this; }
};

struct SquareHash {
    size_t operator()(const Square& q) const noexcept {
        uint64_t h = static_cast<uint64_t>(q.i) * 0x9E3779B97F4A7C15ULL;
        h ^= static_cast<uint64_t>(q.j) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
        h ^= static_cast<uint64_t>(q.level) * 0xC2B2AE3D27D4EB4FULL;
        return static_cast<size_t>(h);
    }
};

std::string to_string(const Square& q);

// exact rational point, real units
struct QPt {
    mpq_class x, y;
    bool operator==(const QPt& o) const { return x == o.x && y == o.y; }
    bool operator<(const QPt& o) const { return x < o.x || (x == o.x && y < o.y); }
};

inline mpq_class qmin(const mpq_class& a, const mpq_class& b) { return a < b ? a : b; }
inline mpq_class qmax(const mpq_class& a, const mpq_class& b) { return a < b ? b : a; }

QPt to_q(Pt p);
QPt grid_point(int level, int64_t i, int64_t j);
double to_double(const mpq_class& q);

struct Domain {
    std::string name;
    std::vector<Pt> v;  // counterclockwise, closed implicitly
    // original coordinates = normalized * 2^scale_log2 + offset
    int scale_log2 = 0;
    mpq_class offset_x = 0, offset_y = 0;
    Box bbox;

    size_t size() const { return v.size(); }
    const Pt& at(size_t k) const { return v[k % v.size()]; }
};

// Parse the JSON domain document (see data/domains/README.md).
Domain load_domain(const std::string& text);
Domain load_domain_file(const std::string& path);
std::string domain_to_json(const Domain& d);
// Validate and orient a vertex list already in fixed point inside [0,1]^2.
Domain make_domain(std::vector<Pt> v, std::string name = {});

enum class Location { inside, boundary, outside };
const char* to_string(Location l);

Location contains_point(const Domain& d, Pt p);
Location contains_point(const Domain& d, const QPt& p);

// closed square inside the open domain
bool square_in_domain(const Domain& d, const Square& q);
bool box_in_domain(const Domain& d, const Box& b);
// some polygon edge meets the closed box
bool box_meets_boundary(const Domain& d, const Box& b);
// closed box meets the closed domain
bool box_meets_closure(const Domain& d, const Box& b);

// Exact squared distances; units are raw fixed point squared (2^-64).
struct Dist2 {
    i256 num = 0, den = 1;
    bool operator<(const Dist2& o) const { return num * o.den < o.num * den; }
    bool operator==(const Dist2& o) const { return num * o.den == o.num * den; }
    bool operator<=(const Dist2& o) const { return !(o < *this); }
    int cmp(const i256& t) const {  // sign of this - t
        const i256 a = num, b = t * den;
        return a < b ? -1 : (a > b ? 1 : 0);
    }
    double value() const;  // in real units squared
};

Dist2 dist2_point_segment(Pt p, Pt a, Pt b);
Dist2 dist2_box_segment(const Box& q, Pt a, Pt b);
Dist2 dist2_point_boundary(const Domain& d, Pt p);
// distance from a closed box to the polygon boundary (0 if they meet)
Dist2 dist2_box_boundary(const Domain& d, const Box& q);
double dist_point_boundary(const Domain& d, double x, double y);

int orient(Pt a, Pt b, Pt c);
bool segments_intersect(Pt a, Pt b, Pt c, Pt d);
bool segment_meets_box(Pt a, Pt b, const Box& q);

// rational segment helpers used by connecting curves and cut checks
int orient(const QPt& a, const QPt& b, const QPt& c);
bool segments_intersect(const QPt& a, const QPt& b, const QPt& c, const QPt& d);
QPt closest_on_segment(const QPt& p, const QPt& a, const QPt& b);
mpq_class dist2(const QPt& a, const QPt& b);
// part of [a,b] inside the closed box [x0,x1]x[y0,y1]
std::optional<std::pair<QPt, QPt>> clip_segment(const QPt& a, const QPt& b, const mpq_class& x0,
                                                const mpq_class& y0, const mpq_class& x1,
                                                const mpq_class& y1);
// first point of [p,q] (from p) lying on the polygon boundary
std::optional<QPt> first_boundary_hit(const Domain& d, const QPt& p, const QPt& q);
// segment meets the open box (x0,x1)x(y0,y1)
bool segment_meets_open_box(const QPt& a, const QPt& b, const mpq_class& x0, const mpq_class& y0,
                            const mpq_class& x1, const mpq_class& y1);

struct Polyline {
    std::vector<QPt> points;
    bool closed = false;
    double length() const;
    size_t segments() const { return points.size() < 2 ? 0 : points.size() - 1 + (closed ? 1 : 0); }
};

// Closed cycle of grid points at spacing 2^-level; y.front() == y.back().
struct BoundaryCycle {
    int level = 0;
    std::vector<std::pair<int64_t, int64_t>> y;

    size_t edges() const { return y.empty() ? 0 : y.size() - 1; }
    double spacing() const { return std::ldexp(1.0, -level); }
    void build_index();
    // position of a vertex on the cycle; throws NotOnCycle
    size_t index_of(std::pair<int64_t, int64_t> v) const;
    bool has_vertex(std::pair<int64_t, int64_t> v) const;

private:
    std::unordered_map<uint64_t, size_t> index_;
};

// arc length in edges and in real units
size_t cycle_arc(const BoundaryCycle& c, std::pair<int64_t, int64_t> x, std::pair<int64_t, int64_t> y);
double cycle_distance(const BoundaryCycle& c, std::pair<int64_t, int64_t> x, std::pair<int64_t, int64_t> y);

}  // namespace sob
