#include "sob/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace sob {

namespace {

constexpr int kMaxCoreLevel = 13;

size_t idx(int64_t N, int64_t i, int64_t j) { return static_cast<size_t>(j * N + i); }

std::string gp(GridPt p) { return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")"; }

void mark_covered(CoreRegion& c) {
    const int64_t N = c.cells_per_side;
    c.flags.assign(static_cast<size_t>(N * N), 0);
    for (const auto& [L, v] : c.w->levels) {
        if (L > c.n) break;
        const int d = c.n - L;
        for (const Square& q : v)
            for (int64_t j = q.j << d; j < (q.j + 1) << d; ++j)
                for (int64_t i = q.i << d; i < (q.i + 1) << d; ++i) c.flags[idx(N, i, j)] |= 1;
    }
}

// Trace the boundary of the core cells as directed edges with the core on the left.
void trace_cycle(CoreRegion& c) {
    const int64_t N = c.cells_per_side;
    const int64_t V = N + 1;
    auto vkey = [V](int64_t a, int64_t b) { return static_cast<uint64_t>(b * V + a); };
    std::unordered_map<uint64_t, std::vector<GridPt>> out;
    auto add = [&](int64_t a, int64_t b, int64_t a2, int64_t b2) { out[vkey(a, b)].push_back({a2, b2}); };
    size_t edges = 0;
    for (int64_t j = 0; j < N; ++j)
        for (int64_t i = 0; i < N; ++i) {
            if (!c.in_core(i, j)) continue;
            if (!c.in_core(i, j - 1)) add(i, j, i + 1, j), ++edges;
            if (!c.in_core(i + 1, j)) add(i + 1, j, i + 1, j + 1), ++edges;
            if (!c.in_core(i, j + 1)) add(i + 1, j + 1, i, j + 1), ++edges;
            if (!c.in_core(i - 1, j)) add(i, j + 1, i, j), ++edges;
        }
    c.boundary_edges = edges;
    c.pinches.clear();
    c.cycle_count = 0;
    c.cycle = BoundaryCycle{};
    c.cycle.level = c.n;
    if (!edges) return;
    GridPt start{N + 1, N + 1};
    for (const auto& [k, v] : out) {
        const GridPt p{static_cast<int64_t>(k % V), static_cast<int64_t>(k / V)};
        if (p < start) start = p;
        if (v.size() > 1) c.pinches.push_back(p);
    }
    std::sort(c.pinches.begin(), c.pinches.end());

    std::unordered_map<uint64_t, std::vector<uint8_t>> used;
    for (const auto& [k, v] : out) used[k].assign(v.size(), 0);
    // at a pinch keep the cell on the left: prefer left turn, then straight, then right
    auto next = [&](GridPt from, GridPt at) -> std::optional<GridPt> {
        const auto& cand = out[vkey(at.first, at.second)];
        auto& u = used[vkey(at.first, at.second)];
        const int64_t dx = at.first - from.first, dy = at.second - from.second;
        const std::pair<int64_t, int64_t> pref[3] = {{-dy, dx}, {dx, dy}, {dy, -dx}};
        for (const auto& d : pref)
            for (size_t k = 0; k < cand.size(); ++k)
                if (!u[k] && cand[k].first - at.first == d.first && cand[k].second - at.second == d.second) {
                    u[k] = 1;
                    return cand[k];
                }
        for (size_t k = 0; k < cand.size(); ++k)
            if (!u[k]) {
                u[k] = 1;
                return cand[k];
            }
        return std::nullopt;
    };
    auto take_first = [&](GridPt at) -> std::optional<GridPt> {
        const auto& cand = out[vkey(at.first, at.second)];
        auto& u = used[vkey(at.first, at.second)];
        for (size_t k = 0; k < cand.size(); ++k)
            if (!u[k]) {
                u[k] = 1;
                return cand[k];
            }
        return std::nullopt;
    };
    auto run = [&](GridPt s0, std::vector<GridPt>* keep) {
        auto first = take_first(s0);
        if (!first) return false;
        GridPt prev = s0, cur = *first;
        if (keep) keep->push_back(s0);
        while (true) {
            if (keep) keep->push_back(cur);
            if (cur == s0) break;
            auto nx = next(prev, cur);
            if (!nx) break;
            prev = cur;
            cur = *nx;
        }
        return true;
    };
    run(start, &c.cycle.y);
    c.cycle_count = 1;
    std::vector<uint64_t> keys;
    for (const auto& [k, v] : out) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (uint64_t k : keys) {
        const GridPt p{static_cast<int64_t>(k % V), static_cast<int64_t>(k / V)};
        while (run(p, nullptr)) ++c.cycle_count;
    }
    c.cycle.build_index();
}

void finish(CoreRegion& c) {
    const int d0 = c.n;
    c.square_set.clear();
    c.top_layer.clear();
    c.boundary_layer.clear();
    std::sort(c.squares.begin(), c.squares.end());
    c.core_cells = 0;
    for (uint8_t f : c.flags) c.core_cells += (f & 2) ? 1 : 0;
    for (const Square& q : c.squares) {
        c.square_set.insert(q);
        if (q.level == d0) c.top_layer.push_back(q);
        const int d = d0 - q.level;
        const int64_t i0 = (q.i << d) - 1, i1 = (q.i + 1) << d;
        const int64_t j0 = (q.j << d) - 1, j1 = (q.j + 1) << d;
        bool touches = false;
        for (int64_t i = i0; i <= i1 && !touches; ++i)
            touches = !c.in_core(i, j0) || !c.in_core(i, j1);
        for (int64_t j = j0; j <= j1 && !touches; ++j)
            touches = !c.in_core(i0, j) || !c.in_core(i1, j);
        if (touches) c.boundary_layer.push_back(q);
    }
    trace_cycle(c);
}

void check_level(const Decomposition& w, int n) {
    if (n < 1 || n > w.max_level)
        throw Error("LevelExceedsDecomposition",
                    "level " + std::to_string(n) + " outside [1," + std::to_string(w.max_level) + "]");
    if (n > kMaxCoreLevel)
        throw Error("LevelExceedsDecomposition", "core level above " + std::to_string(kMaxCoreLevel) + " is not supported");
}

}  // namespace

Square default_root(const Decomposition& w) {
    for (const auto& [L, v] : w.levels)
        if (!v.empty()) return v.front();
    throw Error("RootNotFound", "decomposition is empty");
}

CoreRegion core_region(std::shared_ptr<const Decomposition> w, int n, std::optional<Square> root) {
    check_level(*w, n);
    const Square r = root ? *root : default_root(*w);
    if (!w->contains(r) || r.level > n)
        throw Error("RootNotFound", "root " + to_string(r) + " is not a square of level <= " + std::to_string(n));
    CoreRegion c;
    c.w = w;
    c.n = n;
    c.root = r;
    c.cells_per_side = int64_t(1) << n;
    const int64_t N = c.cells_per_side;
    mark_covered(c);
    std::vector<GridPt> queue;
    const int d = n - r.level;
    for (int64_t j = r.j << d; j < (r.j + 1) << d; ++j)
        for (int64_t i = r.i << d; i < (r.i + 1) << d; ++i) {
            c.flags[idx(N, i, j)] |= 2;
            queue.push_back({i, j});
        }
    for (size_t q = 0; q < queue.size(); ++q) {
        const auto [i, j] = queue[q];
        const int64_t ni[4] = {i - 1, i + 1, i, i}, nj[4] = {j, j, j - 1, j + 1};
        for (int e = 0; e < 4; ++e) {
            if (ni[e] < 0 || nj[e] < 0 || ni[e] >= N || nj[e] >= N) continue;
            uint8_t& f = c.flags[idx(N, ni[e], nj[e])];
            if ((f & 1) && !(f & 2)) {
                f |= 2;
                queue.push_back({ni[e], nj[e]});
            }
        }
    }
    for (const auto& [L, v] : w->levels) {
        if (L > n) break;
        for (const Square& q : v)
            if (c.in_core(q.i << (n - L), q.j << (n - L))) c.squares.push_back(q);
    }
    finish(c);
    return c;
}

CoreRegion core_from_squares(std::shared_ptr<const Decomposition> w, int n, Square root, const std::vector<Square>& family) {
    check_level(*w, n);
    CoreRegion c;
    c.w = w;
    c.n = n;
    c.root = root;
    c.cells_per_side = int64_t(1) << n;
    const int64_t N = c.cells_per_side;
    mark_covered(c);
    for (const Square& q : family) {
        if (q.level > n) throw Error("InvalidArgument", "core square " + to_string(q) + " finer than level n");
        const int d = n - q.level;
        for (int64_t j = q.j << d; j < (q.j + 1) << d; ++j)
            for (int64_t i = q.i << d; i < (q.i + 1) << d; ++i) c.flags[idx(N, i, j)] |= 2;
    }
    c.squares = family;
    c.squares.erase(std::unique((std::sort(c.squares.begin(), c.squares.end()), c.squares.begin()), c.squares.end()),
                    c.squares.end());
    finish(c);
    return c;
}

Report verify_core(const CoreRegion& c, const Decomposition& w) {
    Report r;
    r.title = "core";
    const int n = c.n;
    const int64_t N = c.cells_per_side;

    Check& c1 = r.add("i", true, "core family nested in the next level's");
    if (w.max_level < n + 1 || !c.w) {
        Report::fail(c1, "decomposition depth " + std::to_string(w.max_level) + " < n+1");
    } else {
        const CoreRegion next = core_region(c.w, n + 1, c.root);
        size_t missing = 0;
        for (const Square& q : c.squares)
            if (!next.contains(q)) ++missing, Report::fail(c1, to_string(q));
        c1.detail += "; " + std::to_string(c.squares.size()) + " squares, " + std::to_string(missing) + " missing";
    }

    // (ii) truncated: sample centres of level n+2 cells far from the complement,
    // flood from the root inside that region, every reached sample must be in the core
    Check& c2 = r.add("ii", true, "points at distance > 8*sqrt(2)*2^-n connected to the root lie in the core");
    {
        const Domain& d = *w.domain;
        const int m = n + 2;
        const int64_t S = int64_t(1) << m;
        const double thr = 128.0 * std::ldexp(1.0, -2 * n);
        const i256 thr_raw = i256(128) * (i256(1) << (2 * (kFrac - n)));
        const int64_t hs = int64_t(1) << (kFrac - m);
        std::vector<uint8_t> far(static_cast<size_t>(S * S), 0);
        for (int64_t j = 0; j < S; ++j)
            for (int64_t i = 0; i < S; ++i) {
                const double x = (i + 0.5) * std::ldexp(1.0, -m), y = (j + 0.5) * std::ldexp(1.0, -m);
                const double dd = dist_point_boundary(d, x, y);
                const double d2 = dd * dd;
                if (d2 < thr * (1 - 1e-9)) continue;
                const Pt p{i * hs + hs / 2, j * hs + hs / 2};
                if (contains_point(d, p) != Location::inside) continue;
                if (d2 <= thr * (1 + 1e-9) && dist2_point_boundary(d, p).cmp(thr_raw) <= 0) continue;
                far[static_cast<size_t>(j * S + i)] = 1;
            }
        std::vector<GridPt> queue;
        const int dr = m - c.root.level;
        for (int64_t j = c.root.j << dr; j < (c.root.j + 1) << dr; ++j)
            for (int64_t i = c.root.i << dr; i < (c.root.i + 1) << dr; ++i)
                if (far[static_cast<size_t>(j * S + i)] == 1) {
                    far[static_cast<size_t>(j * S + i)] = 2;
                    queue.push_back({i, j});
                }
        for (size_t q = 0; q < queue.size(); ++q) {
            const auto [i, j] = queue[q];
            if (!c.in_core(i >> 2, j >> 2)) Report::fail(c2, "sample cell " + gp({i, j}) + " at level " + std::to_string(m));
            const int64_t ni[4] = {i - 1, i + 1, i, i}, nj[4] = {j, j, j - 1, j + 1};
            for (int e = 0; e < 4; ++e) {
                if (ni[e] < 0 || nj[e] < 0 || ni[e] >= S || nj[e] >= S) continue;
                uint8_t& f = far[static_cast<size_t>(nj[e] * S + ni[e])];
                if (f == 1) {
                    f = 2;
                    queue.push_back({ni[e], nj[e]});
                }
            }
        }
        c2.detail += "; " + std::to_string(queue.size()) + " samples" + (queue.empty() ? " (vacuous)" : "");
    }

    Check& c3 = r.add("iii", true, "corner-touching top-layer squares share a third core square");
    for (const Square& q : c.top_layer)
        for (int di : {-1, 1})
            for (int dj : {-1, 1}) {
                const Square o{n, q.i + di, q.j + dj};
                if (!c.contains(o) || o < q) continue;
                if (!c.in_core(q.i + di, q.j) && !c.in_core(q.i, q.j + dj))
                    Report::fail(c3, to_string(q) + " & " + to_string(o));
            }

    Check& c4 = r.add("iv", true, "boundary-layer squares have level n");
    for (const Square& q : c.boundary_layer)
        if (q.level != n) Report::fail(c4, to_string(q));

    Check& c5 = r.add("v", true, "boundary-layer squares touch an uncovered level-n cell");
    for (const Square& q : c.boundary_layer) {
        const int d = n - q.level;
        const int64_t i0 = (q.i << d) - 1, i1 = (q.i + 1) << d;
        const int64_t j0 = (q.j << d) - 1, j1 = (q.j + 1) << d;
        bool ok = false;
        for (int64_t j = j0; j <= j1 && !ok; ++j)
            for (int64_t i = i0; i <= i1 && !ok; ++i)
                if ((i == i0 || i == i1 || j == j0 || j == j1) && !c.covered(i, j)) ok = true;
        if (!ok) Report::fail(c5, to_string(q));
    }

    Check& c6 = r.add("vi", true, "simply connected: V-E+F=1, one simple boundary cycle, turning 4");
    {
        size_t F = 0, E = 0, V = 0;
        for (int64_t j = 0; j < N; ++j)
            for (int64_t i = 0; i < N; ++i) {
                if (!c.in_core(i, j)) continue;
                ++F;
                E += 2;
                if (!c.in_core(i + 1, j)) ++E;
                if (!c.in_core(i, j + 1)) ++E;
            }
        for (int64_t j = 0; j <= N; ++j)
            for (int64_t i = 0; i <= N; ++i)
                if (c.in_core(i - 1, j - 1) || c.in_core(i, j - 1) || c.in_core(i - 1, j) || c.in_core(i, j)) ++V;
        const long long chi = static_cast<long long>(V) - static_cast<long long>(E) + static_cast<long long>(F);
        long turning = 0;
        const auto& y = c.cycle.y;
        for (size_t k = 0; k + 1 < y.size(); ++k) {
            const GridPt a = y[k == 0 ? y.size() - 2 : k - 1], b = y[k], e = y[k + 1];
            const int64_t cr = (b.first - a.first) * (e.second - b.second) - (b.second - a.second) * (e.first - b.first);
            turning += cr > 0 ? 1 : (cr < 0 ? -1 : 0);
        }
        c6.detail += "; V-E+F=" + std::to_string(chi) + ", cycles=" + std::to_string(c.cycle_count) +
                     ", pinches=" + std::to_string(c.pinches.size()) + ", turning=" + std::to_string(turning);
        if (chi != 1) Report::fail(c6, "euler characteristic " + std::to_string(chi));
        if (c.cycle_count != 1) Report::fail(c6, std::to_string(c.cycle_count) + " boundary cycles");
        for (const GridPt& p : c.pinches) Report::fail(c6, "pinch vertex " + gp(p));
        if (c.cycle.edges() != c.boundary_edges) Report::fail(c6, "cycle misses boundary edges");
        if (turning != 4) Report::fail(c6, "turning " + std::to_string(turning));
    }

    Check& c7 = r.add("cycle_edges", true, "every cycle edge is a side of a level-n core square");
    for (size_t k = 0; k < c.cycle.edges(); ++k) {
        const GridPt a = c.cycle.y[k], b = c.cycle.y[k + 1];
        const int64_t dx = b.first - a.first, dy = b.second - a.second;
        const Square cell = dx > 0 ? Square{n, a.first, a.second}
                            : dx < 0 ? Square{n, a.first - 1, a.second - 1}
                            : dy > 0 ? Square{n, a.first - 1, a.second}
                                     : Square{n, a.first, a.second - 1};
        if (!c.contains(cell)) Report::fail(c7, "edge " + std::to_string(k) + " " + gp(a) + "->" + gp(b));
    }
    return r;
}

// ---------------------------------------------------------------------------
// connecting curves

namespace {

struct QBox {
    mpq_class x0, y0, x1, y1;
};

QBox qbox(const Square& q) {
    const QPt a = grid_point(q.level, q.i, q.j), b = grid_point(q.level, q.i + 1, q.j + 1);
    return {a.x, a.y, b.x, b.y};
}

// closest point of boundary ∩ box to p; lexicographic tie-break
std::optional<QPt> closest_boundary_in_box(const Domain& d, const QPt& p, const QBox& b) {
    std::optional<QPt> best;
    mpq_class bd;
    for (size_t k = 0; k < d.size(); ++k) {
        auto cl = clip_segment(to_q(d.at(k)), to_q(d.at(k + 1)), b.x0, b.y0, b.x1, b.y1);
        if (!cl) continue;
        QPt c = closest_on_segment(p, cl->first, cl->second);
        mpq_class dd = dist2(p, c);
        if (!best || dd < bd || (dd == bd && c < *best)) {
            best = c;
            bd = dd;
        }
    }
    return best;
}

QPt clamp_to(const QPt& p, const QBox& b) {
    QPt r = p;
    if (r.x < b.x0) r.x = b.x0;
    if (r.x > b.x1) r.x = b.x1;
    if (r.y < b.y0) r.y = b.y0;
    if (r.y > b.y1) r.y = b.y1;
    return r;
}

}  // namespace

CutCurve connecting_curve_detail(const CoreRegion& c, const Domain& d, GridPt x) {
    const int n = c.n;
    const auto [a, b] = x;
    std::vector<Square> cand;
    for (const auto& [i, j] : {GridPt{a - 1, b - 1}, GridPt{a - 1, b}, GridPt{a, b - 1}, GridPt{a, b}})
        if (!c.covered(i, j) && !c.in_core(i, j)) cand.push_back({n, i, j});
    if (cand.empty()) throw Error("NoExitSquare", "every grid cell at " + gp(x) + " is covered up to level " + std::to_string(n));
    const QPt xq = grid_point(n, a, b);
    for (const Square& q : cand) {
        if (!box_meets_boundary(d, q.box())) continue;
        auto y = closest_boundary_in_box(d, xq, qbox(q));
        CutCurve cc;
        cc.exit = q;
        cc.line.points = {xq};
        if (!(*y == xq)) cc.line.points.push_back(*y);
        return cc;
    }
    const Square q1 = cand.front();
    std::vector<Square> ring;
    for (const auto& [di, dj] : {GridPt{-1, 0}, GridPt{0, -1}, GridPt{0, 1}, GridPt{1, 0}, GridPt{-1, -1}, GridPt{-1, 1},
                                 GridPt{1, -1}, GridPt{1, 1}})
        ring.push_back({n, q1.i + di, q1.j + dj});
    for (const Square& q2 : ring) {
        if (!box_meets_boundary(d, q2.box())) continue;
        const QBox b1 = qbox(q1), b2 = qbox(q2);
        const QBox shared{qmax(b1.x0, b2.x0), qmax(b1.y0, b2.y0), qmin(b1.x1, b2.x1), qmin(b1.y1, b2.y1)};
        const QPt z = clamp_to(xq, shared);
        const QPt y = *closest_boundary_in_box(d, z, b2);
        CutCurve cc;
        cc.exit = q1;
        cc.via = q2;
        cc.line.points = {xq};
        if (!(z == xq)) cc.line.points.push_back(z);
        if (!(y == cc.line.points.back())) cc.line.points.push_back(y);
        return cc;
    }
    throw Error("NoExitSquare", "no grid cell next to " + to_string(q1) + " meets the boundary");
}

Polyline connecting_curve(const CoreRegion& c, const Domain& d, GridPt x) { return connecting_curve_detail(c, d, x).line; }

Report verify_connecting_curves(const CoreRegion& c, const Domain& d) {
    Report r;
    r.title = "connecting_curves";
    const int n = c.n;
    const mpq_class l = grid_point(n, 1, 0).x;
    const mpq_class l2 = l * l;
    Check& built = r.add("built", true, "a curve exists for every cycle vertex");
    Check& len = r.add("length", true, "each segment <= sqrt(2)*2^-n, total <= 2*sqrt(2)*2^-n");
    Check& seg = r.add("segments", true, "at most two segments, injective");
    Check& end = r.add("ends_on_boundary", true, "last point on the boundary, earlier points inside");
    Check& core = r.add("avoids_core", true, "no segment meets the open interior of a core cell");
    double worst = 0;
    const size_t L = c.cycle.edges();
    for (size_t k = 0; k < L; ++k) {
        const GridPt x = c.cycle.y[k];
        Polyline pl;
        try {
            pl = connecting_curve(c, d, x);
        } catch (const Error& e) {
            Report::fail(built, gp(x) + " " + e.what());
            continue;
        }
        const auto& P = pl.points;
        if (P.size() < 2 || P.size() > 3) Report::fail(seg, gp(x) + " has " + std::to_string(P.size()) + " points");
        if (P.size() == 3) {
            const mpq_class dot = (P[1].x - P[0].x) * (P[2].x - P[1].x) + (P[1].y - P[0].y) * (P[2].y - P[1].y);
            if (orient(P[0], P[1], P[2]) == 0 && dot <= 0) Report::fail(seg, gp(x) + " folds back");
        }
        for (size_t s = 0; s + 1 < P.size(); ++s)
            if (dist2(P[s], P[s + 1]) > 2 * l2) Report::fail(len, gp(x) + " segment " + std::to_string(s));
        worst = std::max(worst, pl.length() / to_double(l));
        if (P.size() >= 2) {
            if (contains_point(d, P.back()) != Location::boundary) Report::fail(end, gp(x) + " ends off the boundary");
            for (size_t s = 0; s + 1 < P.size(); ++s) {
                auto hit = first_boundary_hit(d, P[s], P[s + 1]);
                const bool last = s + 2 == P.size();
                if (hit && (!last || !(*hit == P[s + 1]))) Report::fail(end, gp(x) + " touches the boundary early");
            }
        }
        for (size_t s = 0; s + 1 < P.size(); ++s) {
            const mpq_class scale = mpq_class(int64_t(1) << n);
            const mpq_class lo_x = qmin(P[s].x, P[s + 1].x) * scale, hi_x = qmax(P[s].x, P[s + 1].x) * scale;
            const mpq_class lo_y = qmin(P[s].y, P[s + 1].y) * scale, hi_y = qmax(P[s].y, P[s + 1].y) * scale;
            auto fl = [](const mpq_class& q) {
                mpz_class z;
                mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
                return z.get_si();
            };
            for (int64_t j = fl(lo_y) - 1; j <= fl(hi_y); ++j)
                for (int64_t i = fl(lo_x) - 1; i <= fl(hi_x); ++i) {
                    if (!c.in_core(i, j)) continue;
                    const QBox b = qbox({n, i, j});
                    if (segment_meets_open_box(P[s], P[s + 1], b.x0, b.y0, b.x1, b.y1))
                        Report::fail(core, gp(x) + " crosses core cell " + gp({i, j}));
                }
        }
    }
    len.detail += "; max length / 2^-n = " + std::to_string(worst) + " over " + std::to_string(L) + " vertices";
    if (worst > 2 * std::sqrt(2.0) + 1e-12) Report::fail(len, "total length ratio " + std::to_string(worst));
    return r;
}

}  // namespace sob
