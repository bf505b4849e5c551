#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "sob/core.hpp"

namespace sob {

namespace {

std::string gp(GridPt p) { return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")"; }

int64_t floor_q(const mpq_class& q) {
    mpz_class z;
    mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return z.get_si();
}

// level-n cell on the core side of cycle edge a->b
Square left_cell(int n, GridPt a, GridPt b) {
    const int64_t dx = b.first - a.first, dy = b.second - a.second;
    if (dx > 0) return {n, a.first, a.second};
    if (dx < 0) return {n, a.first - 1, a.second - 1};
    if (dy > 0) return {n, a.first - 1, a.second};
    return {n, a.first, a.second - 1};
}

// raster cells just outside cycle edge a->b (right-hand side)
template <class F>
void outer_strip(GridPt a, GridPt b, int64_t T, F&& f) {
    const int64_t dx = b.first - a.first, dy = b.second - a.second;
    if (dx > 0)
        for (int64_t i = a.first * T; i < b.first * T; ++i) f(i, a.second * T - 1);
    else if (dx < 0)
        for (int64_t i = b.first * T; i < a.first * T; ++i) f(i, a.second * T);
    else if (dy > 0)
        for (int64_t j = a.second * T; j < b.second * T; ++j) f(a.first * T, j);
    else
        for (int64_t j = b.second * T; j < a.second * T; ++j) f(a.first * T - 1, j);
}

struct Seg {
    double ax, ay, bx, by;  // raster units
};

double dist2_seg(double px, double py, const Seg& s) {
    const double vx = s.bx - s.ax, vy = s.by - s.ay;
    const double wx = px - s.ax, wy = py - s.ay;
    const double L = vx * vx + vy * vy;
    double t = L > 0 ? (wx * vx + wy * vy) / L : 0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = wx - t * vx, dy = wy - t * vy;
    return dx * dx + dy * dy;
}

bool boxes_overlap(const QPt& a, const QPt& b, const QPt& c, const QPt& d) {
    return qmax(a.x, b.x) >= qmin(c.x, d.x) && qmax(c.x, d.x) >= qmin(a.x, b.x) && qmax(a.y, b.y) >= qmin(c.y, d.y) &&
           qmax(c.y, d.y) >= qmin(a.y, b.y);
}

bool polylines_meet(const Polyline& p, const Polyline& q) {
    for (size_t i = 0; i + 1 < p.points.size(); ++i)
        for (size_t j = 0; j + 1 < q.points.size(); ++j) {
            const QPt &a = p.points[i], &b = p.points[i + 1], &c = q.points[j], &d = q.points[j + 1];
            if (boxes_overlap(a, b, c, d) && segments_intersect(a, b, c, d)) return true;
        }
    if (p.points.size() == 1 || q.points.size() == 1) {
        const Polyline& one = p.points.size() == 1 ? p : q;
        const Polyline& other = p.points.size() == 1 ? q : p;
        for (const QPt& o : other.points)
            if (o == one.points[0]) return true;
    }
    return false;
}

}  // namespace

Collar partition_collar(const CoreRegion& c, const Domain& d, const CollarConfig& cfg, Raster& raster) {
    if (raster.n != c.n) throw Error("InvalidArgument", "raster was built for another level");
    if (cfg.C < 1) throw Error("InvalidArgument", "C must be positive");
    if (cfg.delta_shift >= raster.s) throw Error("InvalidArgument", "raster too coarse for the collar dilation");
    const int n = c.n;
    const int64_t T = raster.tile_side();
    const size_t L = c.cycle.edges();
    if (L == 0) throw Error("InvalidArgument", "empty boundary cycle");
    const size_t C = static_cast<size_t>(cfg.C);
    const size_t R = L < 2 * C ? 1 : L / C;

    Collar col;
    col.regions.resize(R);
    auto region_of = [&](size_t k) { return R == 1 ? size_t(0) : std::min(k / C, R - 1); };
    for (size_t r = 0; r < R; ++r) {
        auto& reg = col.regions[r];
        reg.index = r + 1;
        reg.arc_begin = R == 1 ? 0 : r * C;
        reg.arc_end = (R == 1 || r + 1 == R) ? L : (r + 1) * C;
        reg.start = c.cycle.y[reg.arc_begin];
    }

    // cut curves, pairwise disjoint
    if (R > 1) {
        for (size_t r = 0; r < R; ++r) col.cuts.push_back(connecting_curve(c, d, col.regions[r].start));
        for (size_t a = 0; a < R; ++a)
            for (size_t b = a + 1; b < R; ++b)
                if (polylines_meet(col.cuts[a], col.cuts[b]))
                    throw Error("CutCurvesIntersect", "cuts at " + gp(col.regions[a].start) + " and " +
                                                          gp(col.regions[b].start) + " meet; increase C");
        for (size_t r = 0; r < R; ++r) {
            col.regions[r].cut_start = col.cuts[r];
            col.regions[r].cut_end = col.cuts[(r + 1) % R];
        }
    }

    raster.clear_labels();
    for (Tile& t : raster.tiles())
        if (!t.core) t.label.assign(static_cast<size_t>(T * T), 0);

    auto free_cell = [&](int64_t i, int64_t j) { return raster.inside(i, j) && !raster.in_core(i, j); };
    auto lab = [&](int64_t i, int64_t j) -> uint16_t* {
        if (i < 0 || j < 0 || i >= raster.dims() || j >= raster.dims()) return nullptr;
        Tile* t = raster.tile(i >> raster.s, j >> raster.s);
        if (!t || t->label.empty()) return nullptr;
        return &t->label[raster.local(i, j)];
    };

    // cells met by a cut
    const mpq_class scale = mpq_class(mpz_class(1) << raster.g);
    for (const Polyline& cut : col.cuts)
        for (size_t s = 0; s + 1 < cut.points.size(); ++s) {
            const QPt a{cut.points[s].x * scale, cut.points[s].y * scale};
            const QPt b{cut.points[s + 1].x * scale, cut.points[s + 1].y * scale};
            const mpq_class lx = qmin(a.x, b.x), hx = qmax(a.x, b.x);
            for (int64_t j = floor_q(qmin(a.y, b.y)) - 1; j <= floor_q(qmax(a.y, b.y)); ++j) {
                auto cl = clip_segment(a, b, lx, mpq_class(j), hx, mpq_class(j + 1));
                if (!cl) continue;
                const mpq_class x0 = qmin(cl->first.x, cl->second.x), x1 = qmax(cl->first.x, cl->second.x);
                int64_t i0 = floor_q(x0);
                if (mpq_class(i0) == x0) --i0;
                for (int64_t i = i0; i <= floor_q(x1); ++i)
                    if (uint16_t* p = lab(i, j); p && *p != kCutLabel && free_cell(i, j)) {
                        *p = kCutLabel;
                        ++col.cut_cells;
                    }
            }
        }

    // seeds along each arc, then flood per region
    std::vector<std::vector<GridPt>> seeds(R);
    for (size_t k = 0; k < L; ++k) {
        const size_t r = region_of(k);
        const uint16_t id = static_cast<uint16_t>(r + 1);
        outer_strip(c.cycle.y[k], c.cycle.y[k + 1], T, [&](int64_t i, int64_t j) {
            if (!free_cell(i, j)) return;
            uint16_t* p = lab(i, j);
            if (!p || *p == kCutLabel || *p == id) return;
            if (*p != 0)
                throw Error("CollarLeak", "raster cell " + gp({i, j}) + " borders arcs of regions " + std::to_string(*p) +
                                              " and " + std::to_string(id));
            *p = id;
            seeds[r].push_back({i, j});
        });
    }
    for (size_t r = 0; r < R; ++r) {
        const uint16_t id = static_cast<uint16_t>(r + 1);
        std::vector<GridPt>& q = seeds[r];
        for (size_t h = 0; h < q.size(); ++h) {
            const auto [i, j] = q[h];
            const int64_t ni[4] = {i - 1, i + 1, i, i}, nj[4] = {j, j, j - 1, j + 1};
            for (int e = 0; e < 4; ++e) {
                if (!free_cell(ni[e], nj[e])) continue;
                uint16_t* p = lab(ni[e], nj[e]);
                if (!p || *p == kCutLabel || *p == id) continue;
                if (*p != 0)
                    throw Error("CollarLeak", "regions " + std::to_string(id) + " and " + std::to_string(*p) +
                                                  " touch at raster cell " + gp({ni[e], nj[e]}));
                *p = id;
                q.push_back({ni[e], nj[e]});
            }
        }
        col.regions[r].inner_cells = q.size();
        q.clear();
        q.shrink_to_fit();
    }

    // pockets cut off from every arc join the region nearest through cut cells
    for (Tile& t : raster.tiles()) {
        if (t.core) continue;
        for (uint32_t k = 0; k < static_cast<uint32_t>(T * T); ++k) {
            if (!t.cell_inside(k) || t.label[k] != 0) continue;
            std::vector<GridPt> comp{{t.ti * T + (k & (T - 1)), t.tj * T + (k >> raster.s)}};
            std::set<GridPt> seen{comp[0]};
            uint16_t found = 0;
            for (size_t h = 0; h < comp.size() && !found; ++h) {
                const auto [i, j] = comp[h];
                const int64_t ni[4] = {i - 1, i + 1, i, i}, nj[4] = {j, j, j - 1, j + 1};
                for (int e = 0; e < 4 && !found; ++e) {
                    if (!free_cell(ni[e], nj[e]) || seen.count({ni[e], nj[e]})) continue;
                    const uint16_t v = *lab(ni[e], nj[e]);
                    if (v != 0 && v != kCutLabel) {
                        found = v;
                        break;
                    }
                    seen.insert({ni[e], nj[e]});
                    comp.push_back({ni[e], nj[e]});
                }
            }
            if (!found) throw Error("UnreachableCells", "inside raster cell " + gp(comp[0]) + " reaches no collar region");
            for (const GridPt& p : comp) {
                uint16_t* v = lab(p.first, p.second);
                if (*v == 0) {
                    *v = found;
                    ++col.pocket_cells;
                    ++col.regions[found - 1].inner_cells;
                }
            }
        }
    }

    // outer regions: dilate by delta along the arc and both cuts, keep what connects
    const double delta = std::ldexp(1.0, raster.s - cfg.delta_shift);
    const double delta2 = delta * delta;
    std::vector<std::vector<uint8_t>> scratch(raster.tiles().size());
    auto sc = [&](int64_t i, int64_t j, bool create) -> uint8_t* {
        if (i < 0 || j < 0 || i >= raster.dims() || j >= raster.dims()) return nullptr;
        const Tile* t = raster.tile(i >> raster.s, j >> raster.s);
        if (!t) return nullptr;
        auto& v = scratch[static_cast<size_t>(t - raster.tiles().data())];
        if (v.empty()) {
            if (!create) return nullptr;
            v.assign(static_cast<size_t>(T * T), 0);
        }
        return &v[raster.local(i, j)];
    };
    const double g2 = std::ldexp(1.0, raster.g);
    for (size_t r = 0; r < R; ++r) {
        const uint16_t id = static_cast<uint16_t>(r + 1);
        auto& reg = col.regions[r];
        std::vector<Seg> segs;
        for (size_t k = reg.arc_begin; k < reg.arc_end; ++k) {
            const GridPt a = c.cycle.y[k], b = c.cycle.y[k + 1];
            segs.push_back({double(a.first * T), double(a.second * T), double(b.first * T), double(b.second * T)});
        }
        for (const Polyline* pl : {&reg.cut_start, &reg.cut_end})
            for (size_t s = 0; s + 1 < pl->points.size(); ++s)
                segs.push_back({to_double(pl->points[s].x) * g2, to_double(pl->points[s].y) * g2,
                                to_double(pl->points[s + 1].x) * g2, to_double(pl->points[s + 1].y) * g2});
        std::vector<GridPt> band;
        for (const Seg& sg : segs) {
            const int64_t i0 = static_cast<int64_t>(std::floor(std::min(sg.ax, sg.bx) - delta)) - 1;
            const int64_t i1 = static_cast<int64_t>(std::ceil(std::max(sg.ax, sg.bx) + delta));
            const int64_t j0 = static_cast<int64_t>(std::floor(std::min(sg.ay, sg.by) - delta)) - 1;
            const int64_t j1 = static_cast<int64_t>(std::ceil(std::max(sg.ay, sg.by) + delta));
            for (int64_t j = j0; j <= j1; ++j)
                for (int64_t i = i0; i <= i1; ++i) {
                    if (dist2_seg(i + 0.5, j + 0.5, sg) >= delta2 || !raster.inside(i, j)) continue;
                    uint8_t* m = sc(i, j, true);
                    if (!m || *m) continue;
                    *m = 1;
                    band.push_back({i, j});
                }
        }
        std::sort(band.begin(), band.end(), [](const GridPt& a, const GridPt& b) {
            return a.second != b.second ? a.second < b.second : a.first < b.first;
        });
        std::vector<GridPt> q;
        for (const GridPt& p : band) {
            if (raster.label(p.first, p.second) == id) continue;
            const int64_t ni[4] = {p.first - 1, p.first + 1, p.first, p.first};
            const int64_t nj[4] = {p.second, p.second, p.second - 1, p.second + 1};
            for (int e = 0; e < 4; ++e)
                if (raster.label(ni[e], nj[e]) == id) {
                    *sc(p.first, p.second, false) = 2;
                    q.push_back(p);
                    break;
                }
        }
        for (size_t h = 0; h < q.size(); ++h) {
            const auto [i, j] = q[h];
            const int64_t ni[4] = {i - 1, i + 1, i, i}, nj[4] = {j, j, j - 1, j + 1};
            for (int e = 0; e < 4; ++e) {
                uint8_t* m = sc(ni[e], nj[e], false);
                if (!m || *m != 1 || raster.label(ni[e], nj[e]) == id) continue;
                *m = 2;
                q.push_back({ni[e], nj[e]});
            }
        }
        for (const GridPt& p : q) {
            Tile* t = raster.tile(p.first >> raster.s, p.second >> raster.s);
            t->extra.push_back({raster.local(p.first, p.second), id});
        }
        reg.outer_cells = reg.inner_cells + q.size();
        for (auto& v : scratch) {
            v.clear();
            v.shrink_to_fit();
        }
    }
    for (Tile& t : raster.tiles()) std::sort(t.extra.begin(), t.extra.end());

    // collar square collections: each boundary-layer square joins one arc. A matching first gives
    // every arc a square owning one of its edges; the rest join the arc of their first cycle edge,
    // or failing that of their first cycle vertex
    std::map<Square, size_t> first_edge;
    std::vector<std::vector<Square>> arc_squares(R);
    for (size_t k = 0; k < L; ++k) {
        Square cell = left_cell(n, c.cycle.y[k], c.cycle.y[k + 1]);
        if (!c.contains(cell))
            if (auto cov = c.w->covering(cell)) cell = *cov;
        first_edge.emplace(cell, k);
        auto& v = arc_squares[region_of(k)];
        if (std::find(v.begin(), v.end(), cell) == v.end()) v.push_back(cell);
    }
    for (size_t r = 0; r < R; ++r)
        std::stable_partition(arc_squares[r].begin(), arc_squares[r].end(),
                              [&](const Square& q) { return region_of(first_edge.at(q)) == r; });
    std::map<Square, size_t> matched;
    for (size_t r = 0; r < R; ++r) {
        std::set<Square> seen;
        std::function<bool(size_t)> augment = [&](size_t a) {
            for (const Square& q : arc_squares[a]) {
                if (!seen.insert(q).second) continue;
                auto it = matched.find(q);
                if (it == matched.end() || augment(it->second)) {
                    matched[q] = a;
                    return true;
                }
            }
            return false;
        };
        augment(r);
    }
    for (const Square& q : c.boundary_layer) {
        std::optional<size_t> region;
        if (auto m = matched.find(q); m != matched.end()) {
            region = m->second;
        } else if (auto it = first_edge.find(q); it != first_edge.end()) {
            region = region_of(it->second);
        } else {
            std::optional<size_t> pos;
            const int d = n - q.level;
            for (int64_t a : {q.i << d, (q.i + 1) << d})
                for (int64_t b : {q.j << d, (q.j + 1) << d})
                    if (c.cycle.has_vertex({a, b})) {
                        const size_t v = c.cycle.index_of({a, b});
                        if (!pos || v < *pos) pos = v;
                    }
            if (pos) region = region_of(*pos);
        }
        col.regions[region.value_or(0)].collar_squares.push_back(q);
    }
    for (size_t r = 0; r < R; ++r) {
        auto& reg = col.regions[r];
        std::sort(reg.collar_squares.begin(), reg.collar_squares.end());
        col.max_collection = std::max(col.max_collection, reg.collar_squares.size());
        if (reg.collar_squares.empty())
            throw Error("EmptyCollarCollection", "region " + std::to_string(reg.index) + " has no boundary-layer square");
        reg.associated = reg.collar_squares.front();
        for (const Square& q : reg.collar_squares) {
            const Box b = q.box();
            const int64_t side = int64_t(1) << (kFrac - n);
            const Pt xp{reg.start.first * side, reg.start.second * side};
            if (b.contains(xp)) {
                reg.associated = q;
                break;
            }
        }
    }
    for (size_t r = 0; r < R; ++r) {
        std::vector<Square> nb;
        for (size_t o : {(r + R - 1) % R, r, (r + 1) % R})
            nb.insert(nb.end(), col.regions[o].collar_squares.begin(), col.regions[o].collar_squares.end());
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        col.regions[r].neighborhood = std::move(nb);
    }
    return col;
}

Adjacency raster_adjacency(const Raster& r, size_t regions) {
    Adjacency adj(regions, std::vector<uint8_t>(regions, 0));
    std::vector<uint16_t> set;
    for (const Tile& t : r.tiles()) {
        if (!t.label.empty())
            for (uint16_t v : t.label)
                if (v && v != kCutLabel && v <= regions) adj[v - 1][v - 1] = 1;
        for (size_t a = 0; a < t.extra.size();) {
            const uint32_t k = t.extra[a].first;
            set.clear();
            if (!t.label.empty() && t.label[k] && t.label[k] != kCutLabel) set.push_back(t.label[k]);
            for (; a < t.extra.size() && t.extra[a].first == k; ++a) set.push_back(t.extra[a].second);
            for (uint16_t x : set)
                for (uint16_t y : set)
                    if (x <= regions && y <= regions) adj[x - 1][y - 1] = 1;
        }
    }
    return adj;
}

Adjacency mask_adjacency(const std::vector<std::vector<uint64_t>>& masks) {
    const size_t R = masks.size();
    Adjacency adj(R, std::vector<uint8_t>(R, 0));
    std::vector<std::vector<uint64_t>> m(masks);
    for (auto& v : m) std::sort(v.begin(), v.end());
    for (size_t a = 0; a < R; ++a)
        for (size_t b = a; b < R; ++b) {
            size_t i = 0, j = 0;
            while (i < m[a].size() && j < m[b].size()) {
                if (m[a][i] == m[b][j]) {
                    adj[a][b] = adj[b][a] = 1;
                    break;
                }
                m[a][i] < m[b][j] ? ++i : ++j;
            }
        }
    return adj;
}

Report verify_overlap(const Adjacency& adj, const std::vector<BoundaryRegion>& regions) {
    Report r;
    r.title = "overlap";
    const size_t R = adj.size();
    Check& band = r.add("band", true, "outer regions meet iff cyclic index distance <= 1");
    for (size_t i = 0; i < R; ++i)
        for (size_t j = i + 1; j < R; ++j) {
            const size_t dd = std::min(j - i, R - (j - i));
            const bool expect = dd <= 1;
            if (static_cast<bool>(adj[i][j]) != expect)
                Report::fail(band, "H" + std::to_string(i + 1) + (adj[i][j] ? " meets " : " misses ") + "H" + std::to_string(j + 1));
        }
    band.detail += "; " + std::to_string(R) + " regions";
    Check& three = r.add("collections", true, "every boundary-layer square lies in at most 3 neighbourhood collections");
    std::map<Square, size_t> count;
    for (const auto& reg : regions)
        for (const Square& q : reg.neighborhood) ++count[q];
    size_t worst = 0;
    for (const auto& [q, k] : count) {
        worst = std::max(worst, k);
        if (k > 3) Report::fail(three, to_string(q) + " in " + std::to_string(k));
    }
    three.detail += "; max " + std::to_string(worst);
    return r;
}

Report verify_collar(const CoreRegion& c, const Collar& col, const Raster& r, const CollarConfig& cfg) {
    Report rep;
    rep.title = "collar";
    const size_t R = col.regions.size();
    const size_t L = c.cycle.edges();
    Check& cnt = rep.add("region_count", true, "region count matches the arc spacing rule");
    const size_t expect = L < 2 * static_cast<size_t>(cfg.C) ? 1 : L / static_cast<size_t>(cfg.C);
    if (R != expect) Report::fail(cnt, std::to_string(R) + " != " + std::to_string(expect));
    cnt.detail += "; L=" + std::to_string(L) + ", regions=" + std::to_string(R);

    Check& cap = rep.add("collection_cap", true, "collar square collections within the configured cap");
    for (const auto& reg : col.regions)
        if (reg.collar_squares.size() > cfg.cap())
            Report::fail(cap, "region " + std::to_string(reg.index) + " has " + std::to_string(reg.collar_squares.size()));
    cap.detail += "; max " + std::to_string(col.max_collection) + ", cap " + std::to_string(cfg.cap());

    Check& cuts = rep.add("cuts", true, "cut curves pairwise disjoint and short");
    const mpq_class l = grid_point(c.n, 1, 0).x;
    for (size_t a = 0; a < col.cuts.size(); ++a) {
        if (col.cuts[a].length() > 2 * std::sqrt(2.0) * to_double(l) * (1 + 1e-12)) Report::fail(cuts, "cut " + std::to_string(a) + " too long");
        for (size_t b = a + 1; b < col.cuts.size(); ++b)
            if (polylines_meet(col.cuts[a], col.cuts[b])) Report::fail(cuts, std::to_string(a) + " meets " + std::to_string(b));
    }

    Check& cover = rep.add("partition", true, "inner regions cover the collar cells except cut cells");
    Check& within = rep.add("dilation", true, "outer region cells lie within delta of the collar");
    const int64_t T = r.tile_side();
    const double delta = std::ldexp(1.0, r.s - cfg.delta_shift);
    size_t total = 0;
    for (const Tile& t : r.tiles()) {
        if (!t.core)
            for (uint32_t k = 0; k < static_cast<uint32_t>(T * T); ++k) {
                if (!t.cell_inside(k)) continue;
                const uint16_t v = t.label.empty() ? 0 : t.label[k];
                if (v == kCutLabel) continue;
                ++total;
                if (v == 0 || v > R)
                    Report::fail(cover, gp({t.ti * T + (k & (T - 1)), t.tj * T + (k >> r.s)}));
            }
        if (!t.core) continue;
        for (const auto& [k, id] : t.extra) {
            // distance from the cell centre to the nearest non-core tile
            const double cx = (k & (T - 1)) + 0.5, cy = (k >> r.s) + 0.5;
            double best = 1e300;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (r.core_tile(t.ti + di, t.tj + dj)) continue;
                    const double x0 = di * double(T), y0 = dj * double(T);
                    const double dx = std::max({x0 - cx, 0.0, cx - (x0 + T)});
                    const double dy = std::max({y0 - cy, 0.0, cy - (y0 + T)});
                    best = std::min(best, std::hypot(dx, dy));
                }
            if (!(best < delta)) Report::fail(within, "region " + std::to_string(id) + " tile " + gp({t.ti, t.tj}));
        }
    }
    cover.detail += "; " + std::to_string(total) + " cells, " + std::to_string(col.cut_cells) + " cut, " +
                    std::to_string(col.pocket_cells) + " pocket";
    return rep;
}

// ---------------------------------------------------------------------------

SeparationResult verify_separation(const CoreRegion& c, const Domain& d, const CollarConfig& cfg,
                                   const SeparationOptions& opt) {
    SeparationResult res;
    res.report.title = "separation";
    Check& chk = res.report.add("escape", true, "");
    const int n = c.n, o = opt.oversample;
    const int g = n + o;
    if (g > kMaxLevel || g > 13) throw Error("InvalidArgument", "separation raster too fine");
    const int64_t S = int64_t(1) << g, F = int64_t(1) << o;
    const int64_t hs = int64_t(1) << (kFrac - g);
    const size_t L = c.cycle.edges();
    const size_t C = static_cast<size_t>(cfg.C);
    chk.detail = "paths between vertices at arc distance >= C leave B(x, M*2^-n)";
    if (L < 2 * C || opt.pairs == 0) {
        chk.detail += "; vacuous (cycle has " + std::to_string(L) + " edges)";
        return res;
    }
    std::vector<uint8_t> free(static_cast<size_t>(S * S), 0);
    for (int64_t j = 0; j < S; ++j)
        for (int64_t i = 0; i < S; ++i) {
            if (c.in_core(i >> o, j >> o)) continue;
            if (contains_point(d, Pt{i * hs + hs / 2, j * hs + hs / 2}) == Location::inside)
                free[static_cast<size_t>(j * S + i)] = 1;
        }
    auto at = [&](int64_t i, int64_t j) { return i >= 0 && j >= 0 && i < S && j < S && free[static_cast<size_t>(j * S + i)]; };
    auto around = [&](GridPt v) {
        std::vector<GridPt> out;
        for (int64_t dj : {-1, 0})
            for (int64_t di : {-1, 0}) {
                const int64_t i = v.first * F + di, j = v.second * F + dj;
                if (at(i, j)) out.push_back({i, j});
            }
        return out;
    };
    const double unit = static_cast<double>(F);  // 2^-n in raster units
    const double rad = cfg.M * unit;
    std::vector<int32_t> parent(static_cast<size_t>(S * S));
    std::mt19937_64 rng(opt.seed);
    res.min_escape = 1e300;
    for (size_t p = 0; p < opt.pairs; ++p) {
        const size_t a = std::uniform_int_distribution<size_t>(0, L - 1)(rng);
        const size_t off = C + std::uniform_int_distribution<size_t>(0, L - 2 * C)(rng);
        const size_t b = (a + off) % L;
        const GridPt x = c.cycle.y[a], y = c.cycle.y[b];
        const auto src = around(x), dst = around(y);
        if (src.empty() || dst.empty()) {
            Report::fail(chk, "no free raster cell at " + gp(src.empty() ? x : y));
            continue;
        }
        ++res.tested;
        const double cx = static_cast<double>(x.first * F), cy = static_cast<double>(x.second * F);
        auto rdist = [&](int64_t i, int64_t j) { return std::hypot(i + 0.5 - cx, j + 0.5 - cy); };
        // shortest path, recording where it goes
        std::fill(parent.begin(), parent.end(), -1);
        std::vector<int64_t> q;
        for (const GridPt& s : src) {
            const int64_t k = s.second * S + s.first;
            parent[static_cast<size_t>(k)] = static_cast<int32_t>(k);
            q.push_back(k);
        }
        std::set<int64_t> goal;
        for (const GridPt& t : dst) goal.insert(t.second * S + t.first);
        int64_t hit = -1;
        bool inside_only = true;  // restricted search: never left the ball
        for (size_t h = 0; h < q.size() && hit < 0; ++h) {
            const int64_t k = q[h];
            if (goal.count(k)) hit = k;
        }
        for (size_t h = 0; h < q.size() && hit < 0; ++h) {
            const int64_t k = q[h], i = k % S, j = k / S;
            const int64_t ni[4] = {i - 1, i + 1, i, i}, nj[4] = {j, j, j - 1, j + 1};
            for (int e = 0; e < 4; ++e) {
                if (!at(ni[e], nj[e])) continue;
                const int64_t kk = nj[e] * S + ni[e];
                if (parent[static_cast<size_t>(kk)] >= 0) continue;
                parent[static_cast<size_t>(kk)] = static_cast<int32_t>(k);
                q.push_back(kk);
                if (goal.count(kk)) {
                    hit = kk;
                    break;
                }
            }
        }
        double esc = 0;
        if (hit >= 0)
            for (int64_t k = hit;; k = parent[static_cast<size_t>(k)]) {
                esc = std::max(esc, rdist(k % S, k / S));
                if (parent[static_cast<size_t>(k)] == k) break;
            }
        // any path inside the ball at all?
        std::fill(parent.begin(), parent.end(), -1);
        q.clear();
        for (const GridPt& s : src)
            if (rdist(s.first, s.second) < rad) {
                const int64_t k = s.second * S + s.first;
                parent[static_cast<size_t>(k)] = 0;
                q.push_back(k);
            }
        for (size_t h = 0; h < q.size(); ++h) {
            const int64_t k = q[h], i = k % S, j = k / S;
            if (goal.count(k)) {
                inside_only = false;
                break;
            }
            const int64_t ni[4] = {i - 1, i + 1, i, i}, nj[4] = {j, j, j - 1, j + 1};
            for (int e = 0; e < 4; ++e) {
                if (!at(ni[e], nj[e]) || rdist(ni[e], nj[e]) >= rad) continue;
                const int64_t kk = nj[e] * S + ni[e];
                if (parent[static_cast<size_t>(kk)] >= 0) continue;
                parent[static_cast<size_t>(kk)] = 0;
                q.push_back(kk);
            }
        }
        if (!inside_only) {
            ++res.violations;
            Report::fail(chk, gp(x) + " -> " + gp(y) + " connected inside the ball");
        }
        if (hit >= 0) res.min_escape = std::min(res.min_escape, esc / unit);
    }
    if (res.min_escape == 1e300) res.min_escape = 0;
    chk.detail += "; pairs=" + std::to_string(res.tested) + ", violations=" + std::to_string(res.violations) +
                  ", min escape radius=" + std::to_string(res.min_escape) + "*2^-n, M=" + std::to_string(cfg.M);
    return res;
}

// ---------------------------------------------------------------------------

HaloSet halo(const CoreRegion& c, const Decomposition& w, double pou_support_radius) {
    if (w.max_level < c.n + 1)
        throw Error("LevelExceedsDecomposition", "halo needs decomposition depth n+1");
    if (pou_support_radius < 0) throw Error("InvalidArgument", "negative support radius");
    const int n = c.n;
    const CoreRegion next = core_region(c.w, n + 1, c.root);
    const double l = std::ldexp(1.0, -n);
    const double r2 = pou_support_radius * pou_support_radius;
    HaloSet hs;
    for (const Square& q : w.all()) {
        if (c.contains(q)) continue;
        const double x0 = q.length() * q.i, y0 = q.length() * q.j, x1 = x0 + q.length(), y1 = y0 + q.length();
        const int64_t i0 = static_cast<int64_t>(std::floor((x0 - pou_support_radius) / l)) - 1;
        const int64_t i1 = static_cast<int64_t>(std::floor((x1 + pou_support_radius) / l));
        const int64_t j0 = static_cast<int64_t>(std::floor((y0 - pou_support_radius) / l)) - 1;
        const int64_t j1 = static_cast<int64_t>(std::floor((y1 + pou_support_radius) / l));
        bool near = false;
        for (int64_t j = j0; j <= j1 && !near; ++j)
            for (int64_t i = i0; i <= i1 && !near; ++i) {
                if (!c.in_core(i, j)) continue;
                const double dx = std::max({i * l - x1, 0.0, x0 - (i + 1) * l});
                const double dy = std::max({j * l - y1, 0.0, y0 - (j + 1) * l});
                near = dx * dx + dy * dy <= r2;
            }
        if (near) hs.squares.push_back(q);
    }
    std::sort(hs.squares.begin(), hs.squares.end());
    SquareSet boundary(c.boundary_layer.begin(), c.boundary_layer.end());
    std::map<Square, size_t> mult;
    for (const Square& q : hs.squares) {
        std::optional<Square> best;
        bool best_edge = false;
        for (const Neighbor& nb : neighbors(w, q)) {
            if (!boundary.count(nb.q)) continue;
            const bool edge = nb.contact == Contact::edge;
            if (!best || (edge && !best_edge)) {
                best = nb.q;
                best_edge = edge;
            }
        }
        if (!best)
            throw Error("NoTouchingCollarSquare", to_string(q) + " touches no boundary-layer square");
        hs.assignment[q] = *best;
        SquareSet allowed = next.square_set;
        allowed.insert(q);
        Chain ch = find_chain(w, q, *best, allowed);
        hs.max_chain = std::max(hs.max_chain, ch.size());
        for (const Square& s : ch.squares) hs.max_multiplicity = std::max(hs.max_multiplicity, ++mult[s]);
        hs.chains[q] = std::move(ch);
    }
    return hs;
}

Report verify_halo(const HaloSet& h, const CollarConfig& cfg) {
    Report r;
    r.title = "halo";
    Check& len = r.add("chain_length", true, "chains within the configured cap");
    for (const auto& [q, ch] : h.chains)
        if (ch.size() > cfg.chain_cap || !valid_chain(ch)) Report::fail(len, to_string(q) + " chain of " + std::to_string(ch.size()));
    len.detail += "; " + std::to_string(h.squares.size()) + " halo squares, max chain " + std::to_string(h.max_chain);
    Check& mult = r.add("multiplicity", true, "no square appears in more chains than the cap");
    if (h.max_multiplicity > cfg.halo_multiplicity_cap) Report::fail(mult, "max " + std::to_string(h.max_multiplicity));
    mult.detail += "; max " + std::to_string(h.max_multiplicity) + ", cap " + std::to_string(cfg.halo_multiplicity_cap);
    return r;
}

}  // namespace sob
