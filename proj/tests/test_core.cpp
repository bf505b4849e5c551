#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <map>

#include "oracle.hpp"
#include "sob/core.hpp"

using namespace sob;

namespace {

std::shared_ptr<const Decomposition> decompose(const std::string& name, int L) {
    return std::make_shared<const Decomposition>(whitney_decompose(oracle::corpus(name), L));
}

std::string kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return "none";
}

struct Rect {
    double x0, y0, x1, y1;
};
Rect rect(const Square& q) {
    const double l = q.length();
    return {q.i * l, q.j * l, (q.i + 1) * l, (q.j + 1) * l};
}
bool share_edge(const Square& a, const Square& b) {
    const Rect p = rect(a), q = rect(b);
    const double ox = std::min(p.x1, q.x1) - std::max(p.x0, q.x0), oy = std::min(p.y1, q.y1) - std::max(p.y0, q.y0);
    return (ox == 0 && oy > 0) || (oy == 0 && ox > 0);
}
bool touch(const Rect& p, const Rect& q) { return p.x0 <= q.x1 && q.x0 <= p.x1 && p.y0 <= q.y1 && q.y0 <= p.y1; }
double box_gap(const Rect& p, const Rect& q) {
    const double dx = std::max({0.0, p.x0 - q.x1, q.x0 - p.x1}), dy = std::max({0.0, p.y0 - q.y1, q.y0 - p.y1});
    return std::hypot(dx, dy);
}

// core family straight from the definition: squares of level <= n reached from the root through shared edges
std::set<Square> brute_core(const Decomposition& w, int n, const Square& root) {
    std::vector<Square> pool;
    for (const Square& q : w.all())
        if (q.level <= n) pool.push_back(q);
    std::set<Square> seen{root};
    std::deque<Square> todo{root};
    while (!todo.empty()) {
        const Square a = todo.front();
        todo.pop_front();
        for (const Square& b : pool)
            if (!seen.count(b) && share_edge(a, b)) {
                seen.insert(b);
                todo.push_back(b);
            }
    }
    return seen;
}

// boundary layer from a fine grid: core squares touching a fine cell of the domain outside the core
std::set<Square> brute_boundary(const Domain& d, const std::set<Square>& core, int n) {
    const int K = std::max(n + 2, 8);
    const oracle::Grid g(d, K);
    const long S = 1L << K;
    std::vector<char> in_core(static_cast<size_t>(S * S), 0);
    for (const Square& q : core) {
        const long s = 1L << (K - q.level);
        for (long j = q.j * s; j < (q.j + 1) * s; ++j)
            for (long i = q.i * s; i < (q.i + 1) * s; ++i) in_core[static_cast<size_t>(j * S + i)] = 1;
    }
    std::set<Square> out;
    for (const Square& q : core) {
        const long s = 1L << (K - q.level);
        bool hit = false;
        for (long j = q.j * s - 1; j <= (q.j + 1) * s && !hit; ++j)
            for (long i = q.i * s - 1; i <= (q.i + 1) * s && !hit; ++i)
                if (g.cell(i, j) && !in_core[static_cast<size_t>(j * S + i)]) hit = true;
        if (hit) out.insert(q);
    }
    return out;
}

double qd(const mpq_class& v) { return v.get_d(); }

}  // namespace

TEST(CoreRegion, UnitSquareLevel3) {
    const auto w = decompose("unit_square", 5);
    const CoreRegion c = core_region(w, 3);
    EXPECT_EQ(c.root, (Square{3, 2, 2}));
    ASSERT_EQ(c.squares.size(), 16u);
    for (const Square& q : c.squares) EXPECT_TRUE(q.level == 3 && q.i >= 2 && q.i <= 5 && q.j >= 2 && q.j <= 5);
    EXPECT_EQ(c.boundary_layer.size(), 12u);
    EXPECT_EQ(c.cycle.edges(), 16u);
    EXPECT_EQ(c.cycle.y.front(), (GridPt{2, 2}));
}

TEST(CoreRegion, UnitSquareLevel4) {
    const auto w = decompose("unit_square", 5);
    const CoreRegion c = core_region(w, 4, Square{3, 2, 2});
    ASSERT_EQ(c.squares.size(), 96u);
    // the outer ring layer, one square thick
    ASSERT_EQ(c.boundary_layer.size(), 44u);
    for (const Square& q : c.boundary_layer) {
        EXPECT_EQ(q.level, 4);
        EXPECT_TRUE(q.i == 2 || q.i == 13 || q.j == 2 || q.j == 13);
    }
    EXPECT_EQ(c.cycle.edges(), 48u);
    EXPECT_EQ(c.cycle_count, 1u);
    EXPECT_TRUE(c.pinches.empty());
}

TEST(CoreRegion, Errors) {
    const auto w = decompose("unit_square", 4);
    EXPECT_EQ(kind_of([&] { core_region(w, 2); }), "RootNotFound");
    EXPECT_EQ(kind_of([&] { core_region(w, 5); }), "LevelExceedsDecomposition");
    EXPECT_EQ(kind_of([&] { core_region(w, 4, Square{4, 0, 0}); }), "RootNotFound");
    EXPECT_EQ(kind_of([&] { core_region(w, 3, Square{4, 2, 2}); }), "RootNotFound");
}

TEST(CoreRegion, MatchesDefinitionOnCorpus) {
    for (const auto& name : oracle::corpus_names()) {
        const auto w = decompose(name, 6);
        const Square root = default_root(*w);
        for (int n = root.level; n <= 6; ++n) {
            const CoreRegion c = core_region(w, n);
            const std::set<Square> ref = brute_core(*w, n, root);
            EXPECT_EQ(std::set<Square>(c.squares.begin(), c.squares.end()), ref) << name << " n=" << n;
            EXPECT_EQ(std::set<Square>(c.boundary_layer.begin(), c.boundary_layer.end()), brute_boundary(*w->domain, ref, n))
                << name << " n=" << n;
        }
    }
}

TEST(CoreRegion, CycleIsSimpleCounterclockwiseAndComplete) {
    for (const auto& name : oracle::corpus_names()) {
        const auto w = decompose(name, 7);
        const CoreRegion c = core_region(w, 7);
        const auto& y = c.cycle.y;
        ASSERT_GE(y.size(), 5u);
        EXPECT_EQ(y.front(), y.back());
        EXPECT_EQ(y.front(), *std::min_element(y.begin(), y.end())) << name;
        std::set<GridPt> verts(y.begin(), y.end() - 1);
        EXPECT_EQ(verts.size(), y.size() - 1) << name;
        double area = 0;
        for (size_t k = 0; k + 1 < y.size(); ++k) {
            EXPECT_EQ(std::abs(y[k + 1].first - y[k].first) + std::abs(y[k + 1].second - y[k].second), 1);
            area += static_cast<double>(y[k].first * y[k + 1].second - y[k + 1].first * y[k].second);
        }
        EXPECT_GT(area, 0) << name;
        // edge count from the cell flags: level-n cell sides between core and non-core
        const int64_t N = c.cells_per_side;
        size_t sides = 0;
        for (int64_t j = -1; j < N; ++j)
            for (int64_t i = -1; i < N; ++i) {
                if (c.in_core(i, j) != c.in_core(i + 1, j)) ++sides;
                if (c.in_core(i, j) != c.in_core(i, j + 1)) ++sides;
            }
        EXPECT_EQ(c.cycle.edges(), sides) << name;
        // enclosed area matches the core
        double core_area = 0;
        for (const Square& q : c.squares) core_area += q.length() * q.length();
        EXPECT_DOUBLE_EQ(area / 2 * std::ldexp(1.0, -2 * c.n), core_area) << name;
    }
}

TEST(CoreRegion, NestedAndBoundaryAtTopLevel) {
    for (const auto& name : oracle::corpus_names()) {
        const auto w = decompose(name, 8);
        const Square root = default_root(*w);
        for (int n = root.level; n < 8; ++n) {
            const CoreRegion a = core_region(w, n), b = core_region(w, n + 1);
            for (const Square& q : a.squares) EXPECT_TRUE(b.contains(q)) << name << " " << to_string(q);
            for (const Square& q : a.boundary_layer) EXPECT_EQ(q.level, n);
        }
    }
}

TEST(VerifyCore, PassesOnCorpus) {
    for (const auto& name : oracle::corpus_names()) {
        const auto w = decompose(name, 8);
        const Square root = default_root(*w);
        for (int n = root.level; n <= 7; ++n) {
            const Report r = verify_core(core_region(w, n), *w);
            EXPECT_TRUE(r.ok()) << name << " n=" << n << "\n" << r.to_text();
            EXPECT_EQ(r.checks.size(), 7u);
        }
    }
}

TEST(VerifyCore, CombPassesWithSingleCycle) {
    const auto w = decompose("comb", 7);
    const CoreRegion c = core_region(w, 6);
    const Report r = verify_core(c, *w);
    EXPECT_TRUE(r.ok()) << r.to_text();
    EXPECT_TRUE(r.find("vi")->pass);
    EXPECT_EQ(c.cycle_count, 1u);
    // the core reaches into the teeth, so the collar is far from convex
    EXPECT_GT(c.cycle.edges(), 4u * c.boundary_layer.size() / 3);
}

TEST(VerifyCore, DiagonalPairFailsThirdSquareCheck) {
    const auto w = decompose("unit_square", 5);
    const CoreRegion c = core_from_squares(w, 4, {4, 2, 2}, {{4, 2, 2}, {4, 3, 3}});
    const Report r = verify_core(c, *w);
    const Check* iii = r.find("iii");
    ASSERT_TRUE(iii);
    EXPECT_FALSE(iii->pass);
    ASSERT_FALSE(iii->witnesses.empty());
    EXPECT_NE(iii->witnesses[0].find("(4,2,2)"), std::string::npos);
    EXPECT_NE(iii->witnesses[0].find("(4,3,3)"), std::string::npos);
    EXPECT_FALSE(r.find("vi")->pass);
}

TEST(ConnectingCurve, StraightExit) {
    const auto w = decompose("unit_square", 4);
    const CoreRegion c = core_region(w, 3);
    const Polyline p = connecting_curve(c, *w->domain, {2, 4});
    ASSERT_GE(p.points.size(), 2u);
    EXPECT_EQ(p.points.front(), (QPt{mpq_class(1, 4), mpq_class(1, 2)}));
    EXPECT_EQ(p.points.back(), (QPt{0, mpq_class(1, 2)}));
    EXPECT_DOUBLE_EQ(p.length(), 0.25);
}

TEST(ConnectingCurve, CornerVertex) {
    const auto w = decompose("unit_square", 5);
    const CoreRegion c = core_region(w, 4);
    const Polyline p = connecting_curve(c, *w->domain, {2, 2});
    ASSERT_GE(p.points.size(), 2u);
    EXPECT_LE(p.points.size(), 3u);
    EXPECT_EQ(p.points.front(), (QPt{mpq_class(1, 8), mpq_class(1, 8)}));
    EXPECT_EQ(contains_point(*w->domain, p.points.back()), Location::boundary);
    EXPECT_LE(p.length(), 2 * std::sqrt(2.0) / 16);
}

TEST(ConnectingCurve, InteriorVertexHasNoExit) {
    const auto w = decompose("unit_square", 5);
    const CoreRegion c = core_region(w, 4);
    EXPECT_EQ(kind_of([&] { connecting_curve(c, *w->domain, {8, 8}); }), "NoExitSquare");
}

TEST(ConnectingCurve, PropertiesOnCorpus) {
    for (const auto& name : oracle::corpus_names()) {
        const auto w = decompose(name, 7);
        const Square root = default_root(*w);
        for (int n = root.level; n <= 7; ++n) {
            const CoreRegion c = core_region(w, n);
            const Report r = verify_connecting_curves(c, *w->domain);
            EXPECT_TRUE(r.ok()) << name << " n=" << n << "\n" << r.to_text();
        }
    }
}

TEST(ConnectingCurve, AvoidsCoreByPointSampling) {
    const auto w = decompose("spiral", 7);
    const CoreRegion c = core_region(w, 7);
    const double l = std::ldexp(1.0, -c.n);
    for (size_t k = 0; k < c.cycle.edges(); k += 5) {
        const Polyline p = connecting_curve(c, *w->domain, c.cycle.y[k]);
        EXPECT_LE(p.length(), 2 * std::sqrt(2.0) * l + 1e-15);
        for (size_t s = 0; s + 1 < p.points.size(); ++s)
            for (int t = 1; t < 16; ++t) {
                const double x = qd(p.points[s].x) + (qd(p.points[s + 1].x) - qd(p.points[s].x)) * t / 16;
                const double y = qd(p.points[s].y) + (qd(p.points[s + 1].y) - qd(p.points[s].y)) * t / 16;
                const double fx = x / l, fy = y / l;
                // strictly inside a core cell means the curve entered the open core
                if (fx != std::floor(fx) && fy != std::floor(fy))
                    EXPECT_FALSE(c.in_core(static_cast<int64_t>(fx), static_cast<int64_t>(fy)))
                        << "vertex " << k << " sample " << x << "," << y;
            }
    }
}

TEST(Collar, SingleRegionWhenCycleShort) {
    const auto w = decompose("unit_square", 5);
    const CoreRegion c = core_region(w, 4);
    Raster r(w->domain, c, 5);
    const Collar col = partition_collar(c, *w->domain, CollarConfig{}, r);
    ASSERT_EQ(col.regions.size(), 1u);
    EXPECT_TRUE(col.cuts.empty());
    EXPECT_TRUE(col.regions[0].cut_start.points.empty());
    EXPECT_EQ(col.regions[0].arc_end - col.regions[0].arc_begin, c.cycle.edges());
    // [0,1]^2 minus [1/8,7/8]^2 at spacing 2^-9, less the cells touching the boundary
    EXPECT_EQ(col.regions[0].inner_cells, 510u * 510u - 384u * 384u);
    EXPECT_EQ(col.regions[0].collar_squares.size(), c.boundary_layer.size());
    EXPECT_TRUE(verify_collar(c, col, r, CollarConfig{}).ok());
}

TEST(Collar, CombSplitsIntoArcs) {
    const auto w = decompose("comb", 7);
    const CoreRegion c = core_region(w, 6);
    Raster r(w->domain, c, 5);
    CollarConfig cfg;
    cfg.C = 8;
    const Collar col = partition_collar(c, *w->domain, cfg, r);
    const size_t L = c.cycle.edges();
    EXPECT_EQ(col.regions.size(), L / 8);
    EXPECT_EQ(col.cuts.size(), col.regions.size());
    const Report vr = verify_collar(c, col, r, cfg);
    EXPECT_TRUE(vr.ok()) << vr.to_text();

    // every marked cell is inside and within delta of the collar; delta is four raster cells here.
    // A closed raster cell lies in the open domain iff its 3x3 block of cell centres does.
    const oracle::Grid grid(*w->domain, r.g);
    auto closed_inside = [&](int64_t i, int64_t j) {
        for (int64_t dj = -1; dj <= 1; ++dj)
            for (int64_t di = -1; di <= 1; ++di)
                if (!grid.cell(i + di, j + dj)) return false;
        return true;
    };
    std::vector<uint16_t> regs;
    size_t marked = 0, collar_cells = 0, labelled = 0;
    for (const Tile& t : r.tiles())
        for (int64_t lj = 0; lj < r.tile_side(); ++lj)
            for (int64_t li = 0; li < r.tile_side(); ++li) {
                const int64_t i = (t.ti << r.s) + li, j = (t.tj << r.s) + lj;
                const bool in = closed_inside(i, j);
                if (in && !t.core) ++collar_cells;
                if (r.label(i, j)) ++labelled;
                r.regions(i, j, regs);
                if (regs.empty()) continue;
                ++marked;
                EXPECT_TRUE(in);
                if (!t.core) continue;
                bool near = false;
                for (int64_t dj = -4; dj <= 4 && !near; ++dj)
                    for (int64_t di = -4; di <= 4 && !near; ++di)
                        if (!r.in_core(i + di, j + dj)) near = true;
                EXPECT_TRUE(near) << i << "," << j;
            }
    EXPECT_GT(marked, 0u);
    // inner regions and cut cells tile the collar
    EXPECT_EQ(labelled, collar_cells);

    const Report ov = verify_overlap(raster_adjacency(r, col.regions.size()), col.regions);
    EXPECT_TRUE(ov.ok()) << ov.to_text();
    for (const auto& reg : col.regions) {
        EXPECT_FALSE(reg.collar_squares.empty());
        EXPECT_TRUE(std::binary_search(reg.collar_squares.begin(), reg.collar_squares.end(), reg.associated));
        EXPECT_LE(reg.collar_squares.size(), cfg.cap());
    }
}

TEST(Collar, CollectionsPartitionTheBoundaryLayer) {
    const auto w = decompose("spiral", 7);
    const CoreRegion c = core_region(w, 6);
    Raster r(w->domain, c, 5);
    CollarConfig cfg;
    cfg.C = 16;
    const Collar col = partition_collar(c, *w->domain, cfg, r);
    std::map<Square, int> count;
    for (const auto& reg : col.regions)
        for (const Square& q : reg.collar_squares) ++count[q];
    EXPECT_EQ(count.size(), c.boundary_layer.size());
    for (const auto& [q, k] : count) EXPECT_EQ(k, 1) << to_string(q);
    std::map<Square, int> hoods;
    for (const auto& reg : col.regions)
        for (const Square& q : reg.neighborhood) ++hoods[q];
    for (const auto& [q, k] : hoods) EXPECT_LE(k, 3);
}

TEST(Collar, TightSpacingMakesCutsMeet) {
    const auto w = decompose("l_shape", 5);
    const CoreRegion c = core_region(w, 4);
    Raster r(w->domain, c, 5);
    CollarConfig cfg;
    cfg.C = 2;
    EXPECT_EQ(kind_of([&] { partition_collar(c, *w->domain, cfg, r); }), "CutCurvesIntersect");
}

TEST(Collar, CoarseRasterRejected) {
    const auto w = decompose("unit_square", 5);
    const CoreRegion c = core_region(w, 4);
    Raster r(w->domain, c, 3);
    EXPECT_EQ(kind_of([&] { partition_collar(c, *w->domain, CollarConfig{}, r); }), "InvalidArgument");
}

TEST(Overlap, SingleRegionPasses) {
    std::vector<BoundaryRegion> regs(1);
    regs[0].collar_squares = {{3, 2, 2}};
    regs[0].neighborhood = {{3, 2, 2}};
    EXPECT_TRUE(verify_overlap(mask_adjacency({{1, 2, 3}}), regs).ok());
}

TEST(Overlap, ConstructedMasks) {
    // five regions in a ring; masks share one cell with each cyclic neighbour
    std::vector<std::vector<uint64_t>> masks(5);
    for (uint64_t k = 0; k < 5; ++k) {
        masks[k] = {10 * k + 1, 10 * k + 2, 10 * k + 3};
        masks[k].push_back(10 * ((k + 1) % 5) + 1);
    }
    std::vector<BoundaryRegion> regs(5);
    for (size_t k = 0; k < 5; ++k) {
        regs[k].index = k + 1;
        regs[k].collar_squares = {{5, static_cast<int64_t>(k), 0}};
    }
    for (size_t k = 0; k < 5; ++k)
        for (size_t o : {(k + 4) % 5, k, (k + 1) % 5}) regs[k].neighborhood.push_back(regs[o].collar_squares[0]);
    EXPECT_TRUE(verify_overlap(mask_adjacency(masks), regs).ok());

    masks[0].push_back(22);  // H_1 meets H_3
    const Report r = verify_overlap(mask_adjacency(masks), regs);
    const Check* band = r.find("band");
    ASSERT_TRUE(band);
    EXPECT_FALSE(band->pass);
    ASSERT_FALSE(band->witnesses.empty());
    EXPECT_NE(band->witnesses[0].find("1"), std::string::npos);
    EXPECT_NE(band->witnesses[0].find("3"), std::string::npos);
}

TEST(Overlap, SquareInFourCollectionsFails) {
    std::vector<BoundaryRegion> regs(5);
    std::vector<std::vector<uint64_t>> masks(5);
    for (size_t k = 0; k < 5; ++k) {
        regs[k].index = k + 1;
        masks[k] = {k, (k + 1) % 5};
        regs[k].neighborhood = {{5, 0, 0}};
        if (k == 4) regs[k].neighborhood = {{5, 1, 0}};
    }
    const Report r = verify_overlap(mask_adjacency(masks), regs);
    EXPECT_TRUE(r.find("band")->pass);
    EXPECT_FALSE(r.find("collections")->pass);
}

TEST(Separation, UnitSquareRuns) {
    // corner pairs C edges apart are C/sqrt(2) cells apart, so C=16 clears M=8
    const auto w = decompose("unit_square", 5);
    const CoreRegion c = core_region(w, 4);
    CollarConfig cfg;
    cfg.C = 16;
    const SeparationResult s = verify_separation(c, *w->domain, cfg);
    EXPECT_TRUE(s.report.ok()) << s.report.to_text();
    EXPECT_GT(s.tested, 0u);
    EXPECT_EQ(s.violations, 0u);
}

TEST(Separation, CombFarPairsEscape) {
    const auto w = decompose("comb", 7);
    const CoreRegion c = core_region(w, 6);
    CollarConfig cfg;
    cfg.C = 64;
    SeparationOptions opt;
    opt.pairs = 100;
    const SeparationResult s = verify_separation(c, *w->domain, cfg, opt);
    EXPECT_EQ(s.tested, 100u);
    EXPECT_EQ(s.violations, 0u) << s.report.to_text();
    EXPECT_GE(s.min_escape, cfg.M);
}

TEST(Separation, TooSmallSpacingIsCaught) {
    // pairs a few edges apart on the unit square stay close to each other
    const auto w = decompose("unit_square", 6);
    const CoreRegion c = core_region(w, 5);
    CollarConfig cfg;
    cfg.C = 2;
    const SeparationResult s = verify_separation(c, *w->domain, cfg);
    EXPECT_GT(s.violations, 0u);
    EXPECT_FALSE(s.report.ok());
}

TEST(Separation, Deterministic) {
    const auto w = decompose("comb", 7);
    const CoreRegion c = core_region(w, 6);
    CollarConfig cfg;
    cfg.C = 64;
    SeparationOptions opt;
    opt.pairs = 20;
    EXPECT_EQ(verify_separation(c, *w->domain, cfg, opt).report.to_json(),
              verify_separation(c, *w->domain, cfg, opt).report.to_json());
}

TEST(Halo, UnitSquareFirstRing) {
    const auto w = decompose("unit_square", 4);
    const CoreRegion c = core_region(w, 3);
    const HaloSet h = halo(c, *w, std::ldexp(1.0, -3) / 10);
    // level-4 squares bordering [1/4,3/4]^2
    ASSERT_EQ(h.squares.size(), 36u);
    for (const Square& q : h.squares) {
        EXPECT_EQ(q.level, 4);
        EXPECT_TRUE(q.i >= 3 && q.i <= 12 && q.j >= 3 && q.j <= 12);
    }
    EXPECT_LE(h.max_chain, 3u);
    for (const auto& [q, chain] : h.chains) {
        EXPECT_TRUE(valid_chain(chain));
        EXPECT_EQ(chain.squares.front(), q);
        EXPECT_EQ(chain.squares.back(), h.assignment.at(q));
    }
    EXPECT_TRUE(verify_halo(h, CollarConfig{}).ok());
}

TEST(Halo, ZeroRadiusIsContact) {
    const auto w = decompose("unit_square", 4);
    const CoreRegion c = core_region(w, 3);
    EXPECT_EQ(halo(c, *w, 0).squares, halo(c, *w, std::ldexp(1.0, -3) / 10).squares);
}

TEST(Halo, MatchesDistanceOracle) {
    for (const auto& name : oracle::corpus_names()) {
        const auto w = decompose(name, 8);
        const Square root = default_root(*w);
        for (int n = root.level; n < 8; ++n) {
            const CoreRegion c = core_region(w, n);
            const double r = std::ldexp(1.0, -n) / 10;
            const HaloSet h = halo(c, *w, r);
            std::set<Square> ref;
            for (const Square& q : w->all()) {
                if (c.contains(q)) continue;
                for (const Square& p : c.boundary_layer)
                    if (box_gap(rect(q), rect(p)) <= r) {
                        ref.insert(q);
                        break;
                    }
            }
            EXPECT_EQ(std::set<Square>(h.squares.begin(), h.squares.end()), ref) << name << " n=" << n;
            for (const auto& [q, p] : h.assignment) {
                EXPECT_TRUE(touch(rect(q), rect(p)));
                EXPECT_TRUE(std::binary_search(c.boundary_layer.begin(), c.boundary_layer.end(), p));
            }
            EXPECT_TRUE(verify_halo(h, CollarConfig{}).ok()) << name << " n=" << n;
        }
    }
}

TEST(Halo, NeedsDeeperDecomposition) {
    const auto w = decompose("unit_square", 4);
    const CoreRegion c = core_region(w, 4);
    EXPECT_EQ(kind_of([&] { halo(c, *w, 0.01); }), "LevelExceedsDecomposition");
    const CoreRegion c3 = core_region(w, 3);
    EXPECT_EQ(kind_of([&] { halo(c3, *w, -1); }), "InvalidArgument");
}
