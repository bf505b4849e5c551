#include "sob/raster.hpp"

#include <algorithm>
#include <deque>

#include "sob/core.hpp"

namespace sob {

namespace {

// inside mask for a non-core tile: closed raster cell inside the open domain
void fill_inside(const Domain& d, Tile& t, int s, int g) {
    const int64_t T = int64_t(1) << s;
    const int64_t hs = int64_t(1) << (kFrac - g);
    const int64_t ox = t.ti * T, oy = t.tj * T;
    const Box tb{ox * hs, oy * hs, (ox + T) * hs, (oy + T) * hs};

    std::vector<uint8_t> mark(static_cast<size_t>(T * T), 0);  // 1 touched by an edge
    bool any = false;
    auto floor_div = [](int64_t a, int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    for (size_t k = 0; k < d.size(); ++k) {
        const Pt a = d.at(k), b = d.at(k + 1);
        const Box eb{std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
        if (!eb.intersects(tb)) continue;
        any = true;
        const int64_t i0 = std::max<int64_t>(floor_div(eb.x0 - 1, hs), ox);
        const int64_t i1 = std::min<int64_t>(floor_div(eb.x1, hs), ox + T - 1);
        const int64_t j0 = std::max<int64_t>(floor_div(eb.y0 - 1, hs), oy);
        const int64_t j1 = std::min<int64_t>(floor_div(eb.y1, hs), oy + T - 1);
        const bool axis = a.x == b.x || a.y == b.y;
        for (int64_t j = j0; j <= j1; ++j)
            for (int64_t i = i0; i <= i1; ++i) {
                auto& m = mark[static_cast<size_t>((j - oy) * T + (i - ox))];
                if (m) continue;
                if (axis || segment_meets_box(a, b, {i * hs, j * hs, (i + 1) * hs, (j + 1) * hs})) m = 1;
            }
    }
    if (!any) {
        const Pt c{tb.x0 + (tb.x1 - tb.x0) / 2, tb.y0 + (tb.y1 - tb.y0) / 2};
        t.all_inside = contains_point(d, c) == Location::inside;
        if (!t.all_inside) t.inside.assign(static_cast<size_t>(T * T), 0);
        return;
    }
    // untouched components are entirely in or out; one exact test each
    t.inside.assign(static_cast<size_t>(T * T), 0);
    std::vector<uint8_t> seen(mark);
    std::vector<uint32_t> comp;
    size_t total = 0;
    for (uint32_t start = 0; start < static_cast<uint32_t>(T * T); ++start) {
        if (seen[start]) continue;
        comp.clear();
        comp.push_back(start);
        seen[start] = 1;
        for (size_t q = 0; q < comp.size(); ++q) {
            const int64_t li = comp[q] & (T - 1), lj = comp[q] >> s;
            const int64_t ni[4] = {li - 1, li + 1, li, li};
            const int64_t nj[4] = {lj, lj, lj - 1, lj + 1};
            for (int e = 0; e < 4; ++e) {
                if (ni[e] < 0 || nj[e] < 0 || ni[e] >= T || nj[e] >= T) continue;
                const uint32_t k = static_cast<uint32_t>((nj[e] << s) | ni[e]);
                if (!seen[k]) {
                    seen[k] = 1;
                    comp.push_back(k);
                }
            }
        }
        const int64_t li = start & (T - 1), lj = start >> s;
        const Pt c{(ox + li) * hs + hs / 2, (oy + lj) * hs + hs / 2};
        if (contains_point(d, c) == Location::inside) {
            for (uint32_t k : comp) t.inside[k] = 1;
            total += comp.size();
        }
    }
    if (total == static_cast<size_t>(T * T)) {
        t.all_inside = true;
        t.inside.clear();
    }
}

}  // namespace

Raster::Raster(std::shared_ptr<const Domain> d, const CoreRegion& c, int s_) : n(c.n), s(s_), g(c.n + s_), domain(std::move(d)) {
    if (s < 1 || g > kMaxLevel) throw Error("InvalidArgument", "raster level n+s must be in [n+1," + std::to_string(kMaxLevel) + "]");
    h = std::ldexp(1.0, -g);
    const int64_t N = c.cells_per_side;
    core_.assign(static_cast<size_t>(N * N), 0);
    for (int64_t j = 0; j < N; ++j)
        for (int64_t i = 0; i < N; ++i) core_[static_cast<size_t>(j * N + i)] = c.in_core(i, j) ? 1 : 0;
    for (int64_t tj = 0; tj < N; ++tj)
        for (int64_t ti = 0; ti < N; ++ti) {
            const bool core = core_tile(ti, tj);
            bool keep;
            if (core) {
                keep = false;
                for (int dj = -1; dj <= 1 && !keep; ++dj)
                    for (int di = -1; di <= 1 && !keep; ++di)
                        if (!core_tile(ti + di, tj + dj)) keep = true;
            } else {
                keep = box_meets_closure(*domain, Square{n, ti, tj}.box());
            }
            if (!keep) continue;
            Tile t;
            t.ti = ti;
            t.tj = tj;
            t.core = core;
            if (core)
                t.all_inside = true;
            else
                fill_inside(*domain, t, s, g);
            index_.emplace(key(ti, tj), tiles_.size());
            tiles_.push_back(std::move(t));
        }
}

bool Raster::core_tile(int64_t ti, int64_t tj) const {
    const int64_t N = int64_t(1) << n;
    if (ti < 0 || tj < 0 || ti >= N || tj >= N) return false;
    return core_[static_cast<size_t>(tj * N + ti)] != 0;
}

const Tile* Raster::tile(int64_t ti, int64_t tj) const {
    auto it = index_.find(key(ti, tj));
    return it == index_.end() ? nullptr : &tiles_[it->second];
}

Tile* Raster::tile(int64_t ti, int64_t tj) {
    auto it = index_.find(key(ti, tj));
    return it == index_.end() ? nullptr : &tiles_[it->second];
}

bool Raster::inside(int64_t i, int64_t j) const {
    if (i < 0 || j < 0 || i >= dims() || j >= dims()) return false;
    if (const Tile* t = tile(i >> s, j >> s)) return t->cell_inside(local(i, j));
    return core_tile(i >> s, j >> s);
}

uint16_t Raster::label(int64_t i, int64_t j) const {
    if (i < 0 || j < 0 || i >= dims() || j >= dims()) return 0;
    const Tile* t = tile(i >> s, j >> s);
    if (!t || t->label.empty()) return 0;
    return t->label[local(i, j)];
}

void Raster::regions(int64_t i, int64_t j, std::vector<uint16_t>& out) const {
    out.clear();
    if (i < 0 || j < 0 || i >= dims() || j >= dims()) return;
    const Tile* t = tile(i >> s, j >> s);
    if (!t) return;
    const uint32_t k = local(i, j);
    if (!t->label.empty() && t->label[k] && t->label[k] != kCutLabel) out.push_back(t->label[k]);
    auto it = std::lower_bound(t->extra.begin(), t->extra.end(), std::make_pair(k, uint16_t(0)));
    for (; it != t->extra.end() && it->first == k; ++it) out.push_back(it->second);
}

bool Raster::in_region(int64_t i, int64_t j, uint16_t r) const {
    if (i < 0 || j < 0 || i >= dims() || j >= dims()) return false;
    const Tile* t = tile(i >> s, j >> s);
    if (!t) return false;
    const uint32_t k = local(i, j);
    if (!t->label.empty() && t->label[k] == r) return true;
    return std::binary_search(t->extra.begin(), t->extra.end(), std::make_pair(k, r));
}

void Raster::clear_labels() {
    for (Tile& t : tiles_) {
        t.label.clear();
        t.extra.clear();
    }
}

}  // namespace sob
