#include "sob/whitney.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace sob {

namespace {

Box block_of(const Square& q) {
    const int64_t s = q.side();
    return {(q.i - 1) * s, (q.j - 1) * s, (q.i + 2) * s, (q.j + 2) * s};
}

const std::vector<Square> kEmpty;

}  // namespace

std::optional<Square> Decomposition::covering(const Square& cell) const {
    for (int L = std::min(cell.level, max_level); L >= 1; --L) {
        const Square a = cell.ancestor(L);
        if (members.count(a)) return a;
    }
    return std::nullopt;
}

const std::vector<Square>& Decomposition::level(int n) const {
    auto it = levels.find(n);
    return it == levels.end() ? kEmpty : it->second;
}

std::vector<Square> Decomposition::all() const {
    std::vector<Square> out;
    out.reserve(members.size());
    for (const auto& [n, v] : levels) out.insert(out.end(), v.begin(), v.end());
    return out;
}

Decomposition Decomposition::from_squares(std::shared_ptr<const Domain> d, const std::vector<Square>& sq, int max_level) {
    Decomposition w;
    w.domain = std::move(d);
    w.max_level = max_level;
    for (const Square& q : sq) {
        if (w.members.insert(q).second) w.levels[q.level].push_back(q);
        w.max_level = std::max(w.max_level, q.level);
    }
    for (auto& [n, v] : w.levels) std::sort(v.begin(), v.end());
    return w;
}

Decomposition whitney_decompose(std::shared_ptr<const Domain> d, int max_level) {
    if (max_level < 1 || max_level > kMaxLevel)
        throw Error("InvalidArgument", "max_level must be in [1," + std::to_string(kMaxLevel) + "]");
    Decomposition w;
    w.domain = d;
    w.max_level = max_level;
    // cells of the current level that meet the closed domain and are not yet covered
    std::vector<Square> open;
    if (box_meets_closure(*d, Square{0, 0, 0}.box())) open.push_back({0, 0, 0});
    bool any = false;
    for (int n = 1; n <= max_level; ++n) {
        std::vector<Square> next, found;
        for (const Square& p : open) {
            for (int c = 0; c < 4; ++c) {
                const Square q{n, 2 * p.i + (c & 1), 2 * p.j + (c >> 1)};
                if (!box_meets_closure(*d, q.box())) continue;
                if (box_in_domain(*d, block_of(q)))
                    found.push_back(q);
                else
                    next.push_back(q);
            }
        }
        std::sort(found.begin(), found.end());
        if (!found.empty()) any = true;
        for (const Square& q : found) w.members.insert(q);
        w.levels[n] = std::move(found);
        open = std::move(next);
    }
    if (!any)
        throw Error("DomainTooThin", "no Whitney square up to level " + std::to_string(max_level) +
                                         "; increase max_level");
    return w;
}

const char* to_string(Contact c) {
    switch (c) {
        case Contact::edge: return "edge";
        case Contact::corner: return "corner";
        default: return "overlap";
    }
}

std::optional<Contact> contact_of(const Square& a, const Square& b) {
    const Box p = a.box(), q = b.box();
    const int64_t ox = std::min(p.x1, q.x1) - std::max(p.x0, q.x0);
    const int64_t oy = std::min(p.y1, q.y1) - std::max(p.y0, q.y0);
    if (ox < 0 || oy < 0) return std::nullopt;
    if (ox > 0 && oy > 0) return Contact::overlap;
    if (ox == 0 && oy == 0) return Contact::corner;
    return Contact::edge;
}

namespace {

// members of level L meeting the closed box of q, for L >= q.level
void collect_finer(const Decomposition& w, const Square& q, int L, std::vector<Square>& out) {
    const auto& v = w.level(L);
    if (v.empty()) return;
    const int d = L - q.level;
    const int64_t i0 = (q.i << d) - 1, i1 = (q.i + 1) << d;
    const int64_t j0 = (q.j << d) - 1, j1 = (q.j + 1) << d;
    auto it = std::lower_bound(v.begin(), v.end(), Square{L, i0, j0});
    while (it != v.end() && it->i <= i1) {
        if (it->j < j0) {
            it = std::lower_bound(it, v.end(), Square{L, it->i, j0});
            continue;
        }
        if (it->j > j1) {
            it = std::lower_bound(it, v.end(), Square{L, it->i + 1, j0});
            continue;
        }
        out.push_back(*it);
        ++it;
    }
}

}  // namespace

std::vector<Neighbor> neighbors(const Decomposition& w, const Square& q) {
    if (!w.contains(q)) throw Error("SquareNotInDecomposition", "square " + to_string(q) + " is not in the decomposition");
    std::vector<Square> cand;
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
            const Square c{q.level, q.i + di, q.j + dj};
            for (int L = 1; L <= q.level; ++L) {
                const Square a = c.ancestor(L);
                if (w.members.count(a)) cand.push_back(a);
            }
        }
    for (int L = q.level + 1; L <= w.max_level; ++L) collect_finer(w, q, L, cand);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<Neighbor> out;
    for (const Square& s : cand) {
        if (s == q) continue;
        if (auto c = contact_of(q, s)) out.push_back({s, *c});
    }
    return out;
}

std::vector<Square> edge_neighbors(const Decomposition& w, const Square& q, int lo, int hi) {
    std::vector<Square> out;
    for (const Neighbor& nb : neighbors(w, q))
        if (nb.contact == Contact::edge && nb.q.level >= lo && nb.q.level <= hi) out.push_back(nb.q);
    return out;
}

Chain find_chain(const Decomposition& w, const Square& a, const Square& b, const SquareSet& allowed) {
    for (const Square* s : {&a, &b})
        if (!w.contains(*s) || !allowed.count(*s))
            throw Error("SquareNotInDecomposition", "chain end " + to_string(*s) + " is not an allowed member");
    if (a == b) return {{a}};
    std::unordered_map<Square, Square, SquareHash> parent;
    std::deque<Square> queue{a};
    parent.emplace(a, a);
    while (!queue.empty()) {
        const Square cur = queue.front();
        queue.pop_front();
        for (const Neighbor& nb : neighbors(w, cur)) {
            if (nb.contact != Contact::edge || !allowed.count(nb.q) || parent.count(nb.q)) continue;
            parent.emplace(nb.q, cur);
            if (nb.q == b) {
                Chain c;
                for (Square s = b; s != a; s = parent.at(s)) c.squares.push_back(s);
                c.squares.push_back(a);
                std::reverse(c.squares.begin(), c.squares.end());
                return c;
            }
            queue.push_back(nb.q);
        }
    }
    throw Error("NoChain", "no edge-connected chain from " + to_string(a) + " to " + to_string(b));
}

bool valid_chain(const Chain& c) {
    for (size_t k = 0; k + 1 < c.squares.size(); ++k) {
        auto t = contact_of(c.squares[k], c.squares[k + 1]);
        if (!t || *t != Contact::edge) return false;
    }
    return !c.squares.empty();
}

std::vector<Square> uncovered_cells(const Decomposition& w) {
    const Domain& d = *w.domain;
    std::vector<Square> cur;
    if (box_meets_closure(d, Square{0, 0, 0}.box())) cur.push_back({0, 0, 0});
    for (int n = 1; n <= w.max_level; ++n) {
        std::vector<Square> next;
        for (const Square& p : cur)
            for (int c = 0; c < 4; ++c) {
                const Square q{n, 2 * p.i + (c & 1), 2 * p.j + (c >> 1)};
                if (w.contains(q) || !box_meets_closure(d, q.box())) continue;
                next.push_back(q);
            }
        cur = std::move(next);
    }
    return cur;
}

Report check_whitney_properties(const Decomposition& w) {
    Report r;
    r.title = "whitney";
    const Domain& d = *w.domain;

    // W1: what is left uncovered at the deepest level hugs the boundary
    Check& w1 = r.add("W1", true, "every point of an uncovered deepest cell lies within 8*sqrt(2)*l of the boundary");
    size_t nu = 0;
    for (const Square& u : uncovered_cells(w)) {
        ++nu;
        const i256 l2 = i256(static_cast<i128>(u.side()) * u.side());
        if (dist2_box_boundary(d, u.box()).cmp(98 * l2) > 0) Report::fail(w1, "uncovered " + to_string(u));
    }
    w1.detail += "; cells checked: " + std::to_string(nu);

    // no uncovered cell meeting the closed domain qualifies as a member itself
    Check& w0 = r.add("complete", true, "every uncovered cell whose block lies in the domain is a member");
    std::vector<Square> cur;
    if (box_meets_closure(d, Square{0, 0, 0}.box())) cur.push_back({0, 0, 0});
    for (int n = 1; n <= w.max_level; ++n) {
        std::vector<Square> next;
        for (const Square& p : cur)
            for (int c = 0; c < 4; ++c) {
                const Square q{n, 2 * p.i + (c & 1), 2 * p.j + (c >> 1)};
                if (w.contains(q) || !box_meets_closure(d, q.box())) continue;
                if (box_in_domain(d, block_of(q))) Report::fail(w0, "missing " + to_string(q));
                next.push_back(q);
            }
        cur = std::move(next);
    }

    Check& w2 = r.add("W2", true, "l(Q) < dist(Q, complement) <= 3*sqrt(2)*l(Q)");
    Check& w3 = r.add("W3", true, "interiors pairwise disjoint");
    Check& w4 = r.add("W4", true, "touching squares differ by at most one level");
    for (const auto& [n, v] : w.levels)
        for (const Square& q : v) {
            const i256 l2 = i256(static_cast<i128>(q.side()) * q.side());
            if (!square_in_domain(d, q)) {
                Report::fail(w2, to_string(q) + " not inside the domain");
            } else {
                const Dist2 dd = dist2_box_boundary(d, q.box());
                if (dd.cmp(l2) <= 0 || dd.cmp(18 * l2) > 0) Report::fail(w2, to_string(q) + " dist^2=" + std::to_string(dd.value()));
            }
            for (int L = 1; L < n; ++L) {
                const Square a = q.ancestor(L);
                if (w.contains(a)) Report::fail(w3, to_string(q) + " inside " + to_string(a));
            }
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (!di && !dj) continue;
                    const Square c{n, q.i + di, q.j + dj};
                    for (int L = 1; L < n - 1; ++L) {
                        const Square a = c.ancestor(L);
                        if (w.contains(a)) Report::fail(w4, to_string(q) + " touches " + to_string(a));
                    }
                }
        }
    return r;
}

}  // namespace sob
