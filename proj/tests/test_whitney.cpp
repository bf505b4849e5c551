#include <gtest/gtest.h>

#include <chrono>
#include <deque>
#include <map>

#include "oracle.hpp"
#include "sob/whitney.hpp"

using namespace sob;

namespace {

std::shared_ptr<const Decomposition> decompose(const std::string& name, int L) {
    return std::make_shared<const Decomposition>(whitney_decompose(oracle::corpus(name), L));
}

std::set<Square> as_set(const std::vector<Square>& v) { return {v.begin(), v.end()}; }

// edge contact from real coordinates, independent of the library
bool share_edge(const Square& a, const Square& b) {
    const double ax0 = a.i * a.length(), ax1 = ax0 + a.length(), ay0 = a.j * a.length(), ay1 = ay0 + a.length();
    const double bx0 = b.i * b.length(), bx1 = bx0 + b.length(), by0 = b.j * b.length(), by1 = by0 + b.length();
    const double ox = std::min(ax1, bx1) - std::max(ax0, bx0), oy = std::min(ay1, by1) - std::max(ay0, by0);
    return (ox == 0 && oy > 0) || (oy == 0 && ox > 0);
}

size_t bfs_length(const std::vector<Square>& all, const Square& a, const Square& b) {
    std::map<Square, size_t> dist{{a, 1}};
    std::deque<Square> q{a};
    while (!q.empty()) {
        const Square c = q.front();
        q.pop_front();
        if (c == b) return dist[c];
        for (const Square& s : all)
            if (!dist.count(s) && share_edge(c, s)) {
                dist[s] = dist[c] + 1;
                q.push_back(s);
            }
    }
    return 0;
}

}  // namespace

// Closed neighbours must lie in the open domain, so the unions land one level
// deeper than a reading that lets them touch the boundary.
TEST(Whitney, UnitSquareLevels) {
    const auto w = decompose("unit_square", 4);
    EXPECT_TRUE(w->level(1).empty());
    EXPECT_TRUE(w->level(2).empty());
    ASSERT_EQ(w->level(3).size(), 16u);
    for (const Square& q : w->level(3)) EXPECT_TRUE(q.i >= 2 && q.i <= 5 && q.j >= 2 && q.j <= 5);
    ASSERT_EQ(w->level(4).size(), 80u);
    for (const Square& q : w->level(4)) {
        EXPECT_TRUE(q.i >= 2 && q.i <= 13 && q.j >= 2 && q.j <= 13);
        EXPECT_FALSE(q.i >= 4 && q.i <= 11 && q.j >= 4 && q.j <= 11);
    }
}

TEST(Whitney, RectangleLevels) {
    const auto w = decompose("rectangle", 4);
    for (int n = 1; n <= 3; ++n) EXPECT_TRUE(w->level(n).empty());
    ASSERT_EQ(w->level(4).size(), 48u);
    for (const Square& q : w->level(4)) {
        EXPECT_TRUE(q.i >= 2 && q.i <= 13);
        EXPECT_TRUE(q.j >= 2 && q.j <= 5);
    }
    EXPECT_THROW(whitney_decompose(oracle::corpus("rectangle"), 3), Error);
}

TEST(Whitney, TooThin) {
    try {
        whitney_decompose(oracle::corpus("unit_square"), 1);
        FAIL() << "expected DomainTooThin";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "DomainTooThin");
    }
}

TEST(Whitney, MatchesBruteForceOnCorpus) {
    for (const auto& name : oracle::corpus_names()) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto w = decompose(name, 6);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        EXPECT_LT(secs, 10.0) << name;
        const auto ref = oracle::brute_whitney(*w->domain, 6, 8);
        for (int n = 1; n <= 6; ++n) EXPECT_EQ(as_set(w->level(n)), ref[static_cast<size_t>(n)]) << name << " level " << n;
    }
    const auto w = decompose("rectangle", 5);
    const auto ref = oracle::brute_whitney(*w->domain, 5, 8);
    for (int n = 1; n <= 5; ++n) EXPECT_EQ(as_set(w->level(n)), ref[static_cast<size_t>(n)]);
}

TEST(Whitney, Deterministic) {
    const auto a = decompose("spiral", 7), b = decompose("spiral", 7);
    EXPECT_EQ(a->levels, b->levels);
}

TEST(Whitney, PropertiesHoldOnCorpus) {
    for (const auto& name : oracle::corpus_names())
        for (int L : {5, 6, 8}) {
            const auto w = decompose(name, L);
            const Report r = check_whitney_properties(*w);
            EXPECT_TRUE(r.ok()) << name << " " << L << "\n" << r.to_text();
        }
}

TEST(Whitney, W4ByDirectPairScan) {
    const auto w = decompose("l_shape", 6);
    const auto all = w->all();
    for (size_t a = 0; a < all.size(); ++a)
        for (size_t b = a + 1; b < all.size(); ++b)
            if (contact_of(all[a], all[b])) EXPECT_LE(std::abs(all[a].level - all[b].level), 1);
}

TEST(Whitney, HandBuiltOverlapFailsW3) {
    const auto d = oracle::corpus("unit_square");
    const Decomposition w = Decomposition::from_squares(d, {{2, 1, 1}, {3, 2, 2}}, 3);
    const Report r = check_whitney_properties(w);
    const Check* c = r.find("W3");
    ASSERT_TRUE(c);
    EXPECT_FALSE(c->pass);
    ASSERT_FALSE(c->witnesses.empty());
    EXPECT_NE(c->witnesses[0].find("(3,2,2)"), std::string::npos);
    EXPECT_NE(c->witnesses[0].find("(2,1,1)"), std::string::npos);
}

TEST(Whitney, HandBuiltTooCloseFailsW2) {
    // domain [1/16,1]^2, square [1/8,1/4]^2 sits l/2 from the boundary
    const auto d = std::make_shared<const Domain>(load_domain(R"({"vertices":[[1,1,4],[16,1,4],[16,16,4],[1,16,4]]})"));
    const Decomposition w = Decomposition::from_squares(d, {{3, 1, 1}}, 3);
    const Report r = check_whitney_properties(w);
    EXPECT_FALSE(r.find("W2")->pass);
    EXPECT_TRUE(r.find("W3")->pass);
}

TEST(Neighbors, UnitSquareExample) {
    const auto w = decompose("unit_square", 4);
    const auto nb = neighbors(*w, {3, 2, 2});
    ASSERT_EQ(nb.size(), 10u);
    size_t same = 0, fine = 0;
    for (const auto& x : nb) (x.q.level == 3 ? same : fine)++;
    EXPECT_EQ(same, 3u);
    EXPECT_EQ(fine, 7u);
    // the diagonal same-level square touches at a corner
    for (const auto& x : nb)
        if (x.q == Square{3, 3, 3}) EXPECT_EQ(x.contact, Contact::corner);
}

TEST(Neighbors, SingleSquareAndMissing) {
    const auto d = oracle::corpus("unit_square");
    const Decomposition w = Decomposition::from_squares(d, {{2, 1, 1}}, 2);
    EXPECT_TRUE(neighbors(w, {2, 1, 1}).empty());
    try {
        neighbors(w, {2, 0, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "SquareNotInDecomposition");
    }
}

TEST(Neighbors, MatchBruteForce) {
    const auto w = decompose("comb", 7);
    const auto all = w->all();
    for (size_t a = 0; a < all.size(); a += 13) {
        std::set<Square> ref;
        for (const Square& s : all)
            if (!(s == all[a]) && contact_of(all[a], s)) ref.insert(s);
        std::set<Square> got;
        for (const auto& x : neighbors(*w, all[a])) got.insert(x.q);
        EXPECT_EQ(got, ref) << to_string(all[a]);
    }
}

TEST(Chain, Examples) {
    const auto w = decompose("unit_square", 4);
    const SquareSet all(w->members.begin(), w->members.end());
    EXPECT_EQ(find_chain(*w, {4, 2, 2}, {4, 2, 2}, all).size(), 1u);
    const Chain two = find_chain(*w, {4, 2, 2}, {4, 3, 2}, all);
    EXPECT_EQ(two.squares, (std::vector<Square>{{4, 2, 2}, {4, 3, 2}}));
    // opposite corners of the ring, through the core block
    const Chain c = find_chain(*w, {4, 2, 2}, {4, 13, 13}, all);
    EXPECT_EQ(c.size(), bfs_length(w->all(), {4, 2, 2}, {4, 13, 13}));
    EXPECT_EQ(c.squares.front(), (Square{4, 2, 2}));
    EXPECT_EQ(c.squares.back(), (Square{4, 13, 13}));
    EXPECT_TRUE(valid_chain(c));
}

TEST(Chain, StaysInAllowedAndIsShortest) {
    const auto w = decompose("spiral", 6);
    const auto all = w->all();
    SquareSet allowed(all.begin(), all.end());
    const Square a = all.front(), b = all.back();
    const Chain c = find_chain(*w, a, b, allowed);
    EXPECT_TRUE(valid_chain(c));
    for (const Square& s : c.squares) EXPECT_TRUE(allowed.count(s));
    EXPECT_EQ(c.size(), bfs_length(all, a, b));
}

TEST(Chain, NoChainAcrossGap) {
    const auto w = decompose("unit_square", 4);
    const SquareSet allowed{{4, 2, 2}, {4, 13, 13}};
    try {
        find_chain(*w, {4, 2, 2}, {4, 13, 13}, allowed);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "NoChain");
    }
}

TEST(WhitneyChecker, FlagsAMissingMember) {
    const auto d = oracle::corpus("l_shape");
    const Decomposition full = whitney_decompose(d, 5);
    EXPECT_TRUE(check_whitney_properties(full).ok());
    std::vector<Square> sq = full.all();
    const Square gone = sq.back();
    sq.pop_back();
    const Report r = check_whitney_properties(Decomposition::from_squares(d, sq, 5));
    ASSERT_NE(r.find("complete"), nullptr);
    EXPECT_FALSE(r.find("complete")->pass);
    EXPECT_EQ(r.find("complete")->witnesses.front(), "missing " + to_string(gone));
}
