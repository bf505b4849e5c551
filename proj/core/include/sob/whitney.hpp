#pragma once

#include <map>
#include <memory>
#include <optional>
#include <unordered_set>
#include <vector>

#include "sob/geometry.hpp"
#include "sob/report.hpp"

namespace sob {

using SquareSet = std::unordered_set<Square, SquareHash>;

struct Decomposition {
    std::shared_ptr<const Domain> domain;
    int max_level = 0;
    std::map<int, std::vector<Square>> levels;  // level -> sorted squares
    SquareSet members;

    bool contains(const Square& q) const { return members.count(q) != 0; }
    // member equal to the cell or one of its ancestors
    std::optional<Square> covering(const Square& cell) const;
    size_t size() const { return members.size(); }
    const std::vector<Square>& level(int n) const;
    std::vector<Square> all() const;  // sorted by (level, i, j)

    // hand-built decompositions for checker tests and imports
    static Decomposition from_squares(std::shared_ptr<const Domain> d, const std::vector<Square>& sq, int max_level);
};

Decomposition whitney_decompose(std::shared_ptr<const Domain> d, int max_level);

enum class Contact { edge, corner, overlap };
const char* to_string(Contact c);
std::optional<Contact> contact_of(const Square& a, const Square& b);

struct Neighbor {
    Square q;
    Contact contact;
    bool operator==(const Neighbor& o) const { return q == o.q && contact == o.contact; }
};

// all members meeting q other than q, sorted by (level, i, j)
std::vector<Neighbor> neighbors(const Decomposition& w, const Square& q);
// members of levels in [lo, hi] sharing a non-degenerate segment with q
std::vector<Square> edge_neighbors(const Decomposition& w, const Square& q, int lo, int hi);

struct Chain {
    std::vector<Square> squares;
    size_t size() const { return squares.size(); }
};

Chain find_chain(const Decomposition& w, const Square& a, const Square& b, const SquareSet& allowed);
bool valid_chain(const Chain& c);

// cells at the deepest level not covered by any member but meeting the closed domain
std::vector<Square> uncovered_cells(const Decomposition& w);

Report check_whitney_properties(const Decomposition& w);

}  // namespace sob
