#pragma once
// Independent reference computations. Nothing here calls the library's
// predicates: corpus domains are rectilinear on a 2^-K grid, so a closed
// level-n square (n <= K) lies in the open polygon iff every level-K cell of
// the square and of its one-cell ring has its centre inside (plain ray casting).

#include <cmath>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sob/geometry.hpp"

namespace oracle {

inline std::shared_ptr<const sob::Domain> corpus(const std::string& name) {
    return std::make_shared<const sob::Domain>(sob::load_domain_file(std::string(SOB_DATA_DIR) + "/" + name + ".json"));
}

inline const std::vector<std::string>& corpus_names() {
    static const std::vector<std::string> v{"unit_square", "l_shape", "comb", "spiral", "random_polyomino"};
    return v;
}

struct Poly {
    std::vector<double> x, y;
    explicit Poly(const sob::Domain& d) {
        for (const auto& p : d.v) {
            x.push_back(sob::to_double(p.x));
            y.push_back(sob::to_double(p.y));
        }
    }
    // even-odd ray cast; callers never query points on edges
    bool inside(double px, double py) const {
        bool in = false;
        const size_t n = x.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++)
            if ((y[i] > py) != (y[j] > py) && px < (x[j] - x[i]) * (py - y[i]) / (y[j] - y[i]) + x[i]) in = !in;
        return in;
    }
};

// fine-grid inside table at level K
struct Grid {
    int K;
    long S;
    std::vector<char> in;
    Grid(const sob::Domain& d, int K_) : K(K_), S(1L << K_), in(static_cast<size_t>(S * S)) {
        Poly p(d);
        for (long j = 0; j < S; ++j)
            for (long i = 0; i < S; ++i) in[static_cast<size_t>(j * S + i)] = p.inside((i + 0.5) / S, (j + 0.5) / S);
    }
    bool cell(long i, long j) const { return i >= 0 && j >= 0 && i < S && j < S && in[static_cast<size_t>(j * S + i)]; }
    // closed box [i0,i1]x[j0,j1] (level-K cell units) inside the open domain
    bool box_inside(long i0, long j0, long i1, long j1) const {
        for (long j = j0 - 1; j <= j1; ++j)
            for (long i = i0 - 1; i <= i1; ++i)
                if (!cell(i, j)) return false;
        return true;
    }
    bool square_inside(int level, long i, long j) const {
        const long s = 1L << (K - level);
        return box_inside(i * s, j * s, (i + 1) * s, (j + 1) * s);
    }
};

// Definition read verbatim: Q of level n joins iff not inside an earlier square and its 3x3 block lies in the domain
inline std::vector<std::set<sob::Square>> brute_whitney(const sob::Domain& d, int max_level, int K) {
    Grid g(d, K);
    std::vector<std::set<sob::Square>> out(static_cast<size_t>(max_level) + 1);
    for (int n = 1; n <= max_level; ++n) {
        const long N = 1L << n;
        for (long i = 0; i < N; ++i)
            for (long j = 0; j < N; ++j) {
                bool covered = false;
                for (int L = 1; L < n && !covered; ++L) covered = out[L].count({L, i >> (n - L), j >> (n - L)}) > 0;
                if (covered) continue;
                bool ok = true;
                for (int di = -1; di <= 1 && ok; ++di)
                    for (int dj = -1; dj <= 1 && ok; ++dj) ok = g.square_inside(n, i + di, j + dj);
                if (ok) out[n].insert({n, i, j});
            }
    }
    return out;
}

}  // namespace oracle
