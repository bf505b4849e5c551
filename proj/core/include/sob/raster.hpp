#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "sob/geometry.hpp"

namespace sob {

struct CoreRegion;

constexpr uint16_t kCutLabel = 0xFFFF;

// One level-n grid cell worth of raster cells (2^s x 2^s).
struct Tile {
    int64_t ti = 0, tj = 0;
    bool core = false;        // the tile is a cell of the core
    bool all_inside = false;  // every raster cell lies inside the domain
    std::vector<uint8_t> inside;
    std::vector<uint16_t> label;  // inner collar region (1-based), 0 none, kCutLabel on cut curves
    std::vector<std::pair<uint32_t, uint16_t>> extra;  // outer-region memberships beyond label, sorted

    bool cell_inside(uint32_t k) const { return all_inside || (!inside.empty() && inside[k]); }
};

// Sparse raster at spacing h = 2^-(n+s). Only tiles near the collar are stored:
// every non-core tile meeting the closed domain and every core tile touching one.
// Core tiles further in are implicitly inside, core, unlabelled.
class Raster {
public:
    Raster(std::shared_ptr<const Domain> d, const CoreRegion& c, int s);

    int n = 0, s = 0, g = 0;
    double h = 0;
    std::shared_ptr<const Domain> domain;

    int64_t dims() const { return int64_t(1) << g; }
    int64_t tile_side() const { return int64_t(1) << s; }
    double center(int64_t i) const { return (static_cast<double>(i) + 0.5) * h; }

    bool core_tile(int64_t ti, int64_t tj) const;
    const Tile* tile(int64_t ti, int64_t tj) const;
    Tile* tile(int64_t ti, int64_t tj);
    const std::vector<Tile>& tiles() const { return tiles_; }
    std::vector<Tile>& tiles() { return tiles_; }

    bool inside(int64_t i, int64_t j) const;
    bool in_core(int64_t i, int64_t j) const { return core_tile(i >> s, j >> s); }
    uint16_t label(int64_t i, int64_t j) const;
    // outer region memberships of a cell, label first
    void regions(int64_t i, int64_t j, std::vector<uint16_t>& out) const;
    bool in_region(int64_t i, int64_t j, uint16_t r) const;
    void clear_labels();

    uint32_t local(int64_t i, int64_t j) const {
        return static_cast<uint32_t>(((j & (tile_side() - 1)) << s) | (i & (tile_side() - 1)));
    }
    size_t stored_cells() const { return tiles_.size() * static_cast<size_t>(tile_side() * tile_side()); }

private:
    std::vector<uint8_t> core_;  // dense level-n flags
    std::unordered_map<uint64_t, size_t> index_;
    std::vector<Tile> tiles_;    // sorted by (tj, ti)
    static uint64_t key(int64_t ti, int64_t tj) {
        return (static_cast<uint64_t>(ti) << 32) ^ static_cast<uint64_t>(static_cast<uint32_t>(tj));
    }
};

}  // namespace sob
