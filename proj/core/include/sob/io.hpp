#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sob/approx.hpp"
#include "sob/core.hpp"
#include "sob/whitney.hpp"

namespace sob {

std::string read_file(const std::string& path, const std::string& what = "file");
void write_file(const std::string& path, const std::string& text);

// {"domain": ..., "max_level": L, "levels": [{"level": n, "squares": [[n,i,j], ...]}, ...]}
std::string decomposition_to_json(const Decomposition& w);
Decomposition load_decomposition(const std::string& text);
std::string decomposition_svg(const Decomposition& w, int px = 800);

// outer-region membership of raster cells as row runs (j, i0, length), sorted by (j, i0)
struct RegionMask {
    uint16_t region = 0;
    std::vector<std::array<int64_t, 3>> runs;
    size_t cells() const;
    std::vector<uint64_t> keys() const;  // (i << 32) | j, as consumed by mask_adjacency
};
std::vector<RegionMask> region_masks(const Raster& r, size_t regions);

struct CoreCollarDoc {
    std::string domain;
    int n = 0, s = 0;
    Square root;
    std::vector<Square> core;
    std::vector<Square> boundary_layer;
    std::vector<GridPt> cycle;
    std::vector<Polyline> cuts;
    std::vector<RegionMask> masks;
};
std::string core_collar_to_json(const CoreRegion& c, const Collar& col, const Raster& r);
CoreCollarDoc load_core_collar(const std::string& text);
std::string core_collar_svg(const CoreRegion& c, const Collar& col, const Raster& r, int px = 800);

// text grid of d^a_x d^b_y u_eps sampled every `stride` raster cells, rows from the top; "nan" outside
std::string approximant_dump(const Approximant& a, int da, int db, int64_t stride);

}  // namespace sob
