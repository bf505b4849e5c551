#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "sob/geometry.hpp"
#include "sob/raster.hpp"
#include "sob/report.hpp"
#include "sob/whitney.hpp"

namespace sob {

using GridPt = std::pair<int64_t, int64_t>;

struct CoreRegion {
    std::shared_ptr<const Decomposition> w;
    int n = 0;
    Square root;
    std::vector<Square> squares;         // the core family, sorted
    std::vector<Square> top_layer;       // core squares of level n
    std::vector<Square> boundary_layer;  // core squares touching the closure of the rest of the domain
    BoundaryCycle cycle;

    // dense level-n cell flags over [0,1]^2
    int64_t cells_per_side = 0;
    std::vector<uint8_t> flags;  // bit 0: covered by levels <= n, bit 1: in the core
    bool covered(int64_t i, int64_t j) const { return at(i, j) & 1; }
    bool in_core(int64_t i, int64_t j) const { return at(i, j) & 2; }
    size_t core_cells = 0;

    // boundary tracing diagnostics
    size_t boundary_edges = 0;
    size_t cycle_count = 0;
    std::vector<GridPt> pinches;

    SquareSet square_set;
    bool contains(const Square& q) const { return square_set.count(q) != 0; }

private:
    uint8_t at(int64_t i, int64_t j) const {
        if (i < 0 || j < 0 || i >= cells_per_side || j >= cells_per_side) return 0;
        return flags[static_cast<size_t>(j * cells_per_side + i)];
    }
};

Square default_root(const Decomposition& w);
CoreRegion core_region(std::shared_ptr<const Decomposition> w, int n, std::optional<Square> root = std::nullopt);
// explicit core family, bypassing the flood fill (for checker tests)
CoreRegion core_from_squares(std::shared_ptr<const Decomposition> w, int n, Square root, const std::vector<Square>& family);

// Core region checks (i)-(vi); (i) needs w->max_level >= n+1.
Report verify_core(const CoreRegion& c, const Decomposition& w);

struct CollarConfig {
    double M = 8.0;
    int64_t C = 2048;
    size_t collar_cap = 0;  // 0: 2C+16
    size_t chain_cap = 16;
    size_t halo_multiplicity_cap = 16;
    int delta_shift = 3;  // delta = 2^-(n+delta_shift)
    size_t cap() const { return collar_cap ? collar_cap : static_cast<size_t>(2 * C + 16); }
};

struct CutCurve {
    Polyline line;
    Square exit;                 // grid cell leaving the core at x
    std::optional<Square> via;   // second cell when the exit cell misses the boundary
};

CutCurve connecting_curve_detail(const CoreRegion& c, const Domain& d, GridPt x);
Polyline connecting_curve(const CoreRegion& c, const Domain& d, GridPt x);
Report verify_connecting_curves(const CoreRegion& c, const Domain& d);

struct BoundaryRegion {
    size_t index = 1;                  // 1-based
    size_t arc_begin = 0, arc_end = 0; // cycle edges [begin, end), end may exceed L when wrapping
    GridPt start;                      // the cut vertex opening the arc
    Polyline cut_start, cut_end;       // empty for a single region
    std::vector<Square> collar_squares;  // boundary-layer squares attached to this arc
    Square associated;
    std::vector<Square> neighborhood;    // union of the collections of j-1, j, j+1
    size_t inner_cells = 0, outer_cells = 0;
};

struct Collar {
    std::vector<BoundaryRegion> regions;
    std::vector<Polyline> cuts;
    size_t cut_cells = 0;
    size_t pocket_cells = 0;
    size_t max_collection = 0;
};

Collar partition_collar(const CoreRegion& c, const Domain& d, const CollarConfig& cfg, Raster& raster);

// adjacency[i][j] = 1 if outer regions i and j share a cell
using Adjacency = std::vector<std::vector<uint8_t>>;
Adjacency raster_adjacency(const Raster& r, size_t regions);
Adjacency mask_adjacency(const std::vector<std::vector<uint64_t>>& masks);
Report verify_overlap(const Adjacency& adj, const std::vector<BoundaryRegion>& regions);
Report verify_collar(const CoreRegion& c, const Collar& col, const Raster& r, const CollarConfig& cfg);

struct SeparationOptions {
    size_t pairs = 128;
    uint64_t seed = 1;
    int oversample = 3;
};
struct SeparationResult {
    Report report;
    size_t tested = 0, violations = 0;
    double min_escape = 0;  // in units of 2^-n
};
SeparationResult verify_separation(const CoreRegion& c, const Domain& d, const CollarConfig& cfg,
                                   const SeparationOptions& opt = {});

struct HaloSet {
    std::vector<Square> squares;
    std::map<Square, Square> assignment;
    std::map<Square, Chain> chains;
    size_t max_chain = 0;
    size_t max_multiplicity = 0;
};
HaloSet halo(const CoreRegion& c, const Decomposition& w, double pou_support_radius);
Report verify_halo(const HaloSet& h, const CollarConfig& cfg);

}  // namespace sob
