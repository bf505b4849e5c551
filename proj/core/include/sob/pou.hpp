#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sob/core.hpp"
#include "sob/jet.hpp"
#include "sob/raster.hpp"
#include "sob/report.hpp"

namespace sob {

// Sampled bump c*exp(1/(|x|^2/r^2 - 1)) on the raster grid. Offsets (di,dj) with |(di,dj)h| < r.
struct MollifierKernel {
    double r = 0, h = 0;
    int m = 0;  // stencil half-width in cells
    int order = 0;
    // per multi-index (jet_index), row-major over dj then di: derivative weights, the value weights sum to 1
    std::vector<std::vector<double>> weights;

    int side() const { return 2 * m + 1; }
    double weight(int a, int b, int di, int dj) const {
        return weights[static_cast<size_t>(jet_index(a, b))][static_cast<size_t>((dj + m) * side() + (di + m))];
    }
    size_t support_cells() const;
};

MollifierKernel mollifier(double r, double h, int order);
std::string kernel_dump(const MollifierKernel& k);

struct PouMember {
    uint16_t index = 0;  // 0 for the core, i >= 1 for collar region i
    Jet psi;
};

// Anything that yields partition members per raster cell; checkers work against this.
class PouSource {
public:
    virtual ~PouSource() = default;
    virtual const Raster& raster() const = 0;
    virtual int order() const = 0;
    virtual size_t members() const = 0;
    // members with a nonzero jet at raster cell (i,j), sorted by index
    virtual void at(int64_t i, int64_t j, std::vector<PouMember>& out) const = 0;
};

// Normalized family psi_i = tpsi_i / sum_j tpsi_j with tpsi_0 = chi_core * rho and
// tpsi_i = (chi_inner_i * rho) restricted to the outer region i. Evaluated per cell on demand.
class PartitionOfUnity final : public PouSource {
public:
    PartitionOfUnity(const CoreRegion& c, const Collar& col, const Raster& r, int order, int radius_shift = 5);

    const Raster& raster() const override { return *raster_; }
    int order() const override { return order_; }
    size_t members() const override { return regions_ + 1; }
    void at(int64_t i, int64_t j, std::vector<PouMember>& out) const override;

    const MollifierKernel& kernel() const { return kernel_; }
    // true when the stencil window sees a single class, so one member equals 1 with zero derivatives
    bool uniform(int64_t i, int64_t j) const;
    size_t mixed_cells() const { return mixed_count_; }
    // same test by stored tile index and local cell
    bool mixed_at(size_t tile, uint32_t local) const { return mixed_[tile][local] != 0; }

private:
    const Raster* raster_;
    int order_;
    size_t regions_;
    MollifierKernel kernel_;
    std::vector<std::vector<uint8_t>> mixed_;  // per stored tile
    size_t mixed_count_ = 0;
    std::unordered_map<uint64_t, uint16_t> cut_class_;  // cut cells folded into an adjacent region

    uint16_t cls(int64_t i, int64_t j) const;
};

struct PouScaling {
    int n = 0;
    // max over cells and members of |d^alpha psi| * 2^(-n|alpha|), per jet index
    std::array<double, kJetSize> constant{};
};

// properties (1)-(5) on every stored inside raster cell
// core_reach: psi_0 must vanish farther than core_reach * 2^-n from the core
Report check_pou(const PouSource& p, const CoreRegion& c, const Collar& col, PouScaling* scaling = nullptr,
                 double core_reach = 0.1);
// consecutive-level comparison of the derivative constants for 1 <= |alpha| <= order
Report compare_pou_scaling(const PouScaling& a, const PouScaling& b, int order, double factor = 2.0);

// text grid: header line then one row per raster row of the window, values of member `index`
std::string raster_dump(const PouSource& p, uint16_t index, int a, int b, int64_t i0, int64_t j0, int64_t w, int64_t hgt);

}  // namespace sob
