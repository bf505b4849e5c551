#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "oracle.hpp"
#include "sob/pou.hpp"

using namespace sob;

namespace {

std::string kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return "none";
}

struct Pipeline {
    std::shared_ptr<const Decomposition> w;
    CoreRegion c;
    std::unique_ptr<Raster> r;
    Collar col;

    Pipeline(const std::string& name, int L, int n, int s, int64_t C) {
        w = std::make_shared<const Decomposition>(whitney_decompose(oracle::corpus(name), L));
        c = core_region(w, n);
        r = std::make_unique<Raster>(w->domain, c, s);
        CollarConfig cfg;
        cfg.C = C;
        col = partition_collar(c, *w->domain, cfg, *r);
    }
};

class ConstantFamily final : public PouSource {
public:
    ConstantFamily(const Raster& r, double v) : r_(&r), v_(v) {}
    const Raster& raster() const override { return *r_; }
    int order() const override { return 2; }
    size_t members() const override { return 1; }
    void at(int64_t i, int64_t j, std::vector<PouMember>& out) const override {
        out.clear();
        if (r_->inside(i, j)) out.push_back({0, Jet(2, v_)});
    }

private:
    const Raster* r_;
    double v_;
};

}  // namespace

TEST(Mollifier, SeventeenBySeventeenStencil) {
    const MollifierKernel k = mollifier(std::ldexp(1.0, -8), std::ldexp(1.0, -11), 2);
    EXPECT_EQ(k.m, 8);
    EXPECT_EQ(k.side(), 17);
    size_t expect = 0;
    for (int dj = -8; dj <= 8; ++dj)
        for (int di = -8; di <= 8; ++di) expect += di * di + dj * dj < 64;
    EXPECT_EQ(k.support_cells(), expect);
    EXPECT_EQ(k.weight(0, 0, 8, 0), 0.0);
    EXPECT_GT(k.weight(0, 0, 7, 0), 0.0);
    EXPECT_EQ(k.weight(0, 0, 3, -2), k.weight(0, 0, -2, 3));
}

TEST(Mollifier, ValueWeightsSumToOneDerivativesToZero) {
    const MollifierKernel k = mollifier(std::ldexp(1.0, -8), std::ldexp(1.0, -11), 4);
    for (int m = 0; m <= 4; ++m)
        for (int b = 0; b <= m; ++b) {
            double s = 0, mx = 0;
            for (int dj = -k.m; dj <= k.m; ++dj)
                for (int di = -k.m; di <= k.m; ++di) {
                    s += k.weight(m - b, b, di, dj);
                    mx = std::max(mx, std::abs(k.weight(m - b, b, di, dj)));
                }
            EXPECT_NEAR(s, m == 0 ? 1.0 : 0.0, 1e-14 * (1 + mx)) << m - b << "," << b;
            if (m > 0) EXPECT_GT(mx, 0.0);
        }
}

TEST(Mollifier, ReproducesLinearAndQuadraticFunctions) {
    // f = x: (f*rho)_x = -sum o_x d_x rho(o) = 1, (f*rho)_y = 0
    // f = x^2: (f*rho)_xx = sum o_x^2 d_xx rho(o) = 2
    const double r = std::ldexp(1.0, -8);
    auto moments = [&](int ratio) {
        const double h = r / ratio;
        const MollifierKernel k = mollifier(r, h, 2);
        std::array<double, 4> out{};
        for (int dj = -k.m; dj <= k.m; ++dj)
            for (int di = -k.m; di <= k.m; ++di) {
                const double ox = di * h;
                out[0] += ox * k.weight(0, 0, di, dj);
                out[1] -= ox * k.weight(1, 0, di, dj);
                out[2] -= ox * k.weight(0, 1, di, dj);
                out[3] += ox * ox * k.weight(2, 0, di, dj);
            }
        return out;
    };
    const auto fine = moments(32), coarse = moments(8);
    EXPECT_NEAR(fine[0], 0.0, 1e-18);
    EXPECT_NEAR(fine[1], 1.0, 1e-5);
    EXPECT_NEAR(fine[2], 0.0, 1e-12);
    EXPECT_NEAR(fine[3], 2.0, 1e-3);
    EXPECT_LT(std::abs(fine[1] - 1), std::abs(coarse[1] - 1));
    EXPECT_LT(std::abs(fine[3] - 2), std::abs(coarse[3] - 2));
}

TEST(Mollifier, RejectsCoarseSpacing) {
    EXPECT_EQ(kind_of([] { mollifier(1.0 / 256, 1.0 / 512, 2); }), "SpacingTooCoarse");
    EXPECT_EQ(kind_of([] { mollifier(1.0 / 256, 1.0 / 1024, 2); }), "none");
    EXPECT_EQ(kind_of([] { mollifier(-1, 0.1, 2); }), "InvalidArgument");
    EXPECT_EQ(kind_of([] { mollifier(1, 0.1, 5); }), "InvalidArgument");
}

TEST(Mollifier, DumpLayout) {
    const MollifierKernel k = mollifier(1.0 / 16, 1.0 / 64, 1);
    const std::string d = kernel_dump(k);
    std::istringstream in(d);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# kernel r=0.0625 h=0.015625 half_width=4 order=1", 0), 0u);
    size_t lines = 1;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 1u + 3u * (1u + 9u));
}

TEST(Pou, UnitSquareSatisfiesProperties) {
    Pipeline s("unit_square", 5, 4, 7, 2048);
    ASSERT_EQ(s.col.regions.size(), 1u);
    PartitionOfUnity p(s.c, s.col, *s.r, 2);
    EXPECT_EQ(p.members(), 2u);
    EXPECT_EQ(p.kernel().m, 4);
    EXPECT_GT(p.mixed_cells(), 0u);
    const Report rep = check_pou(p, s.c, s.col);
    EXPECT_TRUE(rep.ok()) << rep.to_text();

    std::vector<PouMember> mem;
    // deep in the core
    p.at(1024, 1024, mem);
    ASSERT_EQ(mem.size(), 1u);
    EXPECT_EQ(mem[0].index, 0);
    EXPECT_EQ(mem[0].psi.value(), 1.0);
    // next to the boundary
    p.at(3, 1024, mem);
    ASSERT_EQ(mem.size(), 1u);
    EXPECT_EQ(mem[0].index, 1);
    EXPECT_FALSE(p.uniform(3, 1024));
    EXPECT_TRUE(p.uniform(20, 1024));
    // across the core edge at x = 1/8 = cell 256
    p.at(256, 1024, mem);
    ASSERT_EQ(mem.size(), 2u);
    EXPECT_FALSE(p.uniform(256, 1024));
    EXPECT_NEAR(mem[0].psi.value() + mem[1].psi.value(), 1.0, 1e-15);
    EXPECT_GT(mem[0].psi.derivative(1, 0), 0.0);
    EXPECT_LT(mem[1].psi.derivative(1, 0), 0.0);
    EXPECT_NEAR(mem[0].psi.derivative(0, 1), 0.0, 1e-9);
    // outside the domain
    p.at(0, 1024, mem);
    EXPECT_TRUE(mem.empty());
}

TEST(Pou, DerivativesMatchFiniteDifferences) {
    // mollifier radius 2^-(n+3) gives 16 raster cells per radius
    Pipeline s("l_shape", 6, 5, 7, 8);
    PartitionOfUnity p(s.c, s.col, *s.r, 2, 3);
    const double h = s.r->h;
    std::vector<PouMember> a, b, c;
    auto value = [&](const std::vector<PouMember>& v, uint16_t idx, int da, int db) {
        for (const auto& q : v)
            if (q.index == idx) return q.psi.derivative(da, db);
        return 0.0;
    };
    size_t compared = 0;
    double worst1 = 0, worst2 = 0;
    for (const Tile& t : s.r->tiles())
        for (int64_t k = 0; k < s.r->tile_side() * s.r->tile_side(); k += 97) {
            const int64_t i = (t.ti << s.r->s) + (k & (s.r->tile_side() - 1)), j = (t.tj << s.r->s) + (k >> s.r->s);
            if (p.uniform(i, j) || !s.r->inside(i - 1, j) || !s.r->inside(i + 1, j)) continue;
            p.at(i, j, a);
            p.at(i - 1, j, b);
            p.at(i + 1, j, c);
            for (const auto& q : a) {
                const double fd = (value(c, q.index, 0, 0) - value(b, q.index, 0, 0)) / (2 * h);
                const double fd2 = (value(c, q.index, 0, 0) - 2 * q.psi.value() + value(b, q.index, 0, 0)) / (h * h);
                const double scale1 = std::ldexp(1.0, s.c.n + 3), scale2 = scale1 * scale1;
                worst1 = std::max(worst1, std::abs(fd - q.psi.derivative(1, 0)) / scale1);
                worst2 = std::max(worst2, std::abs(fd2 - q.psi.derivative(2, 0)) / scale2);
                ++compared;
            }
        }
    EXPECT_GT(compared, 100u);
    EXPECT_LT(worst1, 0.01);
    EXPECT_LT(worst2, 0.1);
}

TEST(Pou, CombRegionsSatisfyPropertiesAndScaleStably) {
    Pipeline s5("comb", 7, 5, 7, 4), s6("comb", 7, 6, 7, 8);
    ASSERT_GT(s5.col.regions.size(), 1u);
    PartitionOfUnity p5(s5.c, s5.col, *s5.r, 2), p6(s6.c, s6.col, *s6.r, 2);
    PouScaling a, b;
    const Report r5 = check_pou(p5, s5.c, s5.col, &a), r6 = check_pou(p6, s6.c, s6.col, &b);
    EXPECT_TRUE(r5.ok()) << r5.to_text();
    EXPECT_TRUE(r6.ok()) << r6.to_text();
    EXPECT_EQ(a.n, 5);
    EXPECT_EQ(b.n, 6);
    const Report g = compare_pou_scaling(a, b, 2);
    EXPECT_TRUE(g.ok()) << g.to_text();
}

TEST(Pou, ScalingComparisonFlagsGrowth) {
    PouScaling a, b;
    a.n = 4;
    b.n = 5;
    for (auto& v : a.constant) v = 1;
    for (auto& v : b.constant) v = 1.5;
    EXPECT_TRUE(compare_pou_scaling(a, b, 2).ok());
    b.constant[jet_index(1, 1)] = 3;
    const Report r = compare_pou_scaling(a, b, 2);
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(r.checks[0].witnesses.size(), 1u);
}

TEST(Pou, CheckerRejectsOutOfRangeFamily) {
    Pipeline s("unit_square", 5, 4, 7, 2048);
    const Report rep = check_pou(ConstantFamily(*s.r, 1.2), s.c, s.col);
    EXPECT_FALSE(rep.find("range")->pass);
    EXPECT_FALSE(rep.find("sum")->pass);
    EXPECT_FALSE(rep.find("support_core")->pass);
    EXPECT_TRUE(rep.find("support_regions")->pass);
}

TEST(Pou, DenominatorVanishesWithoutLabels) {
    Pipeline s("unit_square", 5, 4, 7, 2048);
    s.r->clear_labels();
    PartitionOfUnity p(s.c, s.col, *s.r, 1);
    std::vector<PouMember> mem;
    EXPECT_EQ(kind_of([&] { p.at(3, 1024, mem); }), "DenominatorVanishes");
    EXPECT_EQ(kind_of([&] { p.at(1024, 1024, mem); }), "none");
}

TEST(Pou, RejectsCoarseRaster) {
    Pipeline s("unit_square", 5, 4, 5, 2048);
    EXPECT_EQ(kind_of([&] { PartitionOfUnity(s.c, s.col, *s.r, 1); }), "SpacingTooCoarse");
}

TEST(Pou, RasterDump) {
    Pipeline s("unit_square", 5, 4, 7, 2048);
    PartitionOfUnity p(s.c, s.col, *s.r, 1);
    const std::string d = raster_dump(p, 0, 0, 0, 0, 1024, 4, 2);
    std::istringstream in(d);
    std::string head, row1, row2;
    std::getline(in, head);
    std::getline(in, row1);
    std::getline(in, row2);
    EXPECT_EQ(head.rfind("# raster member=0 alpha=0,0 origin=0,0.5 h=0.00048828125 dims=4x2", 0), 0u);
    EXPECT_EQ(row1, "nan 0 0 0");
    EXPECT_EQ(row2, "nan 0 0 0");
}
