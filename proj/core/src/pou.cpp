#include "sob/pou.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace sob {

namespace {

constexpr uint16_t kCoreClass = 0xFFFE;

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

uint64_t cell_key(int64_t i, int64_t j) { return (static_cast<uint64_t>(i) << 32) | static_cast<uint64_t>(j); }

std::string cell_str(int64_t i, int64_t j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

}  // namespace

size_t MollifierKernel::support_cells() const {
    size_t k = 0;
    for (double w : weights[0])
        if (w != 0) ++k;
    return k;
}

MollifierKernel mollifier(double r, double h, int order) {
    if (!(r > 0) || !(h > 0)) throw Error("InvalidArgument", "mollifier radius and spacing must be positive");
    if (h > r / 4) throw Error("SpacingTooCoarse", "spacing " + fmt_g(h) + " exceeds r/4 = " + fmt_g(r / 4));
    if (order < 0 || order > kMaxOrder) throw Error("InvalidArgument", "mollifier order must be in [0," + std::to_string(kMaxOrder) + "]");
    MollifierKernel k;
    k.r = r;
    k.h = h;
    k.order = order;
    k.m = static_cast<int>(std::floor(r / h));
    const int S = k.side();
    const int J = (order + 1) * (order + 2) / 2;
    k.weights.assign(static_cast<size_t>(J), std::vector<double>(static_cast<size_t>(S * S), 0.0));
    const Jet one(order, 1);
    std::vector<char> in(static_cast<size_t>(S * S), 0);
    for (int dj = -k.m; dj <= k.m; ++dj)
        for (int di = -k.m; di <= k.m; ++di) {
            const double ox = di * h, oy = dj * h;
            if (ox * ox + oy * oy >= r * r) continue;
            const size_t at = static_cast<size_t>((dj + k.m) * S + (di + k.m));
            in[at] = 1;
            const Jet x = Jet::variable(order, ox, false), y = Jet::variable(order, oy, true);
            const Jet q = (x * x + y * y) * (1 / (r * r));
            const Jet rho = exp(one / (q - one));
            for (int m = 0; m <= order; ++m)
                for (int b = 0; b <= m; ++b) k.weights[static_cast<size_t>(jet_index(m - b, b))][at] = rho.derivative(m - b, b);
        }
    double z = 0;
    for (double w : k.weights[0]) z += w;
    for (auto& row : k.weights)
        for (double& w : row) w /= z;
    // absorb the rounding residue in the centre weight
    double s = 0;
    for (double w : k.weights[0]) s += w;
    k.weights[0][static_cast<size_t>(k.m * S + k.m)] += 1 - s;
    size_t count = 0;
    for (char c : in) count += c;
    for (int idx = 1; idx < J; ++idx) {
        auto& row = k.weights[static_cast<size_t>(idx)];
        double mean = 0;
        for (size_t t = 0; t < row.size(); ++t)
            if (in[t]) mean += row[t];
        mean /= static_cast<double>(count);
        for (size_t t = 0; t < row.size(); ++t)
            if (in[t]) row[t] -= mean;
    }
    return k;
}

std::string kernel_dump(const MollifierKernel& k) {
    std::string out = "# kernel r=" + fmt_g(k.r) + " h=" + fmt_g(k.h) + " half_width=" + std::to_string(k.m) +
                      " order=" + std::to_string(k.order) + " support_cells=" + std::to_string(k.support_cells()) + "\n";
    for (int m = 0; m <= k.order; ++m)
        for (int b = 0; b <= m; ++b) {
            out += "alpha " + std::to_string(m - b) + " " + std::to_string(b) + "\n";
            for (int dj = k.m; dj >= -k.m; --dj) {
                for (int di = -k.m; di <= k.m; ++di) {
                    if (di > -k.m) out += ' ';
                    out += fmt_g(k.weight(m - b, b, di, dj));
                }
                out += '\n';
            }
        }
    return out;
}

PartitionOfUnity::PartitionOfUnity(const CoreRegion& c, const Collar& col, const Raster& r, int order, int radius_shift)
    : raster_(&r), order_(order), regions_(col.regions.size()) {
    if (r.n != c.n) throw Error("InvalidArgument", "raster was built for another level");
    if (order < 0 || order > kMaxOrder) throw Error("InvalidArgument", "order must be in [0," + std::to_string(kMaxOrder) + "]");
    kernel_ = mollifier(std::ldexp(1.0, -(c.n + radius_shift)), r.h, order);
    // a cut has no area: its cells join the nearest labelled region, ties by scan order
    for (const Tile& tile : r.tiles()) {
        if (tile.label.empty()) continue;
        for (uint32_t k = 0; k < tile.label.size(); ++k) {
            if (tile.label[k] != kCutLabel || !tile.cell_inside(k)) continue;
            const int64_t i = (tile.ti << r.s) + (k & (r.tile_side() - 1)), j = (tile.tj << r.s) + (k >> r.s);
            uint16_t found = 0;
            for (int64_t d = 1; d <= 4 && !found; ++d)
                for (int64_t dj = -d; dj <= d && !found; ++dj)
                    for (int64_t di = -d; di <= d && !found; ++di) {
                        if (std::max(std::abs(di), std::abs(dj)) != d) continue;
                        const int64_t a = i + di, b = j + dj;
                        if (a < 0 || b < 0 || a >= r.dims() || b >= r.dims() || r.in_core(a, b)) continue;
                        const uint16_t v = r.label(a, b);
                        if (v != 0 && v != kCutLabel && r.in_region(i, j, v)) found = v;
                    }
            if (found) cut_class_[cell_key(i, j)] = found;
        }
    }
    const int64_t T = r.tile_side(), m = kernel_.m, W = T + 2 * m;
    std::vector<uint16_t> A(static_cast<size_t>(W * W));
    std::vector<int32_t> run(static_cast<size_t>(W * W));
    mixed_.resize(r.tiles().size());
    for (size_t t = 0; t < r.tiles().size(); ++t) {
        const Tile& tile = r.tiles()[t];
        const int64_t ox = (tile.ti << r.s) - m, oy = (tile.tj << r.s) - m;
        for (int64_t y = 0; y < W; ++y)
            for (int64_t x = 0; x < W; ++x) A[static_cast<size_t>(y * W + x)] = cls(ox + x, oy + y);
        // horizontal runs of equal classes ending at x
        for (int64_t y = 0; y < W; ++y)
            for (int64_t x = 0; x < W; ++x) {
                const size_t k = static_cast<size_t>(y * W + x);
                run[k] = (x > 0 && A[k] == A[k - 1]) ? run[k - 1] + 1 : 1;
            }
        auto& mix = mixed_[t];
        mix.assign(static_cast<size_t>(T * T), 0);
        for (int64_t x = 0; x < T; ++x) {
            int32_t vrun = 0;
            uint16_t prev = 0;
            for (int64_t y = 0; y < W; ++y) {
                const size_t k = static_cast<size_t>(y * W + x + 2 * m);
                const bool h_ok = run[k] >= 2 * m + 1;
                vrun = h_ok ? ((vrun > 0 && A[k] == prev) ? vrun + 1 : 1) : 0;
                prev = A[k];
                if (y >= 2 * m) {
                    const bool uni = vrun >= 2 * m + 1;
                    if (!uni) {
                        mix[static_cast<size_t>((y - 2 * m) * T + x)] = 1;
                        ++mixed_count_;
                    }
                }
            }
        }
    }
}

uint16_t PartitionOfUnity::cls(int64_t i, int64_t j) const {
    if (i < 0 || j < 0 || i >= raster_->dims() || j >= raster_->dims()) return 0;
    if (raster_->in_core(i, j)) return kCoreClass;
    const uint16_t v = raster_->label(i, j);
    if (v != kCutLabel) return v;
    auto it = cut_class_.find(cell_key(i, j));
    return it == cut_class_.end() ? 0 : it->second;
}

bool PartitionOfUnity::uniform(int64_t i, int64_t j) const {
    if (i < 0 || j < 0 || i >= raster_->dims() || j >= raster_->dims()) return true;
    const Tile* t = raster_->tile(i >> raster_->s, j >> raster_->s);
    if (!t) return true;
    const size_t ti = static_cast<size_t>(t - raster_->tiles().data());
    return !mixed_[ti][raster_->local(i, j)];
}

void PartitionOfUnity::at(int64_t i, int64_t j, std::vector<PouMember>& out) const {
    out.clear();
    if (!raster_->inside(i, j)) return;
    if (uniform(i, j)) {
        const uint16_t v = cls(i, j);
        if (v == kCoreClass)
            out.push_back({0, Jet(order_, 1)});
        else if (v != 0 && v != kCutLabel)
            out.push_back({v, Jet(order_, 1)});
        else
            throw Error("DenominatorVanishes", "no member reaches raster cell " + cell_str(i, j));
        return;
    }
    const int m = kernel_.m, S = kernel_.side();
    const int J = (order_ + 1) * (order_ + 2) / 2;
    std::vector<std::pair<uint16_t, Jet>> acc;
    auto slot = [&](uint16_t id) -> Jet& {
        for (auto& p : acc)
            if (p.first == id) return p.second;
        acc.push_back({id, Jet(order_)});
        return acc.back().second;
    };
    for (int dj = -m; dj <= m; ++dj)
        for (int di = -m; di <= m; ++di) {
            const size_t at = static_cast<size_t>((dj + m) * S + (di + m));
            if (kernel_.weights[0][at] == 0 && dj * dj + di * di != 0) {
                bool any = false;
                for (int idx = 0; idx < J && !any; ++idx) any = kernel_.weights[static_cast<size_t>(idx)][at] != 0;
                if (!any) continue;
            }
            const uint16_t v = cls(i - di, j - dj);
            if (v == 0 || v == kCutLabel) continue;
            Jet& a = slot(v == kCoreClass ? 0 : v);
            for (int mm = 0; mm <= order_; ++mm)
                for (int b = 0; b <= mm; ++b) {
                    const int idx = jet_index(mm - b, b);
                    a.c[static_cast<size_t>(idx)] += kernel_.weights[static_cast<size_t>(idx)][at] / (factorial(mm - b) * factorial(b));
                }
        }
    // restriction to the outer regions
    acc.erase(std::remove_if(acc.begin(), acc.end(),
                             [&](const auto& p) { return p.first != 0 && !raster_->in_region(i, j, p.first); }),
              acc.end());
    Jet sum(order_);
    for (const auto& p : acc) sum += p.second;
    if (!(sum.value() > 0)) throw Error("DenominatorVanishes", "mollified indicators vanish at raster cell " + cell_str(i, j));
    std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& p : acc) {
        Jet psi = p.second / sum;
        if (!psi.is_zero()) out.push_back({p.first, psi});
    }
}

Report check_pou(const PouSource& p, const CoreRegion& c, const Collar& col, PouScaling* scaling, double core_reach) {
    (void)col;
    Report rep;
    rep.title = "partition of unity";
    const Raster& r = p.raster();
    const int n = c.n, order = p.order();
    Check& c1 = rep.add("support_core", true, "psi_0 vanishes farther than " + std::to_string(core_reach).substr(0, 6) + "*2^-n from the core");
    Check& c2 = rep.add("support_regions", true, "psi_i vanishes outside the outer region i");
    Check& c3 = rep.add("range", true, "0 <= psi_i <= 1");
    Check& c4 = rep.add("sum", true, "sum psi_i = 1 within 1e-12, derivative sums within 1e-8*2^(n|alpha|)");
    Check& c5 = rep.add("growth", true, "");
    PouScaling sc;
    sc.n = n;
    const double l = std::ldexp(1.0, -n), reach = l * core_reach;
    std::vector<PouMember> mem;
    size_t cells = 0;
    for (const Tile& t : r.tiles())
        for (int64_t lj = 0; lj < r.tile_side(); ++lj)
            for (int64_t li = 0; li < r.tile_side(); ++li) {
                if (!t.cell_inside(static_cast<uint32_t>((lj << r.s) | li))) continue;
                const int64_t i = (t.ti << r.s) + li, j = (t.tj << r.s) + lj;
                ++cells;
                p.at(i, j, mem);
                Jet total(order);
                for (const PouMember& q : mem) {
                    total += q.psi;
                    if (q.index == 0 && !t.core) {
                        const double x = r.center(i), y = r.center(j);
                        double best = INFINITY;
                        for (int64_t dj = -1; dj <= 1; ++dj)
                            for (int64_t di = -1; di <= 1; ++di) {
                                const int64_t a = t.ti + di, b = t.tj + dj;
                                if (!r.core_tile(a, b)) continue;
                                const double dx = std::max({0.0, a * l - x, x - (a + 1) * l});
                                const double dy = std::max({0.0, b * l - y, y - (b + 1) * l});
                                best = std::min(best, std::hypot(dx, dy));
                            }
                        if (!(best <= reach)) Report::fail(c1, "cell " + cell_str(i, j) + " psi_0=" + fmt_g(q.psi.value()));
                    }
                    if (q.index != 0 && !r.in_region(i, j, q.index))
                        Report::fail(c2, "cell " + cell_str(i, j) + " psi_" + std::to_string(q.index) + "=" + fmt_g(q.psi.value()));
                    const double v = q.psi.value();
                    if (!(v >= 0 && v <= 1)) Report::fail(c3, "cell " + cell_str(i, j) + " psi_" + std::to_string(q.index) + "=" + fmt_g(v));
                    for (int m = 1; m <= order; ++m)
                        for (int b = 0; b <= m; ++b) {
                            const double s = std::abs(q.psi.derivative(m - b, b)) * std::ldexp(1.0, -n * m);
                            auto& slot = sc.constant[static_cast<size_t>(jet_index(m - b, b))];
                            slot = std::max(slot, s);
                        }
                }
                if (!(std::abs(total.value() - 1) <= 1e-12))
                    Report::fail(c4, "cell " + cell_str(i, j) + " sum=" + fmt_g(total.value()));
                for (int m = 1; m <= order; ++m)
                    for (int b = 0; b <= m; ++b)
                        if (!(std::abs(total.derivative(m - b, b)) <= 1e-8 * std::ldexp(1.0, n * m)))
                            Report::fail(c4, "cell " + cell_str(i, j) + " derivative (" + std::to_string(m - b) + "," + std::to_string(b) +
                                    ") sum=" + fmt_g(total.derivative(m - b, b)));
            }
    c5.detail = "max |d^alpha psi|*2^(-n|alpha|):";
    for (int m = 1; m <= order; ++m)
        for (int b = 0; b <= m; ++b)
            c5.detail += " (" + std::to_string(m - b) + "," + std::to_string(b) + ")=" + fmt_g(sc.constant[static_cast<size_t>(jet_index(m - b, b))]);
    for (int m = 1; m <= order; ++m)
        for (int b = 0; b <= m; ++b)
            if (!std::isfinite(sc.constant[static_cast<size_t>(jet_index(m - b, b))])) Report::fail(c5, "non-finite derivative constant");
    c1.detail += "; " + std::to_string(cells) + " inside cells";
    if (scaling) *scaling = sc;
    return rep;
}

Report compare_pou_scaling(const PouScaling& a, const PouScaling& b, int order, double factor) {
    Report rep;
    rep.title = "derivative growth";
    Check& c = rep.add("stable", true, "constants for n=" + std::to_string(a.n) + " and n=" + std::to_string(b.n) +
                                           " agree within a factor " + fmt_g(factor));
    for (int m = 1; m <= order; ++m)
        for (int bb = 0; bb <= m; ++bb) {
            const size_t k = static_cast<size_t>(jet_index(m - bb, bb));
            const double x = a.constant[k], y = b.constant[k];
            const std::string tag = "(" + std::to_string(m - bb) + "," + std::to_string(bb) + ") " + fmt_g(x) + " vs " + fmt_g(y);
            c.detail += "; " + tag;
            if (!(x > 0 && y > 0 && x <= factor * y && y <= factor * x)) Report::fail(c, tag);
        }
    return rep;
}

std::string raster_dump(const PouSource& p, uint16_t index, int a, int b, int64_t i0, int64_t j0, int64_t w, int64_t hgt) {
    const Raster& r = p.raster();
    std::string out = "# raster member=" + std::to_string(index) + " alpha=" + std::to_string(a) + "," + std::to_string(b) +
                      " origin=" + fmt_g(i0 * r.h) + "," + fmt_g(j0 * r.h) + " h=" + fmt_g(r.h) + " dims=" + std::to_string(w) +
                      "x" + std::to_string(hgt) + "\n";
    std::vector<PouMember> mem;
    for (int64_t j = j0 + hgt - 1; j >= j0; --j) {
        for (int64_t i = i0; i < i0 + w; ++i) {
            if (i > i0) out += ' ';
            if (!r.inside(i, j)) {
                out += "nan";
                continue;
            }
            p.at(i, j, mem);
            double v = 0;
            for (const PouMember& q : mem)
                if (q.index == index) v = q.psi.derivative(a, b);
            out += fmt_g(v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace sob
