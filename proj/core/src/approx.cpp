#include "sob/approx.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <random>

namespace sob {

namespace {

constexpr int kGauss = 15;

double falling(int a, int m) {
    double r = 1;
    for (int i = 0; i < m; ++i) r *= a - i;
    return r;
}

// mean of X^p over [-1/2,1/2]
double centred_moment(int p) { return p % 2 ? 0.0 : std::pow(0.5, p) / (p + 1); }

struct Rule {
    std::vector<double> t, w;  // nodes in [-1,1], weights summing to 2
};

const Rule& gauss_rule() {
    static const Rule rule = [] {
        using G = boost::math::quadrature::gauss<double, kGauss>;
        Rule r;
        const auto& x = G::abscissa();
        const auto& w = G::weights();
        for (size_t i = x.size(); i-- > 0;)
            if (x[i] != 0) {
                r.t.push_back(-x[i]);
                r.w.push_back(w[i]);
            }
        for (size_t i = 0; i < x.size(); ++i) {
            r.t.push_back(x[i]);
            r.w.push_back(w[i]);
        }
        return r;
    }();
    return rule;
}

// sum_{|alpha|=k} |d^alpha e|^p
double power_integrand(const Jet& e, int k, double pw) {
    double s = 0;
    for (int b = 0; b <= k; ++b) s += std::pow(std::abs(e.derivative(k - b, b)), pw);
    return s;
}

double power_integrand(const ScalarField& u, double x, double y, int k, double pw) {
    double s = 0;
    for (int b = 0; b <= k; ++b) s += std::pow(std::abs(u.eval(x, y, k - b, b)), pw);
    return s;
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Pt to_pt(double x, double y) { return {std::llround(std::ldexp(x, kFrac)), std::llround(std::ldexp(y, kFrac))}; }

}  // namespace

Poly2::Poly2(int k_, double cx_, double cy_, double l_) : k(k_), cx(cx_), cy(cy_), l(l_) {
    c.assign(static_cast<size_t>(k * (k + 1) / 2), 0.0);
}

double Poly2::eval(double x, double y, int a, int b) const {
    if (a + b >= k) return 0.0;
    const double X = (x - cx) / l, Y = (y - cy) / l;
    double s = 0;
    for (int m = a + b; m < k; ++m)
        for (int bb = b; bb <= m - a; ++bb) {
            const int aa = m - bb;
            s += c[static_cast<size_t>(jet_index(aa, bb))] * falling(aa, a) * falling(bb, b) * std::pow(X, aa - a) *
                 std::pow(Y, bb - b);
        }
    return s / std::pow(l, a + b);
}

Jet Poly2::jet(double x, double y, int order) const {
    Jet j(order);
    for (int m = 0; m <= order && m < k; ++m)
        for (int b = 0; b <= m; ++b) j.set_derivative(m - b, b, eval(x, y, m - b, b));
    return j;
}

FieldFn poly_field(const Poly2& p) {
    return [p](double x, double y, int a, int b) { return p.eval(x, y, a, b); };
}

double square_mean(const FieldFn& f, const Square& q, int a, int b) {
    const Rule& g = gauss_rule();
    const double l = q.length(), x0 = (static_cast<double>(q.i) + 0.5) * l, y0 = (static_cast<double>(q.j) + 0.5) * l;
    double s = 0;
    for (size_t jj = 0; jj < g.t.size(); ++jj) {
        double row = 0;
        for (size_t ii = 0; ii < g.t.size(); ++ii) row += g.w[ii] * f(x0 + 0.5 * l * g.t[ii], y0 + 0.5 * l * g.t[jj], a, b);
        s += g.w[jj] * row;
    }
    return s / 4;
}

Poly2 poly_fit(const FieldFn& u, const Square& q, int k) {
    if (k < 1 || k > kMaxOrder) throw Error("InvalidArgument", "fit order must be in [1," + std::to_string(kMaxOrder) + "]");
    const double l = q.length();
    Poly2 p(k, (static_cast<double>(q.i) + 0.5) * l, (static_cast<double>(q.j) + 0.5) * l, l);
    for (int d = k - 1; d >= 0; --d)
        for (int b = 0; b <= d; ++b) {
            const int a = d - b;
            const double mean = square_mean(u, q, a, b);
            if (!std::isfinite(mean))
                throw Error("QuadratureFailure", "non-finite mean of derivative (" + std::to_string(a) + "," + std::to_string(b) +
                                                     ") on " + to_string(q));
            double rhs = std::pow(l, d) * mean;
            for (int m = d + 1; m < k; ++m)
                for (int bb = b; bb <= m - a; ++bb) {
                    const int aa = m - bb;
                    rhs -= p.c[static_cast<size_t>(jet_index(aa, bb))] * falling(aa, a) * falling(bb, b) * centred_moment(aa - a) *
                           centred_moment(bb - b);
                }
            p.c[static_cast<size_t>(jet_index(a, b))] = rhs / (factorial(a) * factorial(b));
        }
    return p;
}

Poly2 poly_fit(const ScalarField& u, const Square& q, int k) {
    const double l = q.length(), x0 = static_cast<double>(q.i) * l, y0 = static_cast<double>(q.j) * l;
    for (const auto& z : u.singular_set())
        if (z[0] >= x0 && z[0] <= x0 + l && z[1] >= y0 && z[1] <= y0 + l)
            throw Error("SingularOnSquare", u.name() + " is singular on " + to_string(q));
    if (k - 1 > u.k_max())
        throw Error("DerivativeOrderUnavailable", u.name() + " lacks derivatives of order " + std::to_string(k - 1));
    return poly_fit([&u](double x, double y, int a, int b) { return u.eval(x, y, a, b); }, q, k);
}

size_t SquareMask::count() const {
    size_t n = 0;
    for (uint8_t b : bits) n += b != 0;
    return n;
}

SquareMask SquareMask::refined() const {
    SquareMask m;
    m.t = t + 1;
    const size_t side = size_t(1) << t, fine = side * 2;
    m.bits.assign(fine * fine, 0);
    for (size_t j = 0; j < fine; ++j)
        for (size_t i = 0; i < fine; ++i) m.bits[j * fine + i] = bits[(j / 2) * side + i / 2];
    return m;
}

SquareMask mask_from(int t, const std::function<bool(double, double)>& keep) {
    SquareMask m;
    m.t = t;
    const size_t side = size_t(1) << t;
    m.bits.assign(side * side, 0);
    for (size_t j = 0; j < side; ++j)
        for (size_t i = 0; i < side; ++i)
            m.bits[j * side + i] = keep((static_cast<double>(i) + 0.5) / static_cast<double>(side),
                                        (static_cast<double>(j) + 0.5) / static_cast<double>(side));
    return m;
}

double lp_norm_on_mask(const Poly2& p, const SquareMask& m, const Square& q, double pw) {
    static const double t3[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}, w3[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
    const size_t side = size_t(1) << m.t;
    const double l = q.length(), cell = l / static_cast<double>(side);
    const double x0 = static_cast<double>(q.i) * l, y0 = static_cast<double>(q.j) * l;
    double s = 0;
    for (size_t j = 0; j < side; ++j)
        for (size_t i = 0; i < side; ++i) {
            if (!m.bits[j * side + i]) continue;
            const double cx = x0 + (static_cast<double>(i) + 0.5) * cell, cy = y0 + (static_cast<double>(j) + 0.5) * cell;
            for (int b = 0; b < 3; ++b)
                for (int a = 0; a < 3; ++a)
                    s += w3[a] * w3[b] / 4 * std::pow(std::abs(p.eval(cx + 0.5 * cell * t3[a], cy + 0.5 * cell * t3[b])), pw);
        }
    return std::pow(s * cell * cell, 1 / pw);
}

NormEquivalence check_norm_equivalence(const Poly2& p, const SquareMask& e, const SquareMask& f, const Square& q, double pw,
                                       double eta, double bound) {
    if (!(pw >= 1)) throw Error("InvalidArgument", "exponent p must be at least 1");
    if (!(e.fraction() > eta) || !(f.fraction() > eta))
        throw Error("MeasureTooSmall", "mask fractions " + fmt_g(e.fraction()) + " and " + fmt_g(f.fraction()) +
                                           " must exceed eta = " + fmt_g(eta));
    NormEquivalence out;
    out.report.title = "norm equivalence";
    const double ne = lp_norm_on_mask(p, e, q, pw), nf = lp_norm_on_mask(p, f, q, pw);
    out.ratio = nf > 0 ? ne / nf : (ne > 0 ? INFINITY : 1.0);
    Check& c = out.report.add("bounded", true, "ratio " + fmt_g(out.ratio) + " against bound " + fmt_g(bound));
    if (!(out.ratio <= bound)) Report::fail(c, "ratio " + fmt_g(out.ratio));
    return out;
}

double norm_equivalence_constant(const SquareMask& e, const SquareMask& f, const Square& q, double pw, double eta, int k,
                                 size_t samples, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double l = q.length();
    double worst = 0;
    for (size_t s = 0; s < samples; ++s) {
        Poly2 p(k, (static_cast<double>(q.i) + 0.5) * l, (static_cast<double>(q.j) + 0.5) * l, l);
        for (double& c : p.c) c = coef(rng);
        worst = std::max(worst, check_norm_equivalence(p, e, f, q, pw, eta, INFINITY).ratio);
    }
    return worst;
}

ChainingResult check_chaining(const Chain& chain, const ScalarField& u, int k, double pw, int a, int b) {
    if (chain.squares.empty() || !valid_chain(chain)) throw Error("InvalidArgument", "not a valid chain");
    if (a < 0 || b < 0 || a + b > k) throw Error("InvalidArgument", "need |alpha| <= k");
    const Square& q1 = chain.squares.front();
    const Square& qm = chain.squares.back();
    const Poly2 p1 = poly_fit(u, q1, k), pm = poly_fit(u, qm, k);
    const Rule& g = gauss_rule();
    auto integrate = [&](const Square& q, const std::function<double(double, double)>& f) {
        const double l = q.length(), x0 = (static_cast<double>(q.i) + 0.5) * l, y0 = (static_cast<double>(q.j) + 0.5) * l;
        double s = 0;
        for (size_t jj = 0; jj < g.t.size(); ++jj)
            for (size_t ii = 0; ii < g.t.size(); ++ii) s += g.w[ii] * g.w[jj] * f(x0 + 0.5 * l * g.t[ii], y0 + 0.5 * l * g.t[jj]);
        return s * l * l / 4;
    };
    ChainingResult out;
    out.left = std::pow(integrate(q1, [&](double x, double y) { return std::pow(std::abs(p1.eval(x, y, a, b) - pm.eval(x, y, a, b)), pw); }),
                        1 / pw);
    for (int bb = 0; bb <= k; ++bb) {
        double s = 0;
        for (const Square& q : chain.squares) s += integrate(q, [&](double x, double y) { return std::pow(std::abs(u.eval(x, y, k - bb, bb)), pw); });
        out.right += std::pow(s, 1 / pw);
    }
    out.right *= std::pow(q1.length(), k - a - b);
    out.ratio = out.right > 0 ? out.left / out.right : (out.left > 0 ? INFINITY : 0.0);
    out.report.title = "chaining";
    Check& c = out.report.add("finite", true,
                              "m=" + std::to_string(chain.size()) + " left " + fmt_g(out.left) + " right " + fmt_g(out.right) +
                                  " ratio " + fmt_g(out.ratio));
    if (!std::isfinite(out.ratio)) Report::fail(c, to_string(q1) + " to " + to_string(qm));
    return out;
}

bool Approximant::in_previous(int64_t i, int64_t j) const {
    if (previous.cells_per_side == 0) return false;
    return previous.in_core(i >> (raster->s + 1), j >> (raster->s + 1));
}

Jet Approximant::jet(int64_t i, int64_t j) const {
    thread_local std::vector<PouMember> mem;
    pou->at(i, j, mem);
    if (mem.empty()) throw Error("OutsideDomain", "raster cell (" + std::to_string(i) + "," + std::to_string(j) + ") is not inside");
    const double x = raster->center(i), y = raster->center(j);
    auto base = [&](uint16_t idx) { return idx == 0 ? u->jet(x, y, k) : polys[idx - 1].jet(x, y, k); };
    if (mem.size() == 1 && mem[0].psi.value() == 1) {
        bool flat = true;
        for (int t = 1; t < mem[0].psi.size() && flat; ++t) flat = mem[0].psi.c[static_cast<size_t>(t)] == 0;
        if (flat) return base(mem[0].index);
    }
    // B_ref + sum (B_q - B_ref) psi_q, equal to sum B_q psi_q when the psi sum to 1
    size_t ref = 0;
    for (size_t t = 1; t < mem.size(); ++t)
        if (mem[t].psi.value() > mem[ref].psi.value()) ref = t;
    const Jet b = base(mem[ref].index);
    Jet out = b;
    for (size_t t = 0; t < mem.size(); ++t)
        if (t != ref) out += (base(mem[t].index) - b) * mem[t].psi;
    return out;
}

Approximant build_approximant(FieldPtr u, std::shared_ptr<const Decomposition> w, int n, int k, const ApproxConfig& cfg) {
    if (!u || !w) throw Error("InvalidArgument", "missing field or decomposition");
    if (k < 1 || k > kMaxOrder) throw Error("InvalidArgument", "order k must be in [1," + std::to_string(kMaxOrder) + "]");
    if (k > u->k_max()) throw Error("DerivativeOrderUnavailable", u->name() + " lacks derivatives of order " + std::to_string(k));
    if (n + 1 > w->max_level)
        throw Error("LevelExceedsDecomposition", "level " + std::to_string(n) + " needs the decomposition to level " + std::to_string(n + 1));
    for (const auto& z : u->singular_set())
        if (contains_point(*w->domain, to_pt(z[0], z[1])) == Location::inside)
            throw Error("InvalidArgument", u->name() + " is singular inside the domain");
    Approximant a;
    a.u = std::move(u);
    a.w = w;
    a.n = n;
    a.k = k;
    a.cfg = cfg;
    a.core = core_region(w, n);
    if (a.core.root.level <= n - 1) a.previous = core_region(w, n - 1, a.core.root);
    a.raster = std::make_unique<Raster>(w->domain, a.core, cfg.s);
    a.collar = partition_collar(a.core, *w->domain, cfg.collar, *a.raster);
    a.pou = std::make_unique<PartitionOfUnity>(a.core, a.collar, *a.raster, k, cfg.radius_shift);
    a.polys.reserve(a.collar.regions.size());
    for (const BoundaryRegion& r : a.collar.regions) a.polys.push_back(poly_fit(*a.u, r.associated, k));
    return a;
}

double eval_approximant(const Approximant& a, double x, double y, int da, int db) {
    if (da < 0 || db < 0 || da + db > a.k)
        throw Error("OrderTooHigh", "derivative order " + std::to_string(da + db) + " exceeds k = " + std::to_string(a.k));
    const Raster& r = *a.raster;
    const double fi = std::floor(x / r.h), fj = std::floor(y / r.h);
    if (!(fi >= 0 && fj >= 0 && fi < static_cast<double>(r.dims()) && fj < static_cast<double>(r.dims())) ||
        !r.inside(static_cast<int64_t>(fi), static_cast<int64_t>(fj)))
        throw Error("OutsideDomain", "(" + fmt_g(x) + "," + fmt_g(y) + ") is not in an inside raster cell");
    return a.jet(static_cast<int64_t>(fi), static_cast<int64_t>(fj)).derivative(da, db);
}

void check_integrable(const ScalarField& u, const Domain& d, double h, int k, double pw) {
    for (const auto& z : u.singular_set()) {
        if (contains_point(d, to_pt(z[0], z[1])) == Location::outside && dist_point_boundary(d, z[0], z[1]) > 4 * h) continue;
        const int64_t i0 = static_cast<int64_t>(std::floor((z[0] - 2 * h) / h)), i1 = static_cast<int64_t>(std::floor((z[0] + 2 * h) / h));
        const int64_t j0 = static_cast<int64_t>(std::floor((z[1] - 2 * h) / h)), j1 = static_cast<int64_t>(std::floor((z[1] + 2 * h) / h));
        std::vector<double> sums;
        for (int R = 4; R <= 64; R *= 2) {
            const double sub = h / R;
            double s = 0;
            for (int64_t j = j0 * R; j < (j1 + 1) * R; ++j)
                for (int64_t i = i0 * R; i < (i1 + 1) * R; ++i) {
                    const double x = (static_cast<double>(i) + 0.5) * sub, y = (static_cast<double>(j) + 0.5) * sub;
                    if (x <= 0 || y <= 0 || x >= 1 || y >= 1) continue;
                    if (contains_point(d, to_pt(x, y)) != Location::inside) continue;
                    s += power_integrand(u, x, y, k, pw);
                }
            sums.push_back(s * sub * sub);
        }
        // successive differences shrink geometrically for an integrable singularity
        std::vector<double> diff;
        for (size_t t = 1; t < sums.size(); ++t) diff.push_back(sums[t] - sums[t - 1]);
        size_t stalled = 0;
        for (size_t t = 1; t < diff.size(); ++t)
            if (diff[t - 1] > 0 && diff[t] >= 0.95 * diff[t - 1]) ++stalled;
        if (stalled >= 2 || !std::isfinite(sums.back()))
            throw Error("NonIntegrable", "|grad^" + std::to_string(k) + " " + u.name() + "|^" + fmt_g(pw) + " does not settle near (" +
                                             fmt_g(z[0]) + "," + fmt_g(z[1]) + "): " + fmt_g(sums.front()) + " -> " + fmt_g(sums.back()));
    }
}

namespace {

struct ZoneSums {
    SeminormResult prev, rest;
};

bool near_singular(const ScalarField& u, double x, double y, double h) {
    return !u.singular_set().empty() && u.dist_to_singular(x, y) <= 2 * h;
}

// error integrand over a cell near the singular set: 4x4 subcells, psi frozen at the cell centre
double refined_error(const Approximant& a, int64_t i, int64_t j, int k, double pw) {
    thread_local std::vector<PouMember> mem;
    a.pou->at(i, j, mem);
    const double h = a.raster->h, sub = h / 4;
    double s = 0;
    for (int sj = 0; sj < 4; ++sj)
        for (int si = 0; si < 4; ++si) {
            const double x = static_cast<double>(i) * h + (si + 0.5) * sub, y = static_cast<double>(j) * h + (sj + 0.5) * sub;
            const Jet uj = a.u->jet(x, y, a.k);
            Jet ue(a.k);
            for (const PouMember& q : mem) ue += (q.index == 0 ? uj : a.polys[q.index - 1].jet(x, y, a.k)) * q.psi;
            s += power_integrand(uj - ue, k, pw);
        }
    return s / 16;
}

double refined_tail(const Approximant& a, int64_t i, int64_t j, int k, double pw) {
    const double h = a.raster->h, sub = h / 4;
    double s = 0;
    for (int sj = 0; sj < 4; ++sj)
        for (int si = 0; si < 4; ++si)
            s += power_integrand(*a.u, static_cast<double>(i) * h + (si + 0.5) * sub, static_cast<double>(j) * h + (sj + 0.5) * sub, k, pw);
    return s / 16;
}

void validate(const Approximant& a, int k, double pw) {
    if (k < 1 || k > a.k) throw Error("InvalidArgument", "error order must be in [1," + std::to_string(a.k) + "]");
    if (!(pw >= 1) || !std::isfinite(pw)) throw Error("InvalidArgument", "exponent p must be finite and at least 1");
}

ZoneSums error_sums(const Approximant& a, int k, double pw, const std::function<bool(int64_t, int64_t)>& mask) {
    validate(a, k, pw);
    check_integrable(*a.u, *a.w->domain, a.raster->h, k, pw);
    const Raster& r = *a.raster;
    const PartitionOfUnity& p = *a.pou;
    const int64_t T = r.tile_side();
    const double area = r.h * r.h;
    ZoneSums z;
    for (size_t ti = 0; ti < r.tiles().size(); ++ti) {
        const Tile& t = r.tiles()[ti];
        double part[2] = {0, 0};
        for (int64_t lj = 0; lj < T; ++lj)
            for (int64_t li = 0; li < T; ++li) {
                const uint32_t loc = static_cast<uint32_t>((lj << r.s) | li);
                if (!t.cell_inside(loc)) continue;
                const int64_t i = (t.ti << r.s) + li, j = (t.tj << r.s) + lj;
                if (mask && !mask(i, j)) continue;
                const double x = r.center(i), y = r.center(j);
                const bool mixed = p.mixed_at(ti, loc);
                const bool prev = a.in_previous(i, j);
                SeminormResult& res = prev ? z.prev : z.rest;
                double v;
                if (near_singular(*a.u, x, y, r.h)) {
                    v = refined_error(a, i, j, k, pw);
                    ++res.refined;
                } else if (!mixed && t.core) {
                    continue;  // u_eps = u exactly
                } else if (!mixed && t.label[loc] != 0 && t.label[loc] != kCutLabel) {
                    v = power_integrand(a.u->jet(x, y, a.k) - a.polys[t.label[loc] - 1].jet(x, y, a.k), k, pw);
                } else {
                    v = power_integrand(a.u->jet(x, y, a.k) - a.jet(i, j), k, pw);
                }
                ++res.cells;
                part[prev ? 0 : 1] += v;
            }
        z.prev.power_sum += part[0] * area;
        z.rest.power_sum += part[1] * area;
    }
    return z;
}

}  // namespace

SeminormResult seminorm_error(const Approximant& a, int k, double pw, Zone zone, const std::function<bool(int64_t, int64_t)>& mask) {
    const ZoneSums z = error_sums(a, k, pw, mask);
    SeminormResult out;
    if (zone != Zone::outside_previous_core) {
        out.power_sum += z.prev.power_sum;
        out.cells += z.prev.cells;
        out.refined += z.prev.refined;
    }
    if (zone != Zone::previous_core) {
        out.power_sum += z.rest.power_sum;
        out.cells += z.rest.cells;
        out.refined += z.rest.refined;
    }
    out.value = std::pow(out.power_sum, 1 / pw);
    return out;
}

SeminormResult tail_norm(const Approximant& a, int k, double pw) {
    validate(a, k, pw);
    check_integrable(*a.u, *a.w->domain, a.raster->h, k, pw);
    const Raster& r = *a.raster;
    const int64_t T = r.tile_side();
    const double area = r.h * r.h;
    SeminormResult out;
    auto cell = [&](int64_t i, int64_t j) {
        const double x = r.center(i), y = r.center(j);
        ++out.cells;
        if (near_singular(*a.u, x, y, r.h)) {
            ++out.refined;
            return refined_tail(a, i, j, k, pw);
        }
        return power_integrand(a.u->jet(x, y, k), k, pw);
    };
    for (const Tile& t : r.tiles()) {
        if (a.in_previous(t.ti << r.s, t.tj << r.s)) continue;
        double part = 0;
        for (int64_t lj = 0; lj < T; ++lj)
            for (int64_t li = 0; li < T; ++li)
                if (t.cell_inside(static_cast<uint32_t>((lj << r.s) | li))) part += cell((t.ti << r.s) + li, (t.tj << r.s) + lj);
        out.power_sum += part * area;
    }
    // core cells of level n that the raster leaves implicit
    const int64_t N = a.core.cells_per_side;
    for (int64_t tj = 0; tj < N; ++tj)
        for (int64_t ti = 0; ti < N; ++ti) {
            if (!a.core.in_core(ti, tj) || r.tile(ti, tj) || a.in_previous(ti << r.s, tj << r.s)) continue;
            double part = 0;
            for (int64_t lj = 0; lj < T; ++lj)
                for (int64_t li = 0; li < T; ++li) part += cell((ti << r.s) + li, (tj << r.s) + lj);
            out.power_sum += part * area;
        }
    out.value = std::pow(out.power_sum, 1 / pw);
    return out;
}

ErrorRow error_row(const Approximant& a, double pw) {
    const ZoneSums z = error_sums(a, a.k, pw, {});
    ErrorRow row;
    row.n = a.n;
    row.k = a.k;
    row.p = pw;
    row.core_error = std::pow(z.prev.power_sum, 1 / pw);
    row.collar_error = std::pow(z.rest.power_sum, 1 / pw);
    row.E = std::pow(z.prev.power_sum + z.rest.power_sum, 1 / pw);
    row.tail = tail_norm(a, a.k, pw).value;
    row.regions = a.collar.regions.size();
    row.cells = z.prev.cells + z.rest.cells;
    return row;
}

ErrorReport convergence_study(FieldPtr u, std::shared_ptr<const Domain> d, int k, double pw, const std::vector<int>& n_list,
                              const ApproxConfig& cfg, const std::function<void(const Approximant&)>& visit) {
    if (!u || !d) throw Error("InvalidArgument", "missing field or domain");
    if (n_list.empty()) throw Error("InvalidArgument", "empty level list");
    for (size_t t = 0; t < n_list.size(); ++t)
        if (n_list[t] < 1 || (t > 0 && n_list[t] <= n_list[t - 1]))
            throw Error("InvalidArgument", "levels must be positive and strictly increasing");
    if (k < 1 || k > kMaxOrder) throw Error("InvalidArgument", "order k must be in [1," + std::to_string(kMaxOrder) + "]");
    if (!(pw >= 1) || !std::isfinite(pw)) throw Error("InvalidArgument", "exponent p must be finite and at least 1");
    auto w = std::make_shared<const Decomposition>(whitney_decompose(d, n_list.back() + 1));
    ErrorReport rep;
    rep.field = u->name();
    rep.domain = d->name;
    rep.params = u->params();
    rep.s = cfg.s;
    rep.radius_shift = cfg.radius_shift;
    rep.M = cfg.collar.M;
    rep.C = cfg.collar.C;
    for (int n : n_list) {
        const auto t0 = std::chrono::steady_clock::now();
        const Approximant a = build_approximant(u, w, n, k, cfg);
        ErrorRow row = error_row(a, pw);
        row.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.rows.push_back(row);
        if (visit) visit(a);
    }
    return rep;
}

std::string ErrorReport::to_table(char delim) const {
    const std::string D(1, delim);
    std::string out = "n" + D + "k" + D + "p" + D + "E" + D + "core_error" + D + "collar_error" + D + "tail" + D + "regions" + D + "cells";
    if (with_runtime) out += D + "runtime_s";
    out += '\n';
    for (const ErrorRow& r : rows) {
        out += std::to_string(r.n) + D + std::to_string(r.k) + D + fmt_g(r.p) + D + fmt_g(r.E) + D + fmt_g(r.core_error) + D +
               fmt_g(r.collar_error) + D + fmt_g(r.tail) + D + std::to_string(r.regions) + D + std::to_string(r.cells);
        if (with_runtime) out += D + fmt_g(r.runtime);
        out += '\n';
    }
    return out;
}

std::string ErrorReport::to_json() const {
    nlohmann::ordered_json j;
    j["field"] = field;
    j["field_params"] = nlohmann::ordered_json::object();
    for (const auto& [key, v] : params) j["field_params"][key] = v;
    j["domain"] = domain;
    j["quadrature"] = {{"rule", "midpoint"},
                       {"raster_shift", s},
                       {"mollifier_shift", radius_shift},
                       {"singular_refinement", 4},
                       {"moment_rule", "gauss-legendre " + std::to_string(kGauss) + "x" + std::to_string(kGauss)}};
    j["collar"] = {{"M", M}, {"C", C}};
    j["rows"] = nlohmann::ordered_json::array();
    for (const ErrorRow& r : rows) {
        nlohmann::ordered_json row = {{"n", r.n},
                                      {"k", r.k},
                                      {"p", r.p},
                                      {"E", r.E},
                                      {"core_error", r.core_error},
                                      {"collar_error", r.collar_error},
                                      {"tail", r.tail},
                                      {"regions", r.regions},
                                      {"cells", r.cells}};
        if (with_runtime) row["runtime_s"] = r.runtime;
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

}  // namespace sob
