#include "sob/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace sob {

namespace {

using ojson = nlohmann::ordered_json;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string px_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

[[noreturn]] void bad(const std::string& what) { throw Error("ParseError", what); }

ojson parse(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        bad(e.what());
    }
}

int64_t as_int(const ojson& v, const char* what) {
    if (!v.is_number_integer()) bad(std::string(what) + " must be an integer");
    return v.get<int64_t>();
}

Square parse_square(const ojson& v) {
    if (!v.is_array() || v.size() != 3) bad("square must be a [level, i, j] triple");
    const int64_t L = as_int(v[0], "level");
    if (L < 0 || L > kMaxLevel) bad("square level out of range");
    const Square q{static_cast<int>(L), as_int(v[1], "i"), as_int(v[2], "j")};
    const int64_t side = int64_t(1) << q.level;
    if (q.i < 0 || q.j < 0 || q.i >= side || q.j >= side) bad("square " + to_string(q) + " outside the unit square");
    return q;
}

ojson square_json(const Square& q) { return ojson::array({q.level, q.i, q.j}); }

ojson squares_json(const std::vector<Square>& v) {
    ojson a = ojson::array();
    for (const Square& q : v) a.push_back(square_json(q));
    return a;
}

std::vector<Square> parse_squares(const ojson& v, const char* what) {
    if (!v.is_array()) bad(std::string(what) + " must be an array");
    std::vector<Square> out;
    for (const auto& q : v) out.push_back(parse_square(q));
    return out;
}

mpq_class parse_q(const ojson& v) {
    if (!v.is_string()) bad("rational coordinate must be a string");
    mpq_class q;
    if (q.set_str(v.get<std::string>(), 10) != 0 || q.get_den() == 0) bad("bad rational '" + v.get<std::string>() + "'");
    q.canonicalize();
    return q;
}

bool scalar_array(const ojson& v) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
        if (e.is_structured()) return false;
    return true;
}

// objects indented, arrays of scalars kept on one line
void pretty(const ojson& v, int depth, std::string& out) {
    const std::string pad(static_cast<size_t>(depth + 1), ' '), end(static_cast<size_t>(depth), ' ');
    if (v.is_object() && !v.empty()) {
        out += "{\n";
        size_t k = 0;
        for (auto it = v.begin(); it != v.end(); ++it, ++k) {
            out += pad + ojson(it.key()).dump() + ": ";
            pretty(it.value(), depth + 1, out);
            out += k + 1 < v.size() ? ",\n" : "\n";
        }
        out += end + "}";
    } else if (v.is_array() && !v.empty() && !scalar_array(v)) {
        out += "[\n";
        for (size_t k = 0; k < v.size(); ++k) {
            out += pad;
            pretty(v[k], depth + 1, out);
            out += k + 1 < v.size() ? ",\n" : "\n";
        }
        out += end + "]";
    } else {
        out += v.dump();
    }
}

std::string pretty(const ojson& v) {
    std::string out;
    pretty(v, 0, out);
    return out + "\n";
}

struct Svg {
    int px;
    std::string body;
    explicit Svg(int p) : px(p) {}
    double X(double x) const { return x * px; }
    double Y(double y) const { return (1 - y) * px; }
    void rect(const Box& b, const std::string& style) {
        const double x0 = to_double(b.x0), y1 = to_double(b.y1);
        const double w = to_double(b.x1 - b.x0), h = to_double(b.y1 - b.y0);
        body += "<rect x=\"" + px_str(X(x0)) + "\" y=\"" + px_str(Y(y1)) + "\" width=\"" + px_str(w * px) + "\" height=\"" +
                px_str(h * px) + "\" " + style + "/>\n";
    }
    void poly(const std::vector<std::pair<double, double>>& pts, bool closed, const std::string& style) {
        body += closed ? "<polygon points=\"" : "<polyline points=\"";
        for (size_t k = 0; k < pts.size(); ++k) {
            if (k) body += ' ';
            body += px_str(X(pts[k].first)) + "," + px_str(Y(pts[k].second));
        }
        body += "\" " + style + "/>\n";
    }
    void domain(const Domain& d) {
        std::vector<std::pair<double, double>> pts;
        for (const Pt& p : d.v) pts.emplace_back(to_double(p.x), to_double(p.y));
        poly(pts, true, "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"");
    }
    std::string finish(const std::string& defs = {}) const {
        const std::string s = std::to_string(px);
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + s + "\" height=\"" + s + "\" viewBox=\"0 0 " + s + " " +
               s + "\">\n" + (defs.empty() ? "" : "<defs>\n" + defs + "</defs>\n") +
               "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body + "</svg>\n";
    }
};

}  // namespace

std::string read_file(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("FileNotFound", what + " not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IOError", "cannot write " + path);
    out << text;
    if (!out) throw Error("IOError", "write failed: " + path);
}

std::string decomposition_to_json(const Decomposition& w) {
    ojson j;
    j["domain"] = ojson::parse(domain_to_json(*w.domain));
    j["max_level"] = w.max_level;
    ojson levels = ojson::array();
    for (const auto& [n, sq] : w.levels) levels.push_back({{"level", n}, {"count", sq.size()}, {"squares", squares_json(sq)}});
    j["levels"] = levels;
    return pretty(j);
}

Decomposition load_decomposition(const std::string& text) {
    const ojson j = parse(text);
    if (!j.is_object() || !j.contains("domain") || !j.contains("levels") || !j.contains("max_level"))
        bad("decomposition document needs 'domain', 'max_level' and 'levels'");
    auto d = std::make_shared<const Domain>(load_domain(j["domain"].dump()));
    const int64_t L = as_int(j["max_level"], "max_level");
    if (L < 1 || L > kMaxLevel) bad("max_level out of range");
    if (!j["levels"].is_array()) bad("'levels' must be an array");
    std::vector<Square> all;
    std::vector<int> listed;
    for (const auto& lv : j["levels"]) {
        if (!lv.is_object() || !lv.contains("level") || !lv.contains("squares")) bad("level entry needs 'level' and 'squares'");
        const int64_t n = as_int(lv["level"], "level");
        const auto sq = parse_squares(lv["squares"], "squares");
        if (lv.contains("count") && as_int(lv["count"], "count") != static_cast<int64_t>(sq.size()))
            bad("level " + std::to_string(n) + " count does not match its squares");
        if (n < 0 || n > L) bad("level " + std::to_string(n) + " out of range");
        listed.push_back(static_cast<int>(n));
        for (const Square& q : sq) {
            if (q.level != n) bad("square " + to_string(q) + " listed under level " + std::to_string(n));
            if (q.level > L) bad("square " + to_string(q) + " deeper than max_level");
            all.push_back(q);
        }
    }
    Decomposition w = Decomposition::from_squares(d, all, static_cast<int>(L));
    for (int n : listed) w.levels[n];
    return w;
}

std::string decomposition_svg(const Decomposition& w, int px) {
    Svg svg(px);
    for (const auto& [n, sq] : w.levels) {
        const std::string style = "fill=\"none\" stroke=\"" + std::string(kPalette[n % 8]) + "\" stroke-width=\"" +
                                  px_str(std::max(0.2, 2.0 - 0.25 * n)) + "\" class=\"level-" + std::to_string(n) + "\"";
        for (const Square& q : sq) svg.rect(q.box(), style);
    }
    svg.domain(*w.domain);
    return svg.finish();
}

size_t RegionMask::cells() const {
    size_t c = 0;
    for (const auto& r : runs) c += static_cast<size_t>(r[2]);
    return c;
}

std::vector<uint64_t> RegionMask::keys() const {
    std::vector<uint64_t> out;
    out.reserve(cells());
    for (const auto& [j, i0, len] : runs)
        for (int64_t i = i0; i < i0 + len; ++i) out.push_back((static_cast<uint64_t>(i) << 32) | static_cast<uint64_t>(j));
    return out;
}

std::vector<RegionMask> region_masks(const Raster& r, size_t regions) {
    std::vector<RegionMask> masks(regions);
    for (size_t k = 0; k < regions; ++k) masks[k].region = static_cast<uint16_t>(k + 1);
    const auto& tiles = r.tiles();
    const int64_t side = r.tile_side();
    std::vector<uint16_t> mem;
    size_t a = 0;
    while (a < tiles.size()) {
        size_t b = a;
        while (b < tiles.size() && tiles[b].tj == tiles[a].tj) ++b;
        for (int64_t y = 0; y < side; ++y) {
            const int64_t j = tiles[a].tj * side + y;
            for (size_t t = a; t < b; ++t)
                for (int64_t x = 0; x < side; ++x) {
                    const int64_t i = tiles[t].ti * side + x;
                    r.regions(i, j, mem);
                    for (uint16_t g : mem) {
                        if (g == 0 || g > regions) continue;
                        auto& runs = masks[g - 1].runs;
                        if (!runs.empty() && runs.back()[0] == j && runs.back()[1] + runs.back()[2] == i)
                            ++runs.back()[2];
                        else
                            runs.push_back({j, i, 1});
                    }
                }
        }
        a = b;
    }
    return masks;
}

std::string core_collar_to_json(const CoreRegion& c, const Collar& col, const Raster& r) {
    ojson j;
    j["domain"] = c.w->domain->name;
    j["n"] = c.n;
    j["s"] = r.s;
    j["root"] = square_json(c.root);
    j["core"] = squares_json(c.squares);
    j["boundary_layer"] = squares_json(c.boundary_layer);
    ojson cyc = ojson::array();
    for (const auto& [x, y] : c.cycle.y) cyc.push_back({x, y});
    j["cycle"] = {{"level", c.cycle.level}, {"vertices", cyc}};
    ojson cuts = ojson::array();
    for (const Polyline& p : col.cuts) {
        ojson pts = ojson::array();
        for (const QPt& q : p.points) pts.push_back({q.x.get_str(), q.y.get_str()});
        cuts.push_back(pts);
    }
    j["cuts"] = cuts;
    ojson regs = ojson::array();
    const auto masks = region_masks(r, col.regions.size());
    for (const BoundaryRegion& g : col.regions) {
        ojson runs = ojson::array();
        for (const auto& run : masks[g.index - 1].runs) runs.push_back({run[0], run[1], run[2]});
        regs.push_back({{"index", g.index},
                        {"arc", {g.arc_begin, g.arc_end}},
                        {"collar_squares", squares_json(g.collar_squares)},
                        {"associated", square_json(g.associated)},
                        {"cells", masks[g.index - 1].cells()},
                        {"mask_rle", runs}});
    }
    j["regions"] = regs;
    return pretty(j);
}

CoreCollarDoc load_core_collar(const std::string& text) {
    const ojson j = parse(text);
    for (const char* key : {"n", "s", "root", "core", "boundary_layer", "cycle", "cuts", "regions"})
        if (!j.is_object() || !j.contains(key)) bad(std::string("core/collar document needs '") + key + "'");
    CoreCollarDoc d;
    d.domain = j.value("domain", "");
    d.n = static_cast<int>(as_int(j["n"], "n"));
    d.s = static_cast<int>(as_int(j["s"], "s"));
    if (d.n < 1 || d.n > kMaxLevel || d.s < 0 || d.n + d.s > 31) bad("n or s out of range");
    d.root = parse_square(j["root"]);
    d.core = parse_squares(j["core"], "core");
    d.boundary_layer = parse_squares(j["boundary_layer"], "boundary_layer");
    const auto& cyc = j["cycle"];
    if (!cyc.is_object() || !cyc.contains("vertices") || !cyc["vertices"].is_array()) bad("cycle needs 'vertices'");
    for (const auto& v : cyc["vertices"]) {
        if (!v.is_array() || v.size() != 2) bad("cycle vertex must be an [i, j] pair");
        d.cycle.emplace_back(as_int(v[0], "i"), as_int(v[1], "j"));
    }
    if (!d.cycle.empty() && d.cycle.front() != d.cycle.back()) bad("cycle is not closed");
    if (!j["cuts"].is_array()) bad("'cuts' must be an array");
    for (const auto& c : j["cuts"]) {
        if (!c.is_array()) bad("cut must be an array of points");
        Polyline p;
        for (const auto& q : c) {
            if (!q.is_array() || q.size() != 2) bad("cut point must be an [x, y] pair");
            p.points.push_back({parse_q(q[0]), parse_q(q[1])});
        }
        d.cuts.push_back(std::move(p));
    }
    if (!j["regions"].is_array()) bad("'regions' must be an array");
    const int64_t dims = int64_t(1) << (d.n + d.s);
    for (const auto& g : j["regions"]) {
        if (!g.is_object() || !g.contains("index") || !g.contains("mask_rle")) bad("region needs 'index' and 'mask_rle'");
        RegionMask m;
        const int64_t idx = as_int(g["index"], "index");
        if (idx < 1 || idx >= kCutLabel) bad("region index out of range");
        m.region = static_cast<uint16_t>(idx);
        if (!g["mask_rle"].is_array()) bad("'mask_rle' must be an array");
        for (const auto& run : g["mask_rle"]) {
            if (!run.is_array() || run.size() != 3) bad("run must be a [j, i0, length] triple");
            const std::array<int64_t, 3> r{as_int(run[0], "j"), as_int(run[1], "i0"), as_int(run[2], "length")};
            if (r[0] < 0 || r[0] >= dims || r[1] < 0 || r[2] < 1 || r[1] + r[2] > dims) bad("run outside the raster");
            if (!m.runs.empty()) {
                const auto& p = m.runs.back();
                if (r[0] < p[0] || (r[0] == p[0] && r[1] <= p[1] + p[2])) bad("runs not sorted and disjoint");
            }
            m.runs.push_back(r);
        }
        if (g.contains("cells") && as_int(g["cells"], "cells") != static_cast<int64_t>(m.cells()))
            bad("region " + std::to_string(idx) + " cell count does not match its runs");
        d.masks.push_back(std::move(m));
    }
    for (size_t k = 0; k < d.masks.size(); ++k)
        if (d.masks[k].region != k + 1) bad("regions must be numbered 1..R in order");
    return d;
}

std::string core_collar_svg(const CoreRegion& c, const Collar& col, const Raster& r, int px) {
    Svg svg(px);
    std::string defs;
    const size_t R = col.regions.size();
    for (size_t g = 1; g <= R; ++g) {
        const char* colour = kPalette[g % 8];
        const int angle = static_cast<int>(45 + 90 * (g % 2)) + static_cast<int>(15 * ((g / 2) % 3));
        defs += "<pattern id=\"hatch" + std::to_string(g) +
                "\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\" patternTransform=\"rotate(" + std::to_string(angle) +
                ")\"><rect width=\"6\" height=\"6\" fill=\"" + colour + "\" fill-opacity=\"0.12\"/><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"" +
                colour + "\" stroke-width=\"2\"/></pattern>\n";
    }
    for (const Square& q : c.squares) svg.rect(q.box(), "fill=\"#9e9e9e\" fill-opacity=\"0.55\" stroke=\"none\"");

    // regions drawn on a display grid four times finer than level n, sampled at pixel centres
    const int sub = std::min(2, r.s);
    const int64_t per_tile = int64_t(1) << sub;
    const int64_t step = r.tile_side() >> sub;
    const int dl = r.n + sub;
    std::vector<std::map<int64_t, std::vector<int64_t>>> rows(R + 1);  // region -> display row -> columns
    std::vector<uint16_t> mem;
    for (const Tile& t : r.tiles())
        for (int64_t y = 0; y < per_tile; ++y)
            for (int64_t x = 0; x < per_tile; ++x) {
                const int64_t I = t.ti * per_tile + x, J = t.tj * per_tile + y;
                r.regions(I * step + step / 2, J * step + step / 2, mem);
                for (uint16_t g : mem)
                    if (g >= 1 && g <= R) rows[g][J].push_back(I);
            }
    for (size_t g = 1; g <= R; ++g) {
        const std::string style = "fill=\"url(#hatch" + std::to_string(g) + ")\" stroke=\"none\" class=\"region-" + std::to_string(g) + "\"";
        for (auto& [J, cols] : rows[g]) {
            std::sort(cols.begin(), cols.end());
            size_t a = 0;
            while (a < cols.size()) {
                size_t b = a + 1;
                while (b < cols.size() && cols[b] == cols[b - 1] + 1) ++b;
                const int64_t side = int64_t(1) << (kFrac - dl);
                svg.rect({cols[a] * side, J * side, (cols[b - 1] + 1) * side, (J + 1) * side}, style);
                a = b;
            }
        }
    }
    if (!c.cycle.y.empty()) {
        std::vector<std::pair<double, double>> pts;
        const double sp = c.cycle.spacing();
        for (const auto& [x, y] : c.cycle.y) pts.emplace_back(x * sp, y * sp);
        svg.poly(pts, false, "fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"");
    }
    for (const Polyline& p : col.cuts) {
        std::vector<std::pair<double, double>> pts;
        for (const QPt& q : p.points) pts.emplace_back(to_double(q.x), to_double(q.y));
        svg.poly(pts, false, "fill=\"none\" stroke=\"red\" stroke-width=\"2\" class=\"cut\"");
    }
    svg.domain(*c.w->domain);
    return svg.finish(defs);
}

std::string approximant_dump(const Approximant& a, int da, int db, int64_t stride) {
    if (stride < 1) throw Error("InvalidArgument", "stride must be positive");
    if (da < 0 || db < 0 || da + db > a.k) throw Error("OrderTooHigh", "dump order exceeds k");
    const Raster& r = *a.raster;
    const int64_t dims = r.dims(), w = (dims + stride - 1) / stride;
    const int64_t off = stride / 2;
    std::string out = "# raster field=u_eps alpha=" + std::to_string(da) + "," + std::to_string(db) + " origin=" + num(off * r.h) +
                      "," + num(off * r.h) + " h=" + num(stride * r.h) + " dims=" + std::to_string(w) + "x" + std::to_string(w) + "\n";
    for (int64_t J = w - 1; J >= 0; --J) {
        for (int64_t I = 0; I < w; ++I) {
            if (I) out += ' ';
            const int64_t i = I * stride + off, j = J * stride + off;
            out += r.inside(i, j) ? num(a.jet(i, j).derivative(da, db)) : "nan";
        }
        out += '\n';
    }
    return out;
}

}  // namespace sob
