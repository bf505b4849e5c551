#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "sob/io.hpp"

using namespace sob;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kPipeline = 3 };

// errors that come from the user's input rather than the pipeline
const std::set<std::string> kInputErrors = {"FileNotFound", "ParseError",   "NonDyadicCoordinate", "TooFewVertices",
                                            "NonSimplePolygon", "IOError", "UnknownField"};

struct Options {
    std::string domain, decomposition, out = "sob_out";
    int max_level = 8;
    int n = 0;
    std::string n_list;
    int k = 1;
    double p = 2;
    double M = 8;
    int64_t C = 2048;
    int delta_shift = 3, mollifier_shift = 5, s = 7;
    double psi0_reach = 0.1;
    uint64_t seed = 1;
    int threads = 1;
    std::string field = "trig_exp", field_params;
    std::string delim = ",";
    size_t pairs = 128;
    bool runtime = false;
};

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw Usage(msg);
}

std::vector<int> levels(const Options& o) {
    std::vector<int> v;
    if (!o.n_list.empty()) {
        std::stringstream ss(o.n_list);
        std::string t;
        while (std::getline(ss, t, ',')) {
            size_t used = 0;
            int x = 0;
            try {
                x = std::stoi(t, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            require(used == t.size() && !t.empty(), "bad level '" + t + "' in --n-list");
            v.push_back(x);
        }
    } else if (o.n > 0) {
        v.push_back(o.n);
    }
    require(!v.empty(), "give --n or --n-list");
    for (size_t t = 0; t < v.size(); ++t) {
        require(v[t] >= 1 && v[t] + 1 <= kMaxLevel, "levels must lie in [1," + std::to_string(kMaxLevel - 1) + "]");
        require(t == 0 || v[t] > v[t - 1], "levels must be strictly increasing");
    }
    return v;
}

CollarConfig collar_config(const Options& o) {
    CollarConfig c;
    c.M = o.M;
    c.C = o.C;
    c.delta_shift = o.delta_shift;
    return c;
}

void common_checks(const Options& o) {
    require(o.threads >= 1, "--threads must be at least 1");
    require(o.M > 0 && std::isfinite(o.M), "--M must be positive");
    require(o.C >= 1, "--C must be at least 1");
    require(o.delta_shift >= 1 && o.delta_shift <= 16, "--delta-shift must lie in [1,16]");
    require(o.mollifier_shift >= 1 && o.mollifier_shift <= 16, "--mollifier-shift must lie in [1,16]");
    require(o.psi0_reach > 0 && o.psi0_reach <= 1, "--psi0-reach must lie in (0,1]");
    require(o.s >= 7, "raster oversampling --s must be at least 7");
    require(o.s >= o.mollifier_shift + 2, "--s must be at least --mollifier-shift + 2 (four cells per mollifier radius)");
}

std::shared_ptr<const Domain> domain_of(const Options& o) {
    require(!o.domain.empty(), "--domain is required");
    return std::make_shared<const Domain>(load_domain(read_file(o.domain, "domain file")));
}

void emit(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    fs::create_directories(dir);
    for (const auto& [name, text] : files) write_file((dir / name).string(), text);
}

int cmd_decompose(const Options& o) {
    std::shared_ptr<const Domain> d;
    try {
        require(o.max_level >= 1 && o.max_level <= kMaxLevel, "--max-level must lie in [1," + std::to_string(kMaxLevel) + "]");
        require(o.threads >= 1, "--threads must be at least 1");
        d = domain_of(o);
    } catch (const Error& e) {
        throw Usage(e.what());
    }
    const Decomposition w = whitney_decompose(d, o.max_level);
    emit(o.out, {{"decomposition.json", decomposition_to_json(w)}, {"decomposition.svg", decomposition_svg(w)}});
    std::string line;
    for (const auto& [n, sq] : w.levels) {
        if (sq.empty()) continue;
        if (!line.empty()) line += ", ";
        line += "level " + std::to_string(n) + ": " + std::to_string(sq.size());
    }
    std::cout << line << "\n" << "total: " << w.size() << "\n";
    return kOk;
}

int cmd_approx(const Options& o) {
    std::shared_ptr<const Domain> d;
    FieldPtr u;
    std::vector<int> ns;
    try {
        common_checks(o);
        require(o.k >= 1 && o.k <= kMaxOrder, "--k must lie in [1," + std::to_string(kMaxOrder) + "]");
        require(o.p >= 1 && std::isfinite(o.p), "--p must be finite and at least 1");
        require(o.delim.size() == 1, "--delim must be a single character");
        ns = levels(o);
        require(ns.back() + o.s <= kMaxLevel, "n + s must not exceed " + std::to_string(kMaxLevel));
        u = builtin_field(o.field, parse_field_params(o.field_params));
        require(o.k <= u->k_max(), o.field + " has derivatives only up to order " + std::to_string(u->k_max()));
        d = domain_of(o);
    } catch (const Error& e) {
        throw Usage(e.what());
    }
    ApproxConfig cfg;
    cfg.collar = collar_config(o);
    cfg.s = o.s;
    cfg.radius_shift = o.mollifier_shift;
    std::vector<std::pair<std::string, std::string>> files;
    ErrorReport rep = convergence_study(u, d, o.k, o.p, ns, cfg, [&](const Approximant& a) {
        if (a.n != ns.back()) return;
        const int64_t stride = std::max<int64_t>(1, a.raster->dims() / 256);
        files.push_back({"core_collar.json", core_collar_to_json(a.core, a.collar, *a.raster)});
        files.push_back({"core_collar.svg", core_collar_svg(a.core, a.collar, *a.raster)});
        files.push_back({"u_eps.txt", approximant_dump(a, 0, 0, stride)});
        files.push_back({"kernel.txt", kernel_dump(a.pou->kernel())});
    });
    rep.with_runtime = o.runtime;
    files.push_back({"error_report.csv", rep.to_table(o.delim[0])});
    files.push_back({"error_report.json", rep.to_json()});
    emit(o.out, files);
    for (const ErrorRow& r : rep.rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "n=%d E=%.6e tail=%.6e regions=%zu", r.n, r.E, r.tail, r.regions);
        std::cout << buf << "\n";
    }
    return kOk;
}

int cmd_verify(const Options& o) {
    std::shared_ptr<const Decomposition> w;
    std::shared_ptr<const Domain> dom;
    int n = 0;
    try {
        common_checks(o);
        require(o.M > 4 * std::sqrt(2.0) + 2, "--M must exceed 4*sqrt(2)+2 for the separation check");
        require(o.pairs >= 1, "--pairs must be at least 1");
        require(o.n_list.empty(), "verify takes a single --n");
        n = levels(o).front();
        require(n + o.s <= kMaxLevel, "n + s must not exceed " + std::to_string(kMaxLevel));
        if (!o.decomposition.empty()) {
            require(o.domain.empty(), "give --domain or --decomposition, not both");
            w = std::make_shared<const Decomposition>(load_decomposition(read_file(o.decomposition, "decomposition file")));
            require(w->max_level >= n + 1, "the decomposition must reach level n+1 = " + std::to_string(n + 1));
        } else {
            dom = domain_of(o);
        }
    } catch (const Error& e) {
        throw Usage(e.what());
    }
    if (!w) w = std::make_shared<const Decomposition>(whitney_decompose(dom, n + 1));
    const Domain& d = *w->domain;
    const CollarConfig cfg = collar_config(o);
    Report all;
    all.title = "verify";
    auto add = [&](const Report& r, const std::string& title) {
        Report t = r;
        t.title = title;
        all.merge(t);
    };
    add(check_whitney_properties(*w), "whitney");
    const CoreRegion c = core_region(w, n);
    add(verify_core(c, *w), "core");
    add(verify_connecting_curves(c, d), "curves");
    Raster r(w->domain, c, o.s);
    const Collar col = partition_collar(c, d, cfg, r);
    add(verify_collar(c, col, r, cfg), "collar");
    add(verify_overlap(raster_adjacency(r, col.regions.size()), col.regions), "overlap");
    SeparationOptions so;
    so.pairs = o.pairs;
    so.seed = o.seed;
    if (n + so.oversample <= 13) {
        add(verify_separation(c, d, cfg, so).report, "separation");
    } else {
        Report skip;
        skip.add("escape", true, "skipped: level too fine for the dense path raster");
        add(skip, "separation");
    }
    const double radius = std::ldexp(1.0, -(n + o.mollifier_shift));
    add(verify_halo(halo(c, *w, radius), cfg), "halo");
    const PartitionOfUnity pou(c, col, r, 2, o.mollifier_shift);
    add(check_pou(pou, c, col, nullptr, o.psi0_reach), "pou");

    std::vector<std::pair<std::string, std::string>> files = {{"verify.json", all.to_json()}};
    emit(o.out, files);
    size_t failed = 0;
    for (const Check& k : all.checks) {
        std::cout << (k.pass ? "PASS " : "FAIL ") << k.name << "\n";
        if (!k.pass) {
            ++failed;
            for (const auto& wit : k.witnesses) std::cout << "  witness: " << wit << "\n";
        }
    }
    std::cout << (failed ? "FAILED " : "OK ") << all.checks.size() - failed << "/" << all.checks.size() << " checks passed\n";
    return failed ? kCheckFailed : kOk;
}

void add_collar_flags(CLI::App* c, Options& o) {
    c->add_option("--M", o.M, "separation multiple M")->capture_default_str();
    c->add_option("--C", o.C, "collar arc length C in cycle edges")->capture_default_str();
    c->add_option("--delta-shift", o.delta_shift, "dilation delta = 2^-(n+shift)")->capture_default_str();
    c->add_option("--mollifier-shift", o.mollifier_shift, "mollifier radius 2^-(n+shift)")->capture_default_str();
    c->add_option("--psi0-reach", o.psi0_reach, "psi_0 support within reach*2^-n of the core")->capture_default_str();
    c->add_option("--s", o.s, "raster spacing 2^-(n+s)")->capture_default_str();
    c->add_option("--seed", o.seed, "seed for sampled diagnostics")->capture_default_str();
    c->add_option("--threads", o.threads, "worker cap (runs single threaded)")->capture_default_str();
    c->add_option("--n", o.n, "level n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Whitney core/collar construction and smooth approximation in homogeneous Sobolev spaces"};
    app.require_subcommand(1);
    Options o;

    auto* dec = app.add_subcommand("decompose", "Whitney decomposition of a domain");
    dec->add_option("--domain", o.domain, "domain file")->required();
    dec->add_option("--max-level", o.max_level, "deepest level")->capture_default_str();
    dec->add_option("--threads", o.threads, "worker cap (runs single threaded)")->capture_default_str();
    dec->add_option("--out", o.out, "output directory")->capture_default_str();

    auto* apx = app.add_subcommand("approx", "build u_eps and report the seminorm error");
    apx->add_option("--domain", o.domain, "domain file")->required();
    apx->add_option("--n-list", o.n_list, "comma separated increasing levels");
    apx->add_option("--k", o.k, "Sobolev order")->capture_default_str();
    apx->add_option("--p", o.p, "integrability exponent")->capture_default_str();
    apx->add_option("--field", o.field, "builtin field: " + [] {
        std::string s;
        for (const auto& f : builtin_field_names()) s += (s.empty() ? "" : ", ") + f;
        return s;
    }())->capture_default_str();
    apx->add_option("--field-params", o.field_params, "key=value,... (polynomial: monomial=coefficient)");
    apx->add_option("--delim", o.delim, "table delimiter")->capture_default_str();
    apx->add_flag("--runtime", o.runtime, "add a runtime column (breaks byte reproducibility)");
    apx->add_option("--out", o.out, "output directory")->capture_default_str();
    add_collar_flags(apx, o);

    auto* ver = app.add_subcommand("verify", "run every checker at level n");
    ver->add_option("--domain", o.domain, "domain file");
    ver->add_option("--decomposition", o.decomposition, "decomposition export to check instead of decomposing");
    ver->add_option("--pairs", o.pairs, "sampled far pairs for the separation check")->capture_default_str();
    ver->add_option("--out", o.out, "output directory")->capture_default_str();
    add_collar_flags(ver, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (dec->parsed()) return cmd_decompose(o);
        if (apx->parsed()) return cmd_approx(o);
        return cmd_verify(o);
    } catch (const Usage& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputErrors.count(e.kind()) ? kUsage : kPipeline;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPipeline;
    }
}
