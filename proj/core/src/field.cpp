#include "sob/field.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <sstream>

#include "sob/geometry.hpp"

namespace sob {

namespace {

using cd = std::complex<double>;

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// s (s-1) ... (s-m+1)
double falling(double s, int m) {
    double r = 1;
    for (int i = 0; i < m; ++i) r *= s - i;
    return r;
}

cd ipow(int b) {
    static const cd t[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return t[b & 3];
}

class Polynomial final : public ScalarField {
public:
    Polynomial(std::map<std::string, double> p, int k_max) : ScalarField("polynomial", p, k_max) {
        for (const auto& [key, v] : p) {
            if (key == "k_max") continue;
            const auto [a, b] = parse_monomial(key);
            terms_.push_back({a, b, v});
        }
    }

private:
    struct Term {
        int a, b;
        double c;
    };
    std::vector<Term> terms_;

    static std::pair<int, int> parse_monomial(const std::string& key) {
        int a = 0, b = 0;
        size_t i = 0;
        auto power = [&]() {
            if (i < key.size() && key[i] == '^') {
                ++i;
                const size_t s = i;
                while (i < key.size() && std::isdigit(static_cast<unsigned char>(key[i]))) ++i;
                if (s == i) throw Error("InvalidArgument", "bad exponent in monomial '" + key + "'");
                return std::stoi(key.substr(s, i - s));
            }
            return 1;
        };
        if (key == "1") return {0, 0};
        while (i < key.size()) {
            const char ch = key[i++];
            if (ch == 'x')
                a += power();
            else if (ch == 'y')
                b += power();
            else if (ch != '*')
                throw Error("InvalidArgument", "bad monomial '" + key + "'");
        }
        return {a, b};
    }

    double raw(double x, double y, int da, int db) const override {
        double s = 0;
        for (const Term& t : terms_) {
            if (t.a < da || t.b < db) continue;
            const double cx = falling(t.a, da) * std::pow(x, t.a - da);
            const double cy = falling(t.b, db) * std::pow(y, t.b - db);
            s += t.c * cx * cy;
        }
        return s;
    }
};

class TrigExp final : public ScalarField {
public:
    TrigExp(std::map<std::string, double> p, int k_max)
        : ScalarField("trig_exp", p, k_max), A(param(p, "a", 3)), B(param(p, "b", 1)) {
        params_["a"] = A;
        params_["b"] = B;
    }

private:
    double A, B;

    static double dsin(int a, double s, double c) {
        switch (a & 3) {
            case 0: return s;
            case 1: return c;
            case 2: return -s;
            default: return -c;
        }
    }
    double raw(double x, double y, int a, int b) const override {
        return std::pow(A, a) * dsin(a, std::sin(A * x), std::cos(A * x)) * std::pow(B, b) * std::exp(B * y);
    }
    void raw_jet(double x, double y, Jet& out) const override {
        const double s = std::sin(A * x), c = std::cos(A * x), e = std::exp(B * y);
        for (int m = 0; m <= out.order; ++m)
            for (int b = 0; b <= m; ++b) {
                const int a = m - b;
                out.set_derivative(a, b, std::pow(A, a) * dsin(a, s, c) * std::pow(B, b) * e);
            }
    }
};

class LogDistance final : public ScalarField {
public:
    LogDistance(std::map<std::string, double> p, int k_max) : ScalarField("log_distance", p, k_max) {
        z0 = {param(p, "x0", 0.5), param(p, "y0", 0)};
        params_["x0"] = z0.real();
        params_["y0"] = z0.imag();
        singular_.push_back({z0.real(), z0.imag()});
    }

private:
    cd z0;
    // u = Re log(z - z0), so d_x^a d_y^b u = Re(i^b F^(a+b)) with F = log(z - z0)
    double raw(double x, double y, int a, int b) const override {
        const cd w = cd(x, y) - z0;
        const int m = a + b;
        if (m == 0) return std::log(std::abs(w));
        const double sign = (m - 1) % 2 ? -1.0 : 1.0;
        return (ipow(b) * sign * factorial(m - 1) / std::pow(w, m)).real();
    }
};

class PowerDistance final : public ScalarField {
public:
    PowerDistance(std::map<std::string, double> p, int k_max) : ScalarField("power_distance", p, k_max) {
        z0 = {param(p, "x0", 0.5), param(p, "y0", 0)};
        sigma = param(p, "sigma", 0.5);
        params_["x0"] = z0.real();
        params_["y0"] = z0.imag();
        params_["sigma"] = sigma;
        singular_.push_back({z0.real(), z0.imag()});
    }

private:
    cd z0;
    double sigma;
    // |w|^sigma = w^s conj(w)^s with s = sigma/2; d_x = D + Dbar, d_y = i(D - Dbar)
    double raw(double x, double y, int a, int b) const override {
        const cd w = cd(x, y) - z0;
        const double r = std::abs(w), th = std::arg(w), s = sigma / 2;
        cd total = 0;
        for (int j = 0; j <= a; ++j)
            for (int l = 0; l <= b; ++l) {
                const int p = j + l, q = (a - j) + (b - l);
                const double mag = falling(s, p) * falling(s, q) * std::pow(r, sigma - p - q);
                const double coef = binom(a, j) * binom(b, l) * ((b - l) % 2 ? -1.0 : 1.0);
                total += coef * mag * std::polar(1.0, th * (q - p));
            }
        return (ipow(b) * total).real();
    }
};

}  // namespace

void ScalarField::check(double x, double y, int order) const {
    if (order > k_max_)
        throw Error("DerivativeOrderUnavailable",
                    name_ + " provides derivatives up to order " + std::to_string(k_max_) + ", asked " + std::to_string(order));
    for (const auto& s : singular_)
        if (s[0] == x && s[1] == y) throw Error("SingularPoint", name_ + " is singular at (" + std::to_string(x) + "," + std::to_string(y) + ")");
}

double ScalarField::eval(double x, double y, int a, int b) const {
    if (a < 0 || b < 0) throw Error("InvalidArgument", "negative multi-index");
    check(x, y, a + b);
    return raw(x, y, a, b);
}

Jet ScalarField::jet(double x, double y, int order) const {
    if (order > kMaxOrder) throw Error("DerivativeOrderUnavailable", "jets stop at order " + std::to_string(kMaxOrder));
    check(x, y, order);
    Jet j(order);
    raw_jet(x, y, j);
    return j;
}

void ScalarField::raw_jet(double x, double y, Jet& out) const {
    for (int m = 0; m <= out.order; ++m)
        for (int b = 0; b <= m; ++b) out.set_derivative(m - b, b, raw(x, y, m - b, b));
}

double ScalarField::dist_to_singular(double x, double y) const {
    double d = INFINITY;
    for (const auto& s : singular_) d = std::min(d, std::hypot(x - s[0], y - s[1]));
    return d;
}

FieldPtr builtin_field(const std::string& name, const std::map<std::string, double>& params) {
    const int k_max = static_cast<int>(param(params, "k_max", 8));
    auto rest = params;
    rest.erase("k_max");
    if (name == "polynomial") return std::make_shared<Polynomial>(rest, k_max);
    if (name == "trig_exp") return std::make_shared<TrigExp>(rest, k_max);
    if (name == "log_distance") return std::make_shared<LogDistance>(rest, k_max);
    if (name == "power_distance") return std::make_shared<PowerDistance>(rest, k_max);
    throw Error("UnknownField", "no builtin field named '" + name + "'");
}

std::vector<std::string> builtin_field_names() { return {"polynomial", "trig_exp", "log_distance", "power_distance"}; }

std::map<std::string, double> parse_field_params(const std::string& text) {
    std::map<std::string, double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error("InvalidArgument", "field parameter '" + item + "' is not key=value");
        try {
            size_t used = 0;
            const std::string v = item.substr(eq + 1);
            out[item.substr(0, eq)] = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::logic_error&) {
            throw Error("InvalidArgument", "field parameter '" + item + "' has a non-numeric value");
        }
    }
    return out;
}

}  // namespace sob
