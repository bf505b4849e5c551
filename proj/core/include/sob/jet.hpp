#pragma once

#include <array>
#include <cmath>

namespace sob {

constexpr int kMaxOrder = 4;
constexpr int kJetSize = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

// coefficients grouped by total degree, x-power descending within a degree
constexpr int jet_index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }

constexpr double factorial(int m) { return m <= 1 ? 1.0 : m * factorial(m - 1); }

// Truncated bivariate Taylor polynomial about a point: c[jet_index(a,b)] = d^a_x d^b_y f / (a! b!).
// Products and quotients of jets are the Leibniz and quotient rules.
struct Jet {
    int order = 0;
    std::array<double, kJetSize> c{};

    Jet() = default;
    explicit Jet(int order_, double value = 0) : order(order_) { c[0] = value; }
    static Jet variable(int order, double at, bool y);

    double value() const { return c[0]; }
    double derivative(int a, int b) const { return c[jet_index(a, b)] * factorial(a) * factorial(b); }
    void set_derivative(int a, int b, double v) { c[jet_index(a, b)] = v / (factorial(a) * factorial(b)); }
    int size() const { return (order + 1) * (order + 2) / 2; }
    bool is_zero() const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(Jet a, double s);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet exp(const Jet& a);

}  // namespace sob
