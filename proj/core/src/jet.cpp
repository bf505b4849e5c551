#include "sob/jet.hpp"

#include <algorithm>

namespace sob {

Jet Jet::variable(int order, double at, bool y) {
    Jet j(order, at);
    if (order >= 1) j.c[y ? jet_index(0, 1) : jet_index(1, 0)] = 1;
    return j;
}

bool Jet::is_zero() const {
    for (int k = 0; k < size(); ++k)
        if (c[k] != 0) return false;
    return true;
}

Jet& Jet::operator+=(const Jet& o) {
    order = std::min(order, o.order);
    for (int k = 0; k < size(); ++k) c[k] += o.c[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    order = std::min(order, o.order);
    for (int k = 0; k < size(); ++k) c[k] -= o.c[k];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (int k = 0; k < size(); ++k) c[k] *= s;
    return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(Jet a, double s) { return a *= s; }

Jet operator*(const Jet& a, const Jet& b) {
    Jet r(std::min(a.order, b.order));
    for (int m = 0; m <= r.order; ++m)
        for (int y = 0; y <= m; ++y) {
            double s = 0;
            for (int m1 = 0; m1 <= m; ++m1)
                for (int y1 = std::max(0, y - (m - m1)); y1 <= std::min(m1, y); ++y1)
                    s += a.c[jet_index(m1 - y1, y1)] * b.c[jet_index(m - m1 - (y - y1), y - y1)];
            r.c[jet_index(m - y, y)] = s;
        }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    // solve q*b = a degree by degree
    Jet q(std::min(a.order, b.order));
    const double b0 = b.c[0];
    for (int m = 0; m <= q.order; ++m)
        for (int y = 0; y <= m; ++y) {
            double s = a.c[jet_index(m - y, y)];
            for (int m1 = 0; m1 < m; ++m1)
                for (int y1 = std::max(0, y - (m - m1)); y1 <= std::min(m1, y); ++y1)
                    s -= q.c[jet_index(m1 - y1, y1)] * b.c[jet_index(m - m1 - (y - y1), y - y1)];
            q.c[jet_index(m - y, y)] = s / b0;
        }
    return q;
}

Jet exp(const Jet& a) {
    Jet g = a;
    g.c[0] = 0;
    Jet term(a.order, 1), sum(a.order, 1);
    for (int k = 1; k <= a.order; ++k) {
        term = term * g;
        term *= 1.0 / k;
        sum += term;
    }
    return sum * std::exp(a.c[0]);
}

}  // namespace sob
