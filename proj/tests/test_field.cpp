#include <gtest/gtest.h>

#include <cmath>

#include "sob/field.hpp"
#include "sob/geometry.hpp"

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

// central difference of the (a,b) derivative in direction x or y
double fd(const ScalarField& u, double x, double y, int a, int b, bool in_y, double step = 1e-5) {
    const double dx = in_y ? 0 : step, dy = in_y ? step : 0;
    return (u.eval(x + dx, y + dy, a, b) - u.eval(x - dx, y - dy, a, b)) / (2 * step);
}

}  // namespace

TEST(Jet, ProductIsLeibniz) {
    const Jet x = Jet::variable(4, 0.5, false), y = Jet::variable(4, -1.0, true);
    const Jet p = x * x * y;  // x^2 y
    EXPECT_DOUBLE_EQ(p.value(), -0.25);
    EXPECT_DOUBLE_EQ(p.derivative(1, 0), -1.0);
    EXPECT_DOUBLE_EQ(p.derivative(0, 1), 0.25);
    EXPECT_DOUBLE_EQ(p.derivative(2, 1), 2.0);
    EXPECT_DOUBLE_EQ(p.derivative(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(p.derivative(3, 0), 0.0);
    const Jet s = (x + y) * (x + y) * (x + y);
    EXPECT_DOUBLE_EQ(s.derivative(2, 1), 6.0);
    EXPECT_DOUBLE_EQ(s.derivative(1, 1), 6 * (0.5 - 1.0));
}

TEST(Jet, QuotientAndExp) {
    const Jet x = Jet::variable(4, 0.0, false);
    const Jet q = Jet(4, 1) / (Jet(4, 1) + x);
    for (int k = 0; k <= 4; ++k) EXPECT_NEAR(q.derivative(k, 0), (k % 2 ? -1 : 1) * factorial(k), 1e-12);
    const Jet e = exp(Jet::variable(4, 0.3, false) + Jet::variable(4, 0.2, true) * 2.0);
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b) EXPECT_NEAR(e.derivative(a, b), std::pow(2.0, b) * std::exp(0.7), 1e-12);
    const Jet r = q * (Jet(4, 1) + x);
    EXPECT_NEAR(r.value(), 1, 1e-15);
    for (int k = 1; k <= 4; ++k) EXPECT_NEAR(r.derivative(k, 0), 0, 1e-12);
}

TEST(Jet, OrderTruncatesToTheLower) {
    const Jet a = Jet::variable(2, 1.0, false), b = Jet::variable(4, 1.0, true);
    EXPECT_EQ((a * b).order, 2);
    EXPECT_EQ((a / b).order, 2);
    Jet c = b;
    c += a;
    EXPECT_EQ(c.order, 2);
}

TEST(Field, PolynomialExample) {
    const auto u = builtin_field("polynomial", {{"x^2*y", 1}});
    EXPECT_DOUBLE_EQ(u->eval(1, 2, 1, 1), 2.0);
    EXPECT_DOUBLE_EQ(u->eval(1, 2), 2.0);
    EXPECT_DOUBLE_EQ(u->eval(1, 2, 2, 1), 2.0);
    EXPECT_DOUBLE_EQ(u->eval(1, 2, 3, 0), 0.0);
    const auto v = builtin_field("polynomial", {{"1", 2}, {"x", -1}, {"x*y^3", 0.5}});
    EXPECT_DOUBLE_EQ(v->eval(2, 1), 2 - 2 + 1);
    EXPECT_DOUBLE_EQ(v->eval(2, 1, 1, 2), 3.0);
}

TEST(Field, TrigExpExample) {
    const auto u = builtin_field("trig_exp");
    EXPECT_DOUBLE_EQ(u->eval(0, 0, 2, 0), 0.0);
    EXPECT_DOUBLE_EQ(u->eval(0, 0, 1, 0), 3.0);
    EXPECT_NEAR(u->eval(0.2, 0.4, 1, 3), 3 * std::cos(0.6) * std::exp(0.4), 1e-14);
}

TEST(Field, SingularPointThrows) {
    const auto u = builtin_field("log_distance", {{"x0", 0.5}, {"y0", 0}});
    EXPECT_EQ(kind_of([&] { u->eval(0.5, 0); }), "SingularPoint");
    EXPECT_EQ(kind_of([&] { u->jet(0.5, 0, 2); }), "SingularPoint");
    EXPECT_NEAR(u->eval(0.5, 0.25), std::log(0.25), 1e-15);
    EXPECT_NEAR(u->dist_to_singular(0.5, 0.25), 0.25, 1e-15);
}

TEST(Field, DerivativesMatchFiniteDifferences) {
    const char* names[] = {"trig_exp", "log_distance", "power_distance"};
    const double pts[][2] = {{0.31, 0.27}, {0.7, 0.45}, {0.12, 0.9}};
    for (const char* name : names) {
        const auto u = builtin_field(name);
        for (const auto& p : pts)
            for (int m = 0; m <= 3; ++m)
                for (int b = 0; b <= m; ++b) {
                    const int a = m - b;
                    const double dx = u->eval(p[0], p[1], a + 1, b), dy = u->eval(p[0], p[1], a, b + 1);
                    EXPECT_NEAR(fd(*u, p[0], p[1], a, b, false), dx, 1e-5 * (1 + std::abs(dx))) << name << " " << a << "," << b;
                    EXPECT_NEAR(fd(*u, p[0], p[1], a, b, true), dy, 1e-5 * (1 + std::abs(dy))) << name << " " << a << "," << b;
                }
    }
}

TEST(Field, PowerDistanceClosedForm) {
    const auto u = builtin_field("power_distance", {{"x0", 0}, {"y0", 0}, {"sigma", 1.5}});
    const double x = 0.3, y = 0.4, r = 0.5;
    EXPECT_NEAR(u->eval(x, y), std::pow(r, 1.5), 1e-15);
    EXPECT_NEAR(u->eval(x, y, 1, 0), 1.5 * std::pow(r, -0.5) * x, 1e-14);
    // Laplacian of r^s is s^2 r^(s-2)
    EXPECT_NEAR(u->eval(x, y, 2, 0) + u->eval(x, y, 0, 2), 2.25 * std::pow(r, -0.5), 1e-13);
}

TEST(Field, JetAgreesWithEval) {
    for (const auto& name : builtin_field_names()) {
        const auto u = name == "polynomial" ? builtin_field(name, {{"x^3*y", 2}, {"y^2", 1}}) : builtin_field(name);
        const Jet j = u->jet(0.37, 0.61, 4);
        for (int m = 0; m <= 4; ++m)
            for (int b = 0; b <= m; ++b)
                EXPECT_NEAR(j.derivative(m - b, b), u->eval(0.37, 0.61, m - b, b), 1e-12 * (1 + std::abs(j.derivative(m - b, b))))
                    << name;
    }
}

TEST(Field, OrderLimitsAndRegistry) {
    const auto u = builtin_field("trig_exp", {{"k_max", 2}});
    EXPECT_EQ(u->k_max(), 2);
    EXPECT_EQ(kind_of([&] { u->eval(0, 0, 2, 1); }), "DerivativeOrderUnavailable");
    EXPECT_EQ(kind_of([&] { builtin_field("trig_exp")->jet(0, 0, 5); }), "DerivativeOrderUnavailable");
    EXPECT_EQ(kind_of([&] { builtin_field("bessel"); }), "UnknownField");
    EXPECT_EQ(kind_of([&] { builtin_field("polynomial", {{"x^y", 1}}); }), "InvalidArgument");
    const auto p = parse_field_params("x0=0.25,y0=1,sigma=0.75");
    EXPECT_EQ(p.size(), 3u);
    EXPECT_DOUBLE_EQ(p.at("x0"), 0.25);
    EXPECT_EQ(kind_of([&] { parse_field_params("x0"); }), "InvalidArgument");
    EXPECT_EQ(kind_of([&] { parse_field_params("x0=abc"); }), "InvalidArgument");
}
