#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sob/jet.hpp"

namespace sob {

// Scalar test field with closed-form derivatives.
class ScalarField {
public:
    virtual ~ScalarField() = default;

    const std::string& name() const { return name_; }
    const std::map<std::string, double>& params() const { return params_; }
    int k_max() const { return k_max_; }
    const std::vector<std::array<double, 2>>& singular_set() const { return singular_; }

    // d^a_x d^b_y u at (x,y)
    double eval(double x, double y, int a = 0, int b = 0) const;
    // all derivatives up to the given order (at most kMaxOrder)
    Jet jet(double x, double y, int order) const;
    double dist_to_singular(double x, double y) const;

protected:
    ScalarField(std::string name, std::map<std::string, double> params, int k_max)
        : name_(std::move(name)), params_(std::move(params)), k_max_(k_max) {}
    virtual double raw(double x, double y, int a, int b) const = 0;
    virtual void raw_jet(double x, double y, Jet& out) const;

    std::string name_;
    std::map<std::string, double> params_;
    int k_max_;
    std::vector<std::array<double, 2>> singular_;

private:
    void check(double x, double y, int order) const;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

// Registry: "polynomial" (monomial keys such as "1", "x", "x^2*y", "x*y^3" mapped to coefficients),
// "trig_exp" sin(a x) e^(b y) (a=3, b=1), "log_distance" log|x-z0| (x0, y0),
// "power_distance" |x-z0|^sigma (x0, y0, sigma=0.5). Optional "k_max" caps the derivative order.
FieldPtr builtin_field(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_field_names();

// parse "key=value,key=value"
std::map<std::string, double> parse_field_params(const std::string& text);

}  // namespace sob
