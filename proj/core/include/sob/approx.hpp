#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sob/core.hpp"
#include "sob/field.hpp"
#include "sob/pou.hpp"

namespace sob {

// Polynomial of degree <= k-1 in the scaled variables X = (x-cx)/l, Y = (y-cy)/l.
struct Poly2 {
    int k = 1;
    double cx = 0, cy = 0, l = 1;
    std::vector<double> c;  // c[jet_index(a,b)] multiplies X^a Y^b, a+b <= k-1

    Poly2() = default;
    Poly2(int k_, double cx_, double cy_, double l_);
    size_t size() const { return c.size(); }
    double coef(int a, int b) const { return a + b < k ? c[static_cast<size_t>(jet_index(a, b))] : 0.0; }
    double eval(double x, double y, int a = 0, int b = 0) const;
    Jet jet(double x, double y, int order) const;
};

// d^a_x d^b_y u at (x,y)
using FieldFn = std::function<double(double, double, int, int)>;
FieldFn poly_field(const Poly2& p);

// the degree <= k-1 polynomial with int_Q d^alpha (u - P) = 0 for |alpha| <= k-1
Poly2 poly_fit(const ScalarField& u, const Square& q, int k);
Poly2 poly_fit(const FieldFn& u, const Square& q, int k);

// tensor Gauss-Legendre mean of d^a_x d^b_y f over Q
double square_mean(const FieldFn& f, const Square& q, int a, int b);

// subcell mask over Q: 2^t x 2^t cells, row-major from the lower-left
struct SquareMask {
    int t = 0;
    std::vector<uint8_t> bits;
    size_t count() const;
    double fraction() const { return static_cast<double>(count()) / static_cast<double>(bits.size()); }
    SquareMask refined() const;
};
SquareMask mask_from(int t, const std::function<bool(double, double)>& keep);  // keep(X,Y) at subcell centres, X,Y in [0,1]

double lp_norm_on_mask(const Poly2& p, const SquareMask& m, const Square& q, double pw);

struct NormEquivalence {
    double ratio = 0;
    Report report;
};
// ratio ||P||_{L^p(E)} / ||P||_{L^p(F)} against an empirical bound
NormEquivalence check_norm_equivalence(const Poly2& p, const SquareMask& e, const SquareMask& f, const Square& q, double pw,
                                       double eta, double bound);
// largest ratio over a seeded ensemble of random degree <= k-1 polynomials
double norm_equivalence_constant(const SquareMask& e, const SquareMask& f, const Square& q, double pw, double eta, int k,
                                 size_t samples, uint64_t seed);

struct ChainingResult {
    double left = 0, right = 0, ratio = 0;
    Report report;
};
// ||d^alpha (P_Q1 - P_Qm)||_{L^p(Q1)} against l(Q1)^(k-|alpha|) ||grad^k u||_{L^p(union Q_i)}
ChainingResult check_chaining(const Chain& chain, const ScalarField& u, int k, double pw, int a, int b);

struct ApproxConfig {
    CollarConfig collar;
    int s = 7;             // raster spacing 2^-(n+s)
    int radius_shift = 5;  // mollifier radius 2^-(n+radius_shift)
};

class Approximant {
public:
    FieldPtr u;
    std::shared_ptr<const Decomposition> w;
    int n = 0, k = 1;
    ApproxConfig cfg;
    CoreRegion core;
    CoreRegion previous;  // D_{n-1}; empty when no core exists one level up
    std::unique_ptr<Raster> raster;
    Collar collar;
    std::unique_ptr<PartitionOfUnity> pou;
    std::vector<Poly2> polys;  // polys[i-1] belongs to collar region i

    bool in_previous(int64_t i, int64_t j) const;
    // jet of u_eps of order k at the centre of raster cell (i,j)
    Jet jet(int64_t i, int64_t j) const;
};

Approximant build_approximant(FieldPtr u, std::shared_ptr<const Decomposition> w, int n, int k, const ApproxConfig& cfg = {});
// d^a_x d^b_y u_eps at the centre of the raster cell holding (x,y)
double eval_approximant(const Approximant& a, double x, double y, int da, int db);

enum class Zone { all, previous_core, outside_previous_core };

struct SeminormResult {
    double value = 0;
    double power_sum = 0;
    size_t cells = 0;    // cells with a nonzero integrand evaluated
    size_t refined = 0;  // cells integrated on 4x4 subcells near the singular set
};
// midpoint rule of sum_{|alpha|=k} |d^alpha (u - u_eps)|^p over inside cells, root 1/p
SeminormResult seminorm_error(const Approximant& a, int k, double pw, Zone zone = Zone::all,
                              const std::function<bool(int64_t, int64_t)>& mask = {});
// ||grad^k u||_{L^p(Omega \ D_{n-1})} on the same raster
SeminormResult tail_norm(const Approximant& a, int k, double pw);
// throws NonIntegrable when refinement around a singular point does not settle
void check_integrable(const ScalarField& u, const Domain& d, double h, int k, double pw);

struct ErrorRow {
    int n = 0, k = 0;
    double p = 0, E = 0, core_error = 0, collar_error = 0, tail = 0;
    size_t regions = 0, cells = 0;
    double runtime = 0;
};

struct ErrorReport {
    std::string field, domain;
    std::map<std::string, double> params;
    int s = 7, radius_shift = 5;
    double M = 8;
    int64_t C = 0;
    bool with_runtime = false;
    std::vector<ErrorRow> rows;

    std::string to_table(char delim = ',') const;
    std::string to_json() const;
};

ErrorRow error_row(const Approximant& a, double pw);
// visit sees each approximant after its row is computed
ErrorReport convergence_study(FieldPtr u, std::shared_ptr<const Domain> d, int k, double pw, const std::vector<int>& n_list,
                              const ApproxConfig& cfg = {}, const std::function<void(const Approximant&)>& visit = {});

}  // namespace sob
