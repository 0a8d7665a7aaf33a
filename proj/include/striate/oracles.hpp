#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "striate/field.hpp"

namespace striate {

// Radially symmetric vorticity omega(x) = g(|x|). Either piecewise polynomial (exact G)
// or tabulated (after mollification).
class RadialProfile {
public:
    static RadialProfile patch(double radius);
    static RadialProfile ring(double r0, double r1);
    // g(r) = sum_k coef[i][k] r^k on [breaks[i], breaks[i+1]), zero beyond the last break
    static RadialProfile piecewise(std::vector<double> breaks, std::vector<std::vector<double>> coef);

    // rho_eps * omega, tabulated in r
    RadialProfile mollified(double eps) const;

    double g(double r) const;
    double G(double r) const;  // integral of rho g(rho) over [0, r]
    double support() const { return support_; }
    const std::vector<double>& jumps() const { return jumps_; }
    bool tabulated() const { return !table_g_.empty(); }
    bool vanishes_near_zero() const;
    std::string describe() const { return desc_; }

private:
    std::vector<double> breaks_;
    std::vector<std::vector<double>> coef_;
    std::vector<double> jumps_;
    double support_ = 0;
    std::string desc_;
    // tabulated form
    double dr_ = 0;
    std::vector<double> table_g_, table_dg_, table_G_;  // cubic Hermite in r
    double hermite(std::size_t i, double r) const;
    double cell_moment(std::size_t i, double a, double b) const;
};

Vec2 radial_u(const RadialProfile& p, Vec2 x);
Mat2 radial_gradu(const RadialProfile& p, Vec2 x);
// A built from the family member chi(|x|) e_theta
Mat2 radial_A(const RadialProfile& p, const std::function<double(double)>& chi, Vec2 x);
// grad u - omega A with chi = 1 near x: the G(r)/r^4 symmetric part
Mat2 radial_corrected(const RadialProfile& p, Vec2 x);

// Stationary shear flow u = (C - int_c^{x2} W, 0) with a zero-mean W on [c, d].
class ShearProfile {
public:
    // piecewise-linear W through the samples, uniformly spaced on [c, d]; the mean is removed
    ShearProfile(double c, double d, std::vector<double> samples, double C = 0);
    static ShearProfile from_file(const std::string& path);
    // rough, seeded profile (independent value per sample)
    static ShearProfile rough(double c, double d, int samples, std::uint64_t seed);

    double W(double x2) const;
    double primitive(double x2) const;  // int_c^{x2} W
    double mean() const;                // residual mean after the zero-mean shift
    double c() const { return c_; }
    double d() const { return d_; }
    double C() const { return C_; }

private:
    double c_, d_, C_, dx_;
    std::vector<double> w_, prim_;
};

struct ShearFields {
    Vec2 u;
    Mat2 gradu;
    double omega;
    Mat2 A;
};
ShearFields shear_fields(const ShearProfile& p, Vec2 x);

// Cell averages of an indicator-like function by sub x sub supersampling.
ScalarField cell_average(const Grid2D& g, const std::function<double(Vec2)>& f, int sub = 8);

// Velocity of cell-averaged vorticity taken as piecewise constant (cell integrals of K in closed
// form), Richardson-extrapolated against the 2x2-coarsened field. Grid size must be even.
Vec2 reference_velocity(const ScalarField& omega_cells, Vec2 x);

// Sufficient family for the unit disk patch, both members divergence free with
// div(omega0 Y) = 0:
//   Y0 = (1 - exp(-r^2/0.05)) e_theta, tangent to every circle;
//   Z0 = grad^perp(-x2 (1 - chi(r))), chi = 1 for |r - 1| <= 1/4, 0 for |r - 1| >= 1/2,
// so Z0 = e1 away from the boundary annulus and vanishes on it.
Vec2 patch_family_Y0(Vec2 x);
Vec2 patch_family_Z0(Vec2 x);
std::vector<VectorField> patch_family(const Grid2D& g);

}  // namespace striate
