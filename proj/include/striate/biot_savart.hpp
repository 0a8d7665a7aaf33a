#pragma once

#include <functional>
#include <vector>

#include "striate/field.hpp"
#include "striate/kernels.hpp"

namespace striate {

// Grid vorticity with its norms. Values are cell values; the support must sit inside the box.
struct VorticityField {
    ScalarField omega;
    double l1 = 0, l2 = 0, linf = 0;

    VorticityField() = default;
    explicit VorticityField(ScalarField w);
    double spacing() const { return omega.grid.h; }
};

// u = K * omega by midpoint quadrature. The 3x3 cells around each target are integrated with
// an 8x8 sub-rule (omega constant per cell), so the singular cell of a lattice target cancels.
std::vector<Vec2> velocity(const VorticityField& w, const std::vector<Vec2>& targets);
VectorField velocity_grid(const VorticityField& w);

struct GradVelocityField {
    std::vector<Mat2> grad;
    std::vector<double> antisym;  // omega(x)/2, coefficient of [[0,-1],[1,0]]
    std::vector<Mat2> sym;        // PV integral of grad K against omega
};

// grad u = omega(x)/2 J + PV int grad K(x - y) omega(y) dy. The PV part is
//   int_{B_R} grad K (omega(y) - omega(x)) + int_{B_R^c} grad K omega(y),
// which on lattice targets is the plain sum without the self cell (the lattice sum of grad K
// over B_R vanishes by symmetry). Off-lattice targets subtract omega(x) times the discrete
// B_R sum and drop sources closer than half a cell. R = 0 selects half the support radius.
GradVelocityField grad_velocity(const VorticityField& w, const std::vector<Vec2>& targets, double R = 0);
MatrixField grad_velocity_grid(const VorticityField& w);

// Y(x) . grad u(x) = PV int grad K(x-y)[Y(x) - Y(y)] omega(y) dy + [K * div(omega Y)](x).
// Y is sampled on the vorticity grid; div(omega Y) defaults to finite differences.
struct DirectionalTerms {
    Vec2 pv;
    Vec2 kdiv;
    Vec2 total() const { return pv + kdiv; }
};
DirectionalTerms directional_grad_u(const VorticityField& w, const VectorField& Y, const ScalarField* div_wY,
                                    Vec2 x);

// the same at every grid point
VectorField directional_grad_u_grid(const VorticityField& w, const VectorField& Y, const ScalarField* div_wY);

// |Y^perp . grad u - (PV int grad K [Y^perp(x) - Y^perp(y)] omega + (K * div(omega Y))^perp - omega Y)|
double perp_directional_identity(const VorticityField& w, const VectorField& Y, const ScalarField* div_wY,
                                 Vec2 x);

// |K * div Z - Z^perp + (K * curl Z)^perp| at every grid point (finite-difference div and curl)
ScalarField k_curl_div_identity(const VectorField& Z);

struct PvSplit {
    Mat2 near;       // grad(mu_rh K) * omega
    Mat2 far;        // PV int grad((1 - a_r) K) omega
    double tr_near;  // (grad mu_rh . grad F2) * omega, the trace of grad[mu_rh grad F2] * omega
};
// cutoff.h = 0 selects twice the grid spacing. Throws ConfigError when r < 4 spacings.
PvSplit pv_split(const VorticityField& w, Vec2 x, const CutoffSpec& cutoff);

// PV sum_y Omega(y) grad K(x - y) (f(y) - f(x)) s^2 at every grid point
MatrixField singular_transform_gradK(const ScalarField& Omega, const ScalarField& f);
// sum_y rho_eps(x - y) Omega(y) (f(y) - f(x)) s^2 at every grid point
ScalarField singular_transform_mollifier(const ScalarField& Omega, const ScalarField& f, double eps);

// Polar quadrature about x of
//   int grad[mu_rh grad F2](x - y) (f(x) - f(y)) g(y) dy   (matrix)
//   int (mu_rh grad F2)(x - y) f(y) dy                       (vector)
// with Gauss-Legendre nodes in log(rho) on [h, 2h], [2h, r], [r, 2r].
using ScalarFn = std::function<double(Vec2)>;
Mat2 intcal_first(const ScalarFn& f, const ScalarFn& g, Vec2 x, const CutoffSpec& c, int nrad = 48, int nang = 256);
Vec2 intcal_second(const ScalarFn& f, Vec2 x, const CutoffSpec& c, int nrad = 48, int nang = 256);

}  // namespace striate
