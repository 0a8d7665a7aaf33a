#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "striate/geometry.hpp"

namespace striate {

// Fundamental solutions and Biot-Savart kernels. All throw DomainError at the origin.
double F2(Vec2 x);          // log|x| / 2pi
Vec2 gradF2(Vec2 x);        // x / (2pi |x|^2)
Mat2 hessF2(Vec2 x);
Vec2 K(Vec2 x);             // x^perp / (2pi |x|^2)
Mat2 gradK(Vec2 x);         // (i, j) = d_j K^i
double F3(Vec3 x);          // -1 / (4pi |x|)
Vec3 K3(Vec3 x);            // x / (4pi |x|^3)

// Radial bump a: 1 on [0,1], exp(1 - 1/(1 - (s-1)^2)) on (1,2), 0 beyond.
double bump(double s);
double bump_deriv(double s);

struct CutoffSpec {
    double r = 0.5;  // outer radius
    double h = 0.01; // inner radius
    void validate() const;
};

double a_r(double r, Vec2 x);
Vec2 grad_a_r(double r, Vec2 x);
double eval_mu_rh(const CutoffSpec& s, Vec2 x);
Vec2 grad_mu_rh(const CutoffSpec& s, Vec2 x);

// Standard mollifier on the plane: rho_eps(x) = eps^-2 rho(x/eps), rho = c exp(-1/(1-|x|^2)).
double mollifier_constant();
double eval_mollifier(double eps, Vec2 x);
Vec2 grad_mollifier(double eps, Vec2 x);
// fraction of the mollifier mass inside radius t*eps
double mollifier_mass(double t);
// K * rho_delta, exact: K(x) times the mass inside |x|
Vec2 K_blob(Vec2 x, double delta);

// A kernel evaluator with declared homogeneity. Scalar kernels use ncomp = 1.
struct KernelHandle {
    std::string name;
    int dim = 2;
    int ncomp = 1;
    double degree = 0;
    bool logarithmic = false;  // F2: value shifts by log(lambda)/2pi instead of scaling
    std::function<void(const double* x, double* out)> eval;
};

KernelHandle handle_F2();
KernelHandle handle_K();
KernelHandle handle_gradK();
KernelHandle handle_F3();
KernelHandle handle_K3();

// max relative deviation from the declared scaling over random x, lambda
double homogeneity_defect(const KernelHandle& k, std::uint64_t seed, int trials = 200);

// Two-point kernel L(x, y); scalar kernels put their value in the (0,0) entry.
using PairKernel = std::function<Mat2(Vec2 x, Vec2 y)>;

struct StarNormOptions {
    int budget = 20000;
    std::uint64_t seed = 1;
    Vec2 x_lo{-1, -1}, x_hi{1, 1};  // sampling box for x
    double r_min = 1e-3, r_max = 2;  // separation range |x - y|
    int strata = 32;
    // y-support box, used for the L^1 tail outside B_1(x)
    Vec2 y_lo{-1, -1}, y_hi{1, 1};
    int tail_points = 64;   // x samples for the tail sup
    int tail_grid = 200;    // quadrature resolution per axis over the y box
};

struct StarNorms {
    double star = 0;   // sup |x-y|^2 |L| + |x-y|^3 |grad_x L|
    double tail = 0;   // sup_x ||L(x, .)||_{L^1(B_1(x)^c)}
    double star2 = 0;  // star + tail
    bool bounded = true;
};

StarNorms kernel_star_norms(const PairKernel& L, const StarNormOptions& opt);

}  // namespace striate
