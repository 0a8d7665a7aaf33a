#include "striate/kernels.hpp"

#include <limits>
#include <random>
#include <vector>

namespace striate {

namespace {

constexpr double kTwoPi = 2 * kPi;

void check_nonzero(double r2, const char* what) {
    if (!(r2 > 0)) throw DomainError(std::string(what) + ": evaluated at the origin");
}

// cumulative mass of exp(-1/(1-s)) in s = t^2, on a uniform s grid
struct MassTable {
    static constexpr int kN = 8192;
    std::vector<double> cum;
    double total = 0;
    MassTable() : cum(kN + 1, 0.0) {
        auto f = [](double s) { return s >= 1 ? 0.0 : std::exp(-1 / (1 - s)); };
        double ds = 1.0 / kN;
        for (int k = 0; k < kN; ++k) {
            double s0 = k * ds;
            // Simpson on each cell
            cum[k + 1] = cum[k] + ds / 6 * (f(s0) + 4 * f(s0 + ds / 2) + f(s0 + ds));
        }
        total = cum[kN];
        for (double& c : cum) c /= total;
    }
    double at(double s) const {
        if (s >= 1) return 1;
        if (s <= 0) return 0;
        double u = s * kN;
        int k = int(u);
        double t = u - k;
        return cum[k] + t * (cum[k + 1] - cum[k]);
    }
};

const MassTable& mass_table() {
    static const MassTable t;
    return t;
}

}  // namespace

double F2(Vec2 x) {
    double r2 = norm2(x);
    check_nonzero(r2, "F2");
    return std::log(r2) / (2 * kTwoPi);
}

Vec2 gradF2(Vec2 x) {
    double r2 = norm2(x);
    check_nonzero(r2, "gradF2");
    return x / (kTwoPi * r2);
}

Mat2 hessF2(Vec2 x) {
    double r2 = norm2(x);
    check_nonzero(r2, "hessF2");
    double c = 1 / (kTwoPi * r2 * r2);
    return {c * (x.y * x.y - x.x * x.x), -2 * c * x.x * x.y,
            -2 * c * x.x * x.y, c * (x.x * x.x - x.y * x.y)};
}

Vec2 K(Vec2 x) {
    double r2 = norm2(x);
    check_nonzero(r2, "K");
    return perp(x) / (kTwoPi * r2);
}

Mat2 gradK(Vec2 x) {
    double r2 = norm2(x);
    check_nonzero(r2, "gradK");
    double c = 1 / (kTwoPi * r2 * r2);
    double off = c * (x.y * x.y - x.x * x.x);
    double dg = 2 * c * x.x * x.y;
    return {dg, off, off, -dg};
}

double F3(Vec3 x) {
    double r = norm(x);
    check_nonzero(r, "F3");
    return -1 / (4 * kPi * r);
}

Vec3 K3(Vec3 x) {
    double r = norm(x);
    check_nonzero(r, "K3");
    return (1 / (4 * kPi * r * r * r)) * x;
}

double bump(double s) {
    if (s <= 1) return 1;
    if (s >= 2) return 0;
    double t = s - 1;
    return std::exp(1 - 1 / (1 - t * t));
}

double bump_deriv(double s) {
    if (s <= 1 || s >= 2) return 0;
    double t = s - 1;
    double q = 1 - t * t;
    return bump(s) * (-2 * t / (q * q));
}

void CutoffSpec::validate() const {
    if (!(h > 0) || !(2 * h < r)) throw ConfigError("cutoff: need 0 < 2h < r");
}

double a_r(double r, Vec2 x) { return bump(norm(x) / r); }

Vec2 grad_a_r(double r, Vec2 x) {
    double n = norm(x);
    if (n == 0) return {};
    return (bump_deriv(n / r) / (r * n)) * x;
}

double eval_mu_rh(const CutoffSpec& s, Vec2 x) {
    s.validate();
    return a_r(s.r, x) * (1 - a_r(s.h, x));
}

Vec2 grad_mu_rh(const CutoffSpec& s, Vec2 x) {
    s.validate();
    return (1 - a_r(s.h, x)) * grad_a_r(s.r, x) - a_r(s.r, x) * grad_a_r(s.h, x);
}

double mollifier_constant() {
    // rho integrates to c * pi * (total of exp(-1/(1-s)) ds over [0,1])
    return 1 / (kPi * mass_table().total);
}

double eval_mollifier(double eps, Vec2 x) {
    if (!(eps > 0)) throw ConfigError("mollifier: eps must be positive");
    double s = norm2(x) / (eps * eps);
    if (s >= 1) return 0;
    return mollifier_constant() * std::exp(-1 / (1 - s)) / (eps * eps);
}

Vec2 grad_mollifier(double eps, Vec2 x) {
    double s = norm2(x) / (eps * eps);
    if (s >= 1) return {};
    double q = 1 - s;
    // d/dx exp(-1/(1-s)) = exp(..) * (-1/q^2) * 2x/eps^2
    return (eval_mollifier(eps, x) * (-2 / (q * q * eps * eps))) * x;
}

double mollifier_mass(double t) { return mass_table().at(t * t); }

Vec2 K_blob(Vec2 x, double delta) {
    double r2 = norm2(x);
    if (r2 == 0) return {};
    double m = mass_table().at(r2 / (delta * delta));
    return (m / (kTwoPi * r2)) * perp(x);
}

KernelHandle handle_F2() {
    return {"F2", 2, 1, 0, true, [](const double* x, double* o) { o[0] = F2({x[0], x[1]}); }};
}
KernelHandle handle_K() {
    return {"K", 2, 2, -1, false, [](const double* x, double* o) {
                Vec2 k = K({x[0], x[1]});
                o[0] = k.x; o[1] = k.y;
            }};
}
KernelHandle handle_gradK() {
    return {"gradK", 2, 4, -2, false, [](const double* x, double* o) {
                Mat2 m = gradK({x[0], x[1]});
                o[0] = m.a; o[1] = m.b; o[2] = m.c; o[3] = m.d;
            }};
}
KernelHandle handle_F3() {
    return {"F3", 3, 1, -1, false, [](const double* x, double* o) { o[0] = F3({x[0], x[1], x[2]}); }};
}
KernelHandle handle_K3() {
    return {"K3", 3, 3, -2, false, [](const double* x, double* o) {
                Vec3 k = K3({x[0], x[1], x[2]});
                o[0] = k.x; o[1] = k.y; o[2] = k.z;
            }};
}

double homogeneity_defect(const KernelHandle& k, std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1), lam(0.1, 10);
    double worst = 0;
    double x[3], lx[3], a[9], b[9];
    for (int t = 0; t < trials; ++t) {
        double l = lam(rng);
        for (int i = 0; i < k.dim; ++i) { x[i] = u(rng); lx[i] = l * x[i]; }
        k.eval(x, a);
        k.eval(lx, b);
        double scale = 0;
        for (int c = 0; c < k.ncomp; ++c) scale = std::max(scale, std::abs(a[c]));
        for (int c = 0; c < k.ncomp; ++c) {
            double expect = k.logarithmic ? a[c] + std::log(l) / kTwoPi : a[c] * std::pow(l, k.degree);
            double ref = k.logarithmic ? std::max(1.0, std::abs(expect)) : scale * std::pow(l, k.degree);
            worst = std::max(worst, std::abs(b[c] - expect) / ref);
        }
    }
    return worst;
}

StarNorms kernel_star_norms(const PairKernel& L, const StarNormOptions& opt) {
    StarNorms out;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u01(0, 1);
    const double lr0 = std::log(opt.r_min), lr1 = std::log(opt.r_max);
    const int per = std::max(1, opt.budget / opt.strata);
    auto rand_x = [&] {
        return Vec2{opt.x_lo.x + (opt.x_hi.x - opt.x_lo.x) * u01(rng),
                    opt.x_lo.y + (opt.x_hi.y - opt.x_lo.y) * u01(rng)};
    };
    auto grad_norm = [&](Vec2 x, Vec2 y, double r) {
        double d = 1e-4 * r;
        Mat2 px = (1 / (2 * d)) * (L(x + Vec2{d, 0}, y) - L(x - Vec2{d, 0}, y));
        Mat2 py = (1 / (2 * d)) * (L(x + Vec2{0, d}, y) - L(x - Vec2{0, d}, y));
        double s = 0;
        for (const Mat2& m : {px, py}) s += m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
        return std::sqrt(s);
    };
    for (int s = 0; s < opt.strata; ++s) {
        for (int k = 0; k < per; ++k) {
            double lr = lr0 + (lr1 - lr0) * (s + u01(rng)) / opt.strata;
            double r = std::exp(lr), th = 2 * kPi * u01(rng);
            Vec2 x = rand_x();
            Vec2 y = x + Vec2{r * std::cos(th), r * std::sin(th)};
            Mat2 v = L(x, y);
            double g = grad_norm(x, y, r);
            double q = r * r * opnorm(v) + r * r * r * g;
            if (!std::isfinite(q)) {
                out.bounded = false;
                out.star = out.star2 = std::numeric_limits<double>::infinity();
                return out;
            }
            out.star = std::max(out.star, q);
        }
    }
    // L^1 tail outside the unit ball around x
    const int m = opt.tail_grid;
    const double dx = (opt.y_hi.x - opt.y_lo.x) / m, dy = (opt.y_hi.y - opt.y_lo.y) / m;
    for (int t = 0; t < opt.tail_points; ++t) {
        Vec2 x = rand_x();
        double acc = 0;
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                Vec2 y{opt.y_lo.x + (i + 0.5) * dx, opt.y_lo.y + (j + 0.5) * dy};
                if (norm2(y - x) <= 1) continue;
                acc += opnorm(L(x, y));
            }
        acc *= dx * dy;
        if (!std::isfinite(acc)) {
            out.bounded = false;
            out.star2 = std::numeric_limits<double>::infinity();
            return out;
        }
        out.tail = std::max(out.tail, acc);
    }
    out.star2 = out.star + out.tail;
    return out;
}

}  // namespace striate
