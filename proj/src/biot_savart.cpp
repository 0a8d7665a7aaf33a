#include "striate/biot_savart.hpp"

#include "striate/pairsum.hpp"

#include <algorithm>
#include <cmath>

namespace striate {

VorticityField::VorticityField(ScalarField w) : omega(std::move(w)) {
    const double a = omega.grid.h * omega.grid.h;
    double s1 = 0, s2 = 0;
    for (double v : omega.v) {
        if (!std::isfinite(v)) throw NumericalAbort("vorticity: non-finite sample");
        s1 += std::abs(v);
        s2 += v * v;
        linf = std::max(linf, std::abs(v));
    }
    l1 = s1 * a;
    l2 = std::sqrt(s2 * a);
}

namespace {

pairsum::Sources sources_of(const ScalarField& f, double scale) {
    pairsum::Sources s;
    const Grid2D& g = f.grid;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (f[k] == 0) continue;
        Vec2 p = g.point(k);
        s.push(p.x, p.y, f[k] * scale);
    }
    return s;
}

bool on_lattice(const Grid2D& g, Vec2 x, int& i, int& j) {
    double fi = g.frac(x.x), fj = g.frac(x.y);
    double ri = std::round(fi), rj = std::round(fj);
    i = int(ri);
    j = int(rj);
    return std::abs(fi - ri) < 1e-9 && std::abs(fj - rj) < 1e-9;
}

double value_at(const ScalarField& f, Vec2 x) {
    int i, j;
    if (on_lattice(f.grid, x, i, j)) {
        if (i < 0 || j < 0 || i >= f.grid.n || j >= f.grid.n) return 0;
        return f(i, j);
    }
    return interp_cubic(f, x);
}

Vec2 value_at(const VectorField& f, Vec2 x) {
    int i, j;
    if (on_lattice(f.grid, x, i, j)) {
        if (i < 0 || j < 0 || i >= f.grid.n || j >= f.grid.n) return {};
        return f(i, j);
    }
    return interp_cubic(f, x);
}

// sum of w (x - y)/|x - y|^2 over the nonzero cells, near 3x3 block by an 8x8 sub-rule
std::vector<Vec2> radial_sum(const ScalarField& f, const std::vector<Vec2>& targets) {
    const Grid2D& g = f.grid;
    const double a = g.h * g.h;
    auto src = sources_of(f, a);
    const std::size_t nt = targets.size();
    std::vector<double> tx(nt), ty(nt), ox(nt, 0), oy(nt, 0);
    for (std::size_t t = 0; t < nt; ++t) {
        tx[t] = targets[t].x;
        ty[t] = targets[t].y;
    }
    const double skip = 1e-18 * a;
    if (src.size()) pairsum::radial(tx.data(), ty.data(), nt, src, skip, ox.data(), oy.data());
    std::vector<Vec2> out(nt);
    const int sub = 8;
    for (std::size_t t = 0; t < nt; ++t) {
        Vec2 x = targets[t];
        Vec2 acc{ox[t], oy[t]};
        int ci = int(std::round(g.frac(x.x))), cj = int(std::round(g.frac(x.y)));
        for (int j = cj - 1; j <= cj + 1; ++j)
            for (int i = ci - 1; i <= ci + 1; ++i) {
                if (i < 0 || j < 0 || i >= g.n || j >= g.n) continue;
                double w = f(i, j);
                if (w == 0) continue;
                Vec2 d = x - g.point(i, j);
                double r2 = norm2(d);
                if (r2 > skip) acc -= (w * a / r2) * d;
                Vec2 sacc{};
                for (int b = 0; b < sub; ++b)
                    for (int c = 0; c < sub; ++c) {
                        Vec2 e = d - Vec2{((c + 0.5) / sub - 0.5) * g.h, ((b + 0.5) / sub - 0.5) * g.h};
                        double q2 = norm2(e);
                        if (q2 > skip) sacc += e / q2;
                    }
                acc += (w * a / (sub * sub)) * sacc;
            }
        out[t] = acc;
    }
    return out;
}

// Lattice sum of grad K(x - y) s^2 over y with s/2 <= |x - y| < R (lattice extended past the grid)
Mat2 lattice_ball_sum(const Grid2D& g, Vec2 x, double R) {
    const double a = g.h * g.h;
    int i0 = int(std::floor(g.frac(x.x - R))), i1 = int(std::ceil(g.frac(x.x + R)));
    int j0 = int(std::floor(g.frac(x.y - R))), j1 = int(std::ceil(g.frac(x.y + R)));
    double p = 0, q = 0;
    const double lo = 0.25 * a, hi = R * R;
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
            Vec2 d = x - g.point(i, j);
            double r2 = norm2(d);
            if (r2 < lo || r2 >= hi) continue;
            double c = 1 / (r2 * r2);
            p += c * 2 * d.x * d.y;
            q += c * (d.y * d.y - d.x * d.x);
        }
    double s = a / (2 * kPi);
    return {s * p, s * q, s * q, -s * p};
}

double support_radius(const ScalarField& f) {
    const Grid2D& g = f.grid;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (f[k] == 0) continue;
        Vec2 p = g.point(k);
        x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    }
    if (x1 < x0) return 0;
    return 0.5 * std::hypot(x1 - x0 + g.h, y1 - y0 + g.h);
}

// (1/2pi) [[p, q], [q, -p]] summed against weights, pairs closer than s/2 dropped
std::vector<Mat2> hessian_sum(const ScalarField& f, const std::vector<Vec2>& targets) {
    const Grid2D& g = f.grid;
    auto src = sources_of(f, g.h * g.h / (2 * kPi));
    const std::size_t nt = targets.size();
    std::vector<Mat2> out(nt);
    if (!src.size()) return out;
    std::vector<double> tx(nt), ty(nt), p(nt), q(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        tx[t] = targets[t].x;
        ty[t] = targets[t].y;
    }
    pairsum::hessian_like(tx.data(), ty.data(), nt, src, 0.25 * g.h * g.h, p.data(), q.data());
    for (std::size_t t = 0; t < nt; ++t) out[t] = {p[t], q[t], q[t], -p[t]};
    return out;
}

std::vector<Vec2> grid_points(const Grid2D& g) {
    std::vector<Vec2> t(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) t[k] = g.point(k);
    return t;
}

ScalarField product_div(const VorticityField& w, const VectorField& Y) {
    VectorField wY(Y.grid);
    for (std::size_t k = 0; k < Y.size(); ++k) wY[k] = w.omega[k] * Y[k];
    return divergence(wY);
}

}  // namespace

std::vector<Vec2> velocity(const VorticityField& w, const std::vector<Vec2>& targets) {
    auto r = radial_sum(w.omega, targets);
    for (auto& v : r) v = perp(v) / (2 * kPi);
    return r;
}

VectorField velocity_grid(const VorticityField& w) {
    VectorField out(w.omega.grid);
    out.v = velocity(w, grid_points(w.omega.grid));
    return out;
}

GradVelocityField grad_velocity(const VorticityField& w, const std::vector<Vec2>& targets, double R) {
    const Grid2D& g = w.omega.grid;
    if (R == 0) R = std::max(0.5 * support_radius(w.omega), 2.5 * g.h);
    if (!(R > 2 * g.h)) throw ConfigError("grad_velocity: split radius must exceed two grid spacings");
    GradVelocityField out;
    out.sym = hessian_sum(w.omega, targets);
    out.grad.resize(targets.size());
    out.antisym.resize(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        int i, j;
        double wx = value_at(w.omega, targets[t]);
        if (!on_lattice(g, targets[t], i, j) && wx != 0) out.sym[t] = out.sym[t] - wx * lattice_ball_sum(g, targets[t], R);
        out.antisym[t] = 0.5 * wx;
        out.grad[t] = out.sym[t] + (0.5 * wx) * J2();
    }
    return out;
}

MatrixField grad_velocity_grid(const VorticityField& w) {
    MatrixField out(w.omega.grid);
    out.v = grad_velocity(w, grid_points(w.omega.grid)).grad;
    return out;
}

namespace {

// PV int grad K(x - y)[Y(x) - Y(y)] omega(y) dy for a single target
Vec2 pv_difference(const VorticityField& w, const VectorField& Y, Vec2 x) {
    const Grid2D& g = w.omega.grid;
    ScalarField w1(g), w2(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        w1[k] = w.omega[k] * Y[k].x;
        w2[k] = w.omega[k] * Y[k].y;
    }
    std::vector<Vec2> t{x};
    Mat2 m0 = hessian_sum(w.omega, t)[0], m1 = hessian_sum(w1, t)[0], m2 = hessian_sum(w2, t)[0];
    Vec2 first = m0 * value_at(Y, x);
    Vec2 second{m1.a + m2.b, m1.c + m2.d};
    return first - second;
}

}  // namespace

DirectionalTerms directional_grad_u(const VorticityField& w, const VectorField& Y, const ScalarField* div_wY, Vec2 x) {
    if (Y.grid.n != w.omega.grid.n || Y.grid.h != w.omega.grid.h || Y.grid.origin != w.omega.grid.origin)
        throw ConfigError("directional_grad_u: Y must share the vorticity grid");
    ScalarField d = div_wY ? *div_wY : product_div(w, Y);
    DirectionalTerms r;
    r.pv = pv_difference(w, Y, x);
    r.kdiv = velocity(VorticityField(d), {x})[0];
    return r;
}

VectorField directional_grad_u_grid(const VorticityField& w, const VectorField& Y, const ScalarField* div_wY) {
    const Grid2D& g = w.omega.grid;
    if (Y.grid.n != g.n || Y.grid.h != g.h || Y.grid.origin != g.origin)
        throw ConfigError("directional_grad_u: Y must share the vorticity grid");
    ScalarField d = div_wY ? *div_wY : product_div(w, Y);
    ScalarField w1(g), w2(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        w1[k] = w.omega[k] * Y[k].x;
        w2[k] = w.omega[k] * Y[k].y;
    }
    auto pts = grid_points(g);
    auto m0 = hessian_sum(w.omega, pts), m1 = hessian_sum(w1, pts), m2 = hessian_sum(w2, pts);
    auto kd = velocity(VorticityField(d), pts);
    VectorField out(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        out[k] = m0[k] * Y[k] - Vec2{m1[k].a + m2[k].b, m1[k].c + m2[k].d} + kd[k];
    return out;
}

double perp_directional_identity(const VorticityField& w, const VectorField& Y, const ScalarField* div_wY, Vec2 x) {
    if (Y.grid.n != w.omega.grid.n || Y.grid.h != w.omega.grid.h || Y.grid.origin != w.omega.grid.origin)
        throw ConfigError("perp_directional_identity: Y must share the vorticity grid");
    VectorField Yp(Y.grid);
    for (std::size_t k = 0; k < Y.size(); ++k) Yp[k] = perp(Y[k]);
    ScalarField d = div_wY ? *div_wY : product_div(w, Y);
    Vec2 lhs = grad_velocity(w, {x}).grad[0] * perp(value_at(Y, x));
    Vec2 kd = velocity(VorticityField(d), {x})[0];
    // K * div(omega Y^perp) = (omega Y^perp)^perp - (K * curl(omega Y^perp))^perp with
    // curl(omega Y^perp) = div(omega Y): the K * div term enters with a minus sign
    Vec2 rhs = pv_difference(w, Yp, x) - perp(kd) - value_at(w.omega, x) * value_at(Y, x);
    return norm(lhs - rhs);
}

ScalarField k_curl_div_identity(const VectorField& Z) {
    const Grid2D& g = Z.grid;
    if (g.n < 16) throw ConfigError("k_curl_div_identity: grid too coarse");
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            bool edge = i < 3 || j < 3 || i >= g.n - 3 || j >= g.n - 3;
            if (edge && norm(Z(i, j)) != 0) throw DomainError("k_curl_div_identity: Z must vanish near the border");
        }
    auto pts = grid_points(g);
    auto kd = velocity(VorticityField(divergence(Z)), pts);
    auto kc = velocity(VorticityField(curl(Z)), pts);
    ScalarField r(g);
    for (std::size_t k = 0; k < g.size(); ++k) r[k] = norm(kd[k] - perp(Z[k]) + perp(kc[k]));
    return r;
}

PvSplit pv_split(const VorticityField& w, Vec2 x, const CutoffSpec& cutoff) {
    const Grid2D& g = w.omega.grid;
    CutoffSpec c = cutoff;
    if (c.h == 0) c.h = 2 * g.h;
    if (c.r < 4 * g.h) throw ConfigError("pv_split: r below four grid spacings");
    if (c.h < g.h) throw ConfigError("pv_split: h below the grid spacing");
    c.validate();
    const double a = g.h * g.h;
    const double wx = value_at(w.omega, x);
    PvSplit out{};
    Mat2 near, far;
    double tr = 0;
    auto near_kernel = [&](Vec2 z, Mat2& G, double& t) {
        double mu = eval_mu_rh(c, z);
        Vec2 gm = grad_mu_rh(c, z);
        G = mu * gradK(z) + outer(K(z), gm);
        t = dot(gm, gradF2(z));
    };
    for (std::size_t k = 0; k < g.size(); ++k) {
        double wk = w.omega[k];
        if (wk == 0) continue;
        Vec2 z = x - g.point(k);
        double rr = norm(z);
        if (rr < 2 * c.r && rr > c.h) {
            Mat2 G;
            double t;
            near_kernel(z, G, t);
            near += (a * wk) * G;
            tr += a * wk * t;
        }
        // (1 - a_r) vanishes for |z| <= r
        if (rr > c.r) {
            double ar = a_r(c.r, z);
            Mat2 G = (1 - ar) * gradK(z) - outer(K(z), grad_a_r(c.r, z));
            far += (a * wk) * G;
        }
    }
    // subtract omega(x) times the lattice sum of the near kernel (its integral is zero)
    if (wx != 0) {
        const double R = 2 * c.r;
        int i0 = int(std::floor(g.frac(x.x - R))), i1 = int(std::ceil(g.frac(x.x + R)));
        int j0 = int(std::floor(g.frac(x.y - R))), j1 = int(std::ceil(g.frac(x.y + R)));
        Mat2 s0;
        double t0 = 0;
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) {
                Vec2 z = x - g.point(i, j);
                double rr = norm(z);
                if (!(rr < R && rr > c.h)) continue;
                Mat2 G;
                double t;
                near_kernel(z, G, t);
                s0 += G;
                t0 += t;
            }
        near = near - (a * wx) * s0;
        tr -= a * wx * t0;
    }
    out.near = near;
    out.far = far;
    out.tr_near = tr;
    return out;
}

MatrixField singular_transform_gradK(const ScalarField& Omega, const ScalarField& f) {
    const Grid2D& g = Omega.grid;
    if (f.grid.n != g.n) throw ConfigError("singular_transform_gradK: grid mismatch");
    ScalarField wf(g);
    for (std::size_t k = 0; k < g.size(); ++k) wf[k] = Omega[k] * f[k];
    auto pts = grid_points(g);
    auto A = hessian_sum(wf, pts), B = hessian_sum(Omega, pts);
    MatrixField out(g);
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = A[k] - f[k] * B[k];
    return out;
}

ScalarField singular_transform_mollifier(const ScalarField& Omega, const ScalarField& f, double eps) {
    const Grid2D& g = Omega.grid;
    if (f.grid.n != g.n) throw ConfigError("singular_transform_mollifier: grid mismatch");
    if (!(eps > g.h)) throw ConfigError("singular_transform_mollifier: eps must exceed the grid spacing");
    const int R = int(std::ceil(eps / g.h));
    const double a = g.h * g.h;
    ScalarField out(g);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            double acc = 0, fx = f(i, j);
            for (int dj = -R; dj <= R; ++dj)
                for (int di = -R; di <= R; ++di) {
                    int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= g.n || jj >= g.n) continue;
                    double o = Omega(ii, jj);
                    if (o == 0) continue;
                    double m = eval_mollifier(eps, {di * g.h, dj * g.h});
                    acc += m * o * (f(ii, jj) - fx);
                }
            out(i, j) = acc * a;
        }
    return out;
}

namespace {

void gl_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    // Gauss-Legendre on [0, 1]
    x.assign(n, 0);
    w.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = 0.5 * (1 - z);
        w[i] = 1 / ((1 - z * z) * dp * dp);
    }
}

template <class Acc, class F>
void polar_quadrature(const CutoffSpec& c, int nrad, int nang, Acc& acc, F&& body) {
    c.validate();
    std::vector<double> gx, gw;
    gl_nodes(nrad, gx, gw);
    const double bands[4] = {c.h, 2 * c.h, c.r, 2 * c.r};
    for (int b = 0; b < 3; ++b) {
        double l0 = std::log(bands[b]), l1 = std::log(bands[b + 1]);
        if (l1 <= l0) continue;
        for (int k = 0; k < nrad; ++k) {
            double rho = std::exp(l0 + (l1 - l0) * gx[k]);
            // dy = rho d rho d theta = rho^2 d(log rho) d theta
            double wr = gw[k] * (l1 - l0) * rho * rho * (2 * kPi / nang);
            for (int m = 0; m < nang; ++m) {
                double th = 2 * kPi * (m + 0.5) / nang;
                Vec2 e{std::cos(th), std::sin(th)};
                body(rho * e, wr, acc);
            }
        }
    }
}

}  // namespace

Mat2 intcal_first(const ScalarFn& f, const ScalarFn& g, Vec2 x, const CutoffSpec& c, int nrad, int nang) {
    Mat2 acc;
    const double fx = f(x);
    polar_quadrature(c, nrad, nang, acc, [&](Vec2 z, double w, Mat2& a) {
        // z = x - y
        Vec2 y = x - z;
        double mu = eval_mu_rh(c, z);
        Mat2 G = mu * hessF2(z) + outer(gradF2(z), grad_mu_rh(c, z));
        a += (w * (fx - f(y)) * g(y)) * G;
    });
    return acc;
}

Vec2 intcal_second(const ScalarFn& f, Vec2 x, const CutoffSpec& c, int nrad, int nang) {
    Vec2 acc;
    polar_quadrature(c, nrad, nang, acc, [&](Vec2 z, double w, Vec2& a) {
        a += (w * eval_mu_rh(c, z) * f(x - z)) * gradF2(z);
    });
    return acc;
}

}  // namespace striate
