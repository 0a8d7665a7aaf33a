#include "striate/flow_transport.hpp"

#include <algorithm>
#include <cmath>

#include "striate/holder_norms.hpp"
#include "striate/kernels.hpp"
#include "striate/pairsum.hpp"

namespace striate {

FlowState initial_state(const Grid2D& g) {
    if (g.n < 8) throw ConfigError("flow: grid too small");
    FlowState s;
    s.markers = sample<Vec2>(g, [](Vec2 x) { return x; });
    s.grad_eta = MatrixField(g, Mat2::identity());
    s.inv = s.markers;
    s.inv_t = 0;
    return s;
}

std::vector<Vec2> PrescribedVelocity::at_markers(double t, int, const std::vector<Vec2>& pos) {
    std::vector<Vec2> out(pos.size());
    for (std::size_t k = 0; k < pos.size(); ++k) out[k] = u_(t, pos[k]);
    return out;
}

// ---------------------------------------------------------------- blobs

BlobVelocity::BlobVelocity(const FlowState& s0, const ScalarField& omega0, double delta, double safety_half_width)
    : delta_(delta) {
    const Grid2D& g = s0.grid();
    if (omega0.grid.n != g.n || omega0.grid.h != g.h || omega0.grid.origin != g.origin)
        throw ConfigError("blob velocity: vorticity not on the marker lattice");
    if (g.n % 2) throw ConfigError("blob velocity: lattice size must be even");
    if (!(delta >= g.h)) throw ConfigError("blob velocity: blob radius below the lattice spacing");
    const double h = g.h, lo = g.origin, hi = g.upper(), c = 0.5 * (lo + hi), L = 0.5 * (hi - lo);
    safety_ = safety_half_width > 0 ? safety_half_width : std::sqrt(2.0) * L + 0.25 * L;
    if (safety_ < L) throw ConfigError("blob velocity: safety box smaller than the lattice");
    for (std::size_t k = 0; k < g.size(); ++k)
        if (omega0[k] != 0) {
            idx_.push_back(k);
            w_.push_back(omega0[k] * h * h / (2 * kPi));
        }
    fine_ = Grid2D{g.n / 2 + 6, lo - 6 * h, 2 * h};
    // coarse points coincide with every other fine point
    int m = int(std::ceil((fine_.origin - h - (c - safety_ - 12 * h)) / (4 * h)));
    double oc = fine_.origin - h - 4 * h * m;
    int nc = int(std::ceil((c + safety_ + 12 * h - oc) / (4 * h)));
    coarse_ = Grid2D{nc, oc, 4 * h};
}

BlobVelocity::Grids BlobVelocity::build(double t, const std::vector<Vec2>& pos) const {
    pairsum::Sources src;
    src.x.reserve(idx_.size());
    for (std::size_t q = 0; q < idx_.size(); ++q) {
        Vec2 p = pos[idx_[q]];
        src.push(p.x, p.y, w_[q]);
    }
    Grids G{t, VectorField(fine_), VectorField(coarse_)};
    // coarse points off the fine grid, then the fine grid
    const int m = int(std::lround((fine_.origin - coarse_.origin - coarse_.h / 4) / coarse_.h));
    std::vector<std::size_t> ck;
    std::vector<double> tx, ty;
    for (std::size_t k = 0; k < coarse_.size(); ++k) {
        int i = int(k % coarse_.n), j = int(k / coarse_.n);
        int fi = 2 * (i - m), fj = 2 * (j - m);
        if (fi >= 0 && fi < fine_.n && fj >= 0 && fj < fine_.n) continue;
        ck.push_back(k);
        Vec2 p = coarse_.point(i, j);
        tx.push_back(p.x);
        ty.push_back(p.y);
    }
    const std::size_t nco = tx.size();
    for (std::size_t k = 0; k < fine_.size(); ++k) {
        Vec2 p = fine_.point(k);
        tx.push_back(p.x);
        ty.push_back(p.y);
    }
    std::vector<double> ox(tx.size()), oy(tx.size());
    pairsum::radial_blob(tx.data(), ty.data(), tx.size(), src, delta_, ox.data(), oy.data());
    for (std::size_t q = 0; q < nco; ++q) G.coarse[ck[q]] = perp(Vec2{ox[q], oy[q]});
    for (std::size_t k = 0; k < fine_.size(); ++k) G.fine[k] = perp(Vec2{ox[nco + k], oy[nco + k]});
    for (int j = 0; j < coarse_.n; ++j)
        for (int i = 0; i < coarse_.n; ++i) {
            int fi = 2 * (i - m), fj = 2 * (j - m);
            if (fi >= 0 && fi < fine_.n && fj >= 0 && fj < fine_.n) G.coarse(i, j) = G.fine(fi, fj);
        }
    return G;
}

namespace {

bool stencil_inside(const Grid2D& g, Vec2 x) {
    double fx = g.frac(x.x), fy = g.frac(x.y);
    return fx >= 1 && fy >= 1 && fx < g.n - 2 && fy < g.n - 2;
}

bool stencil6_inside(const Grid2D& g, Vec2 x) {
    double fx = g.frac(x.x), fy = g.frac(x.y);
    return fx >= 2 && fy >= 2 && fx < g.n - 3 && fy < g.n - 3;
}

// tensor 6-point Lagrange interpolation on nodes i0 - 2 .. i0 + 3
Vec2 interp6(const VectorField& f, Vec2 x) {
    const Grid2D& g = f.grid;
    double fx = g.frac(x.x), fy = g.frac(x.y);
    int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
    auto w = [](double t, double* L) {
        for (int k = 0; k < 6; ++k) {
            double num = 1, den = 1;
            for (int m = 0; m < 6; ++m) {
                if (m == k) continue;
                num *= t - (m - 2);
                den *= k - m;
            }
            L[k] = num / den;
        }
    };
    double wx[6], wy[6];
    w(fx - i0, wx);
    w(fy - j0, wy);
    Vec2 acc{};
    for (int b = 0; b < 6; ++b) {
        Vec2 row{};
        for (int a = 0; a < 6; ++a) row += wx[a] * f(i0 - 2 + a, j0 - 2 + b);
        acc += wy[b] * row;
    }
    return acc;
}

}  // namespace

Vec2 BlobVelocity::interp(const Grids& G, Vec2 x) const {
    if (stencil6_inside(fine_, x)) return interp6(G.fine, x);
    if (stencil6_inside(coarse_, x)) return interp6(G.coarse, x);
    throw NumericalAbort("flow: marker left the safety box");
}

const BlobVelocity::Grids* BlobVelocity::find(double t) const {
    for (auto it = hist_.rbegin(); it != hist_.rend(); ++it)
        if (it->t == t) return &*it;
    return nullptr;
}

void BlobVelocity::keep(Grids&& G) {
    for (auto& H : hist_)
        if (H.t == G.t) {
            H = std::move(G);
            return;
        }
    auto at = std::upper_bound(hist_.begin(), hist_.end(), G.t, [](double t, const Grids& H) { return t < H.t; });
    hist_.insert(at, std::move(G));
}

std::vector<Vec2> BlobVelocity::at_markers(double t, int stage, const std::vector<Vec2>& pos) {
    const Grids* G = stage == 0 ? find(t) : nullptr;
    Grids local;
    if (!G) {
        local = build(t, pos);
        if (stage == 0 || stage == 2) {
            keep(std::move(local));
            G = find(t);
        } else {
            G = &local;
        }
    }
    std::vector<Vec2> out(pos.size());
    for (std::size_t k = 0; k < pos.size(); ++k) out[k] = interp(*G, pos[k]);
    return out;
}

Vec2 BlobVelocity::at(double t, Vec2 x) const {
    if (const Grids* G = find(t)) return interp(*G, x);
    auto hi = std::upper_bound(hist_.begin(), hist_.end(), t, [](double s, const Grids& H) { return s < H.t; });
    if (hi == hist_.begin() || hi == hist_.end()) throw DomainError("blob velocity: time outside the recorded history");
    auto lo = hi - 1;
    double a = (t - lo->t) / (hi->t - lo->t);
    return (1 - a) * interp(*lo, x) + a * interp(*hi, x);
}

void BlobVelocity::rollback(double t) {
    hist_.erase(std::remove_if(hist_.begin(), hist_.end(), [t](const Grids& H) { return H.t > t; }), hist_.end());
}

void BlobVelocity::prepare(const FlowState& s) {
    if (!find(s.t)) keep(build(s.t, s.markers.v));
}

std::vector<Vec2> BlobVelocity::direct(const std::vector<Vec2>& markers, const std::vector<Vec2>& pts) const {
    pairsum::Sources src;
    for (std::size_t q = 0; q < idx_.size(); ++q) src.push(markers[idx_[q]].x, markers[idx_[q]].y, w_[q]);
    std::vector<double> tx(pts.size()), ty(pts.size()), ox(pts.size()), oy(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) { tx[k] = pts[k].x; ty[k] = pts[k].y; }
    pairsum::radial_blob(tx.data(), ty.data(), pts.size(), src, delta_, ox.data(), oy.data());
    std::vector<Vec2> out(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) out[k] = perp(Vec2{ox[k], oy[k]});
    return out;
}

// ---------------------------------------------------------------- stepping

namespace {

// d/dx at index i of a line of n samples: centered 4th order, one-sided 4th order at the two
// outer layers (the map is smooth up to the lattice edge)
template <class F>
Vec2 diff4(F&& f, int i, int n, double h) {
    if (i >= 2 && i <= n - 3) return (1 / (12 * h)) * (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2));
    if (i == 0) return (1 / (12 * h)) * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4));
    if (i == 1) return (1 / (12 * h)) * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4));
    if (i == n - 1)
        return (-1 / (12 * h)) * (-25.0 * f(n - 1) + 48.0 * f(n - 2) - 36.0 * f(n - 3) + 16.0 * f(n - 4) - 3.0 * f(n - 5));
    return (-1 / (12 * h)) * (-3.0 * f(n - 1) - 10.0 * f(n - 2) + 18.0 * f(n - 3) - 6.0 * f(n - 4) + f(n - 5));
}

MatrixField lattice_jacobian(const VectorField& m) {
    const Grid2D& g = m.grid;
    MatrixField J(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            Vec2 dx = diff4([&](int a) { return m(a, j); }, i, g.n, g.h);
            Vec2 dy = diff4([&](int b) { return m(i, b); }, j, g.n, g.h);
            J(i, j) = Mat2::cols(dx, dy);
        }
    return J;
}

void rk4_step(FlowState& s, VelocityProvider& u, double dt) {
    const double t0 = s.t;
    std::vector<Vec2>& P = s.markers.v;
    const std::size_t n = P.size();
    std::vector<Vec2> Q(n);
    auto k1 = u.at_markers(t0, 0, P);
    for (std::size_t k = 0; k < n; ++k) Q[k] = P[k] + (0.5 * dt) * k1[k];
    auto k2 = u.at_markers(t0 + dt / 2, 1, Q);
    for (std::size_t k = 0; k < n; ++k) Q[k] = P[k] + (0.5 * dt) * k2[k];
    auto k3 = u.at_markers(t0 + dt / 2, 2, Q);
    for (std::size_t k = 0; k < n; ++k) Q[k] = P[k] + dt * k3[k];
    auto k4 = u.at_markers(t0 + dt, 3, Q);
    for (std::size_t k = 0; k < n; ++k) P[k] += (dt / 6) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    for (auto& p : P)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw NumericalAbort("flow: non-finite marker");
    s.t = t0 + dt;
    s.steps.push_back({t0, dt});
    s.grad_eta = lattice_jacobian(s.markers);
    s.inv_t = -1;
}

void advance_rec(FlowState& s, VelocityProvider& u, double dt, const AdvanceOptions& opt, int depth) {
    FlowState backup = s;
    rk4_step(s, u, dt);
    if (volume_drift(s) <= opt.volume_tol) return;
    if (depth >= opt.max_halvings)
        throw NumericalAbort("flow: volume drift above tolerance after step halving");
    s = std::move(backup);
    u.rollback(s.t);
    advance_rec(s, u, dt / 2, opt, depth + 1);
    advance_rec(s, u, dt / 2, opt, depth + 1);
}

}  // namespace

void advance(FlowState& s, VelocityProvider& u, double dt, const AdvanceOptions& opt) {
    if (!(dt > 0)) throw ConfigError("advance: dt must be positive");
    advance_rec(s, u, dt, opt, 0);
}

double volume_drift(const FlowState& s) {
    double m = 0;
    for (auto& J : s.grad_eta.v) m = std::max(m, std::abs(det(J) - 1));
    return m;
}

double grad_eta_linf(const FlowState& s) {
    double m = 0;
    for (auto& J : s.grad_eta.v) m = std::max(m, opnorm(J));
    return m;
}

double grad_eta_inv_linf(const FlowState& s) {
    if (!s.inverse_current()) throw ConfigError("flow: inverse map not current");
    double m = 0;
    for (auto& J : lattice_jacobian(s.inv).v) m = std::max(m, opnorm(J));
    return m;
}

void compute_inverse(FlowState& s, VelocityProvider& u) {
    u.prepare(s);
    const Grid2D& g = s.grid();
    VectorField inv(g);
    const auto& steps = s.steps;
    bool escaped = false;
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < g.size(); ++k) {
        Vec2 y = g.point(k);
        try {
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
            const double t0 = it->t0, dt = it->dt;
            Vec2 k1 = u.at(t0 + dt, y);
            Vec2 k2 = u.at(t0 + dt / 2, y - (0.5 * dt) * k1);
            Vec2 k3 = u.at(t0 + dt / 2, y - (0.5 * dt) * k2);
            Vec2 k4 = u.at(t0, y - dt * k3);
            y -= (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        } catch (const std::exception&) {
#pragma omp atomic write
            escaped = true;
        }
        inv[k] = y;
    }
    if (escaped) throw NumericalAbort("flow: back-tracked point left the safety box");
    s.inv = std::move(inv);
    s.inv_t = s.t;
}

double inverse_identity_defect(const FlowState& s) {
    if (!s.inverse_current()) throw ConfigError("flow: inverse map not current");
    const Grid2D& g = s.grid();
    double m = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        Vec2 y = s.inv[k];
        if (!stencil_inside(g, y)) continue;
        m = std::max(m, norm(interp_cubic(s.markers, y) - g.point(k)));
    }
    return m;
}

// ---------------------------------------------------------------- pushforward, transport

std::vector<Vec2> pushforward_markers(const VectorFn& Y0, const FlowState& s) {
    const Grid2D& g = s.grid();
    std::vector<Vec2> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = s.grad_eta[k] * Y0(g.point(k));
    return out;
}

VectorField pushforward(const VectorFn& Y0, const FlowState& s) {
    if (!s.inverse_current()) throw ConfigError("pushforward: inverse map not current");
    MatrixField Ji = lattice_jacobian(s.inv);
    VectorField Y(s.grid());
    for (std::size_t k = 0; k < Y.size(); ++k) Y[k] = inverse(Ji[k]) * Y0(s.inv[k]);
    return Y;
}

VectorField pushforward(const VectorField& Y0, const FlowState& s) {
    const Grid2D& g = Y0.grid;
    for (auto& y : s.inv.v)
        if (g.frac(y.x) < 0 || g.frac(y.y) < 0 || g.frac(y.x) > g.n - 1 || g.frac(y.y) > g.n - 1)
            throw DomainError("pushforward: preimage outside the sampled family");
    return pushforward([&](Vec2 x) { return interp_cubic(Y0, x); }, s);
}

ScalarField transport_scalar(const ScalarField& f0, const FlowState& s) {
    if (!s.inverse_current()) throw ConfigError("transport_scalar: inverse map not current");
    ScalarField f(s.grid());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = interp_cubic(f0, s.inv[k]);
    return f;
}

ScalarField transport_scalar(const ScalarFn2& f0, const FlowState& s) {
    if (!s.inverse_current()) throw ConfigError("transport_scalar: inverse map not current");
    ScalarField f(s.grid());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = f0(s.inv[k]);
    return f;
}

// ---------------------------------------------------------------- mollification

namespace {

template <class T>
GridField<T> mollify_impl(const GridField<T>& f, double delta) {
    const Grid2D& g = f.grid;
    if (!(delta >= g.h)) throw ConfigError("mollify: delta below the grid spacing");
    const int r = int(std::ceil(delta / g.h));
    const int w = 2 * r + 1;
    std::vector<double> wt(std::size_t(w) * w);
    double sum = 0;
    for (int b = -r; b <= r; ++b)
        for (int a = -r; a <= r; ++a) {
            double v = eval_mollifier(delta, {a * g.h, b * g.h});
            wt[std::size_t(b + r) * w + (a + r)] = v;
            sum += v;
        }
    for (double& v : wt) v /= sum;
    GridField<T> out(g);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            T acc{};
            for (int b = -r; b <= r; ++b) {
                int jj = std::clamp(j + b, 0, g.n - 1);
                for (int a = -r; a <= r; ++a) {
                    double c = wt[std::size_t(b + r) * w + (a + r)];
                    if (c == 0) continue;
                    acc += c * f(std::clamp(i + a, 0, g.n - 1), jj);
                }
            }
            out(i, j) = acc;
        }
    return out;
}

}  // namespace

ScalarField mollify(const ScalarField& f, double delta) { return mollify_impl(f, delta); }
VectorField mollify(const VectorField& f, double delta) { return mollify_impl(f, delta); }

std::vector<ConvergenceRow> convergence_study(const ScalarField& f, const std::vector<double>& deltas, double alpha) {
    std::vector<ConvergenceRow> rows;
    for (double d : deltas) {
        ScalarField fd = mollify(f, d), diff(f.grid);
        for (std::size_t k = 0; k < f.size(); ++k) diff[k] = fd[k] - f[k];
        rows.push_back({d, holder_report(diff, alpha).norm(), holder_report(fd, alpha).seminorm});
    }
    return rows;
}

VectorField mollifier_commutator(const ScalarField& omega0, const VectorField& Y0, double eps) {
    ScalarField we = mollify(omega0, eps);
    VectorField Z(Y0.grid);
    for (std::size_t k = 0; k < Z.size(); ++k) Z[k] = omega0[k] * Y0[k];
    VectorField Ze = mollify(Z, eps), out(Y0.grid);
    for (std::size_t k = 0; k < Z.size(); ++k) out[k] = we[k] * Y0[k] - Ze[k];
    return out;
}

VectorField r0_correction(const ScalarField& omega0, const VectorField& Y0, double eps, const ScalarField* div_wY) {
    if (!div_wY) throw ConfigError("r0_correction: div(omega0 Y0) not supplied");
    VectorField R = mollifier_commutator(omega0, Y0, eps);
    if (linf(*div_wY) == 0) return R;
    VectorField v = mollify(neg_holder_potential(*div_wY), eps);
    for (std::size_t k = 0; k < R.size(); ++k) R[k] += v[k];
    return R;
}

}  // namespace striate
