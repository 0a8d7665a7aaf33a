#include "striate/holder_norms.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "striate/pairsum.hpp"

namespace striate {

std::string HolderReport::csv_header() {
    return "alpha,linf,seminorm,pairs_used,shell_min,shell_max";
}

std::string HolderReport::csv_row() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%.17g,%.17g", alpha, linf, seminorm,
                  pairs_used, shell_min, shell_max);
    return buf;
}

namespace {

inline double diffnorm(double a, double b) { return std::abs(a - b); }
inline double diffnorm(Vec2 a, Vec2 b) { return norm(a - b); }
inline double diffnorm(const Mat2& a, const Mat2& b) { return opnorm(a - b); }
inline double magnitude(double a) { return std::abs(a); }
inline double magnitude(Vec2 a) { return norm(a); }
inline double magnitude(const Mat2& a) { return opnorm(a); }

struct Offset {
    int di, dj;
};

// lattice offsets in a half plane (each unordered pair once)
bool half_plane(int di, int dj) { return dj > 0 || (dj == 0 && di > 0); }

template <class T>
HolderReport report_impl(const GridField<T>& f, double alpha, const HolderOptions& opt,
                         const std::vector<char>* mask, const std::vector<Vec2>* pos) {
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("holder_report: alpha must lie in (0,1)");
    const Grid2D& g = f.grid;
    const int n = g.n;
    if (g.size() < 2) throw ConfigError("holder_report: need at least two samples");
    if (mask && mask->size() != g.size()) throw ConfigError("holder_report: mask size mismatch");
    if (pos && pos->size() != g.size()) throw ConfigError("holder_report: positions size mismatch");

    HolderReport rep;
    rep.alpha = alpha;
    rep.shell_min = opt.shell.min_sep > 0 ? opt.shell.min_sep : 2 * g.h;
    rep.shell_max = opt.shell.max_sep > 0 ? opt.shell.max_sep : g.h * n * std::sqrt(2.0);
    if (rep.shell_min < g.h * (1 - 1e-12)) throw ConfigError("holder_report: shell floor below grid spacing");
    if (rep.shell_max < rep.shell_min) throw ConfigError("holder_report: empty shell");

    std::size_t count = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (mask && !(*mask)[k]) continue;
        rep.linf = std::max(rep.linf, magnitude(f[k]));
        ++count;
    }
    if (count < 2) throw ConfigError("holder_report: fewer than two admissible samples");

    bool exhaustive = opt.mode == PairMode::Exhaustive ||
                      (opt.mode == PairMode::Auto && count <= opt.exhaustive_limit);

    // Offsets are chosen on the lattice; for Lagrangian positions the lattice separation
    // is only a guide, so the enumeration radius gets a little slack.
    const double slack = pos ? 1.5 : 1.0;
    std::vector<Offset> offs;
    const int rmax_cells = int(std::ceil(rep.shell_max * slack / g.h));
    const double cmin = rep.shell_min / (g.h * slack), cmax = rep.shell_max * slack / g.h;
    if (exhaustive) {
        int R = std::min(rmax_cells, n - 1);
        for (int dj = 0; dj <= R; ++dj)
            for (int di = -R; di <= R; ++di) {
                if (!half_plane(di, dj)) continue;
                double c = std::sqrt(double(di * di + dj * dj));
                if (c >= cmin * (1 - 1e-12) && c <= cmax * (1 + 1e-12)) offs.push_back({di, dj});
            }
    } else {
        int R = std::min({opt.near_cells, rmax_cells, n - 1});
        for (int dj = 0; dj <= R; ++dj)
            for (int di = -R; di <= R; ++di) {
                if (!half_plane(di, dj)) continue;
                double c = std::sqrt(double(di * di + dj * dj));
                if (c <= opt.near_cells && c >= cmin * (1 - 1e-12) && c <= cmax * (1 + 1e-12))
                    offs.push_back({di, dj});
            }
        // dyadic shells beyond the exhaustive disc, drawn independently of the shell bounds
        // so that widening the shell only adds pairs
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> u01(0, 1);
        double lo = opt.near_cells;
        for (int s = 0; lo < 2.0 * n; ++s, lo *= 2) {
            for (int k = 0; k < opt.per_shell; ++k) {
                double r = lo * std::pow(2.0, u01(rng));
                double th = kPi * u01(rng);
                int di = int(std::lround(r * std::cos(th))), dj = int(std::lround(r * std::sin(th)));
                if (!half_plane(di, dj) || std::abs(di) >= n || dj >= n) continue;
                double c = std::sqrt(double(di * di + dj * dj));
                if (c <= opt.near_cells) continue;
                if (c >= cmin && c <= cmax) offs.push_back({di, dj});
            }
        }
        // axis and diagonal offsets at every dyadic radius and at the full extent
        std::vector<int> radii;
        for (int r = std::max(opt.near_cells, 1) + 1; r < n; r *= 2) radii.push_back(r);
        radii.push_back(n - 1);
        for (int r : radii)
            for (Offset o : {Offset{r, 0}, Offset{0, r}, Offset{r, r}, Offset{-r, r}}) {
                double c = std::sqrt(double(o.di * o.di + o.dj * o.dj));
                if (c > opt.near_cells && c >= cmin && c <= cmax) offs.push_back(o);
            }
        std::sort(offs.begin(), offs.end(), [](Offset a, Offset b) { return a.dj != b.dj ? a.dj < b.dj : a.di < b.di; });
        offs.erase(std::unique(offs.begin(), offs.end(), [](Offset a, Offset b) { return a.di == b.di && a.dj == b.dj; }),
                   offs.end());
    }

    double best = 0;
    std::size_t pairs = 0;
    const double smin = rep.shell_min, smax = rep.shell_max;
#pragma omp parallel for schedule(dynamic, 1) reduction(max : best) reduction(+ : pairs)
    for (std::size_t o = 0; o < offs.size(); ++o) {
        const int di = offs[o].di, dj = offs[o].dj;
        const double lat = g.h * std::sqrt(double(di * di + dj * dj));
        const double latq = std::pow(lat, -alpha);
        const int i0 = std::max(0, -di), i1 = std::min(n, n - di);
        for (int j = 0; j + dj < n; ++j) {
            for (int i = i0; i < i1; ++i) {
                std::size_t a = g.index(i, j), b = g.index(i + di, j + dj);
                if (mask && (!(*mask)[a] || !(*mask)[b])) continue;
                double q;
                if (pos) {
                    double d = norm((*pos)[a] - (*pos)[b]);
                    if (d < smin || d > smax) continue;
                    q = diffnorm(f[a], f[b]) / std::pow(d, alpha);
                } else {
                    q = diffnorm(f[a], f[b]) * latq;
                }
                ++pairs;
                best = std::max(best, q);
            }
        }
    }
    if (pairs == 0) throw ConfigError("holder_report: no admissible pairs in shell");
    rep.seminorm = best;
    rep.pairs_used = pairs;
    return rep;
}

}  // namespace

HolderReport holder_report(const ScalarField& f, double alpha, const HolderOptions& opt,
                           const std::vector<char>* mask, const std::vector<Vec2>* positions) {
    return report_impl(f, alpha, opt, mask, positions);
}
HolderReport holder_report(const VectorField& f, double alpha, const HolderOptions& opt,
                           const std::vector<char>* mask, const std::vector<Vec2>* positions) {
    return report_impl(f, alpha, opt, mask, positions);
}
HolderReport holder_report(const MatrixField& f, double alpha, const HolderOptions& opt,
                           const std::vector<char>* mask, const std::vector<Vec2>* positions) {
    return report_impl(f, alpha, opt, mask, positions);
}

HolderReport holder_report_points(const std::vector<Vec2>& pts, const std::vector<double>& vals,
                                  double alpha, const HolderOptions& opt) {
    if (pts.size() != vals.size() || pts.size() < 2)
        throw ConfigError("holder_report_points: need at least two matching samples");
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("holder_report_points: alpha must lie in (0,1)");
    HolderReport rep;
    rep.alpha = alpha;
    double lo = 1e300, hi = -1e300;
    for (auto& p : pts) { lo = std::min({lo, p.x, p.y}); hi = std::max({hi, p.x, p.y}); }
    rep.shell_min = opt.shell.min_sep;
    rep.shell_max = opt.shell.max_sep > 0 ? opt.shell.max_sep : (hi - lo) * std::sqrt(2.0);
    for (double v : vals) rep.linf = std::max(rep.linf, std::abs(v));
    const std::size_t n = pts.size();
    auto consider = [&](std::size_t a, std::size_t b) {
        double d = norm(pts[a] - pts[b]);
        if (d <= 0 || d < rep.shell_min || d > rep.shell_max) return;
        ++rep.pairs_used;
        rep.seminorm = std::max(rep.seminorm, std::abs(vals[a] - vals[b]) / std::pow(d, alpha));
    };
    bool exhaustive = opt.mode == PairMode::Exhaustive ||
                      (opt.mode == PairMode::Auto && n <= opt.exhaustive_limit);
    if (exhaustive) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) consider(a, b);
    } else {
        std::mt19937_64 rng(opt.seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::size_t draws = std::size_t(opt.per_shell) * 64 * n / 64;
        for (std::size_t k = 0; k < draws; ++k) consider(pick(rng), pick(rng));
    }
    if (rep.pairs_used == 0) throw ConfigError("holder_report_points: no admissible pairs in shell");
    return rep;
}

VectorField neg_holder_potential(const ScalarField& divZ) {
    const Grid2D& g = divZ.grid;
    pairsum::Sources src;
    double scale = linf(divZ);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (divZ[k] == 0 || std::abs(divZ[k]) < 1e-15 * scale) continue;
        Vec2 p = g.point(k);
        src.push(p.x, p.y, divZ[k] * g.h * g.h / (2 * kPi));
    }
    std::vector<double> tx(g.size()), ty(g.size()), ox(g.size()), oy(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) { Vec2 p = g.point(k); tx[k] = p.x; ty[k] = p.y; }
    pairsum::radial(tx.data(), ty.data(), g.size(), src, 0.25 * g.h * g.h, ox.data(), oy.data());
    VectorField v(g);
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = {ox[k], oy[k]};
    return v;
}

NegHolderReport neg_holder_estimate(const VectorField& Z, double alpha, const ScalarField* divZ,
                                    const HolderOptions& opt) {
    ScalarField d = divZ ? *divZ : divergence(Z);
    for (double x : d.v)
        if (!std::isfinite(x)) throw NumericalAbort("neg_holder_estimate: non-finite divergence");
    for (auto& z : Z.v)
        if (!std::isfinite(z.x) || !std::isfinite(z.y)) throw NumericalAbort("neg_holder_estimate: unbounded field");
    NegHolderReport r;
    r.alpha = alpha;
    r.potential = holder_report(neg_holder_potential(d), alpha, opt);
    r.value = r.potential.norm();
    return r;
}

double curve_c1alpha_norm(const std::vector<Vec2>& c, double alpha, Vec2 period) {
    const std::size_t n = c.size();
    if (n < 8) throw ConfigError("curve_c1alpha_norm: need at least 8 samples");
    // neighbours across the seam carry the period shift (zero for a closed curve)
    auto next = [&](std::size_t k) { return k + 1 < n ? c[k + 1] : c[0] + period; };
    auto prev = [&](std::size_t k) { return k > 0 ? c[k - 1] : c[n - 1] - period; };
    std::vector<double> seg(n);
    double total = 0;
    for (std::size_t k = 0; k < n; ++k) {
        seg[k] = norm(next(k) - c[k]);
        total += seg[k];
    }
    double mean = total / n;
    for (double s : seg)
        if (!(s > 1e-9 * mean) || s > 1e3 * mean) throw ConfigError("curve_c1alpha_norm: degenerate spacing");
    // self intersection between non-adjacent chords
    auto cross2 = [](Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; };
    for (std::size_t a = 0; a < n; ++a) {
        Vec2 p = c[a], p2 = next(a);
        for (std::size_t b = a + 2; b < n; ++b) {
            if (a == 0 && b == n - 1) continue;
            Vec2 q = c[b], q2 = next(b);
            if (norm(p - q) < 1e-9 * mean) throw ConfigError("curve_c1alpha_norm: self-intersecting curve");
            double d1 = cross2(p2 - p, q - p), d2 = cross2(p2 - p, q2 - p);
            double d3 = cross2(q2 - q, p - q), d4 = cross2(q2 - q, p2 - q);
            double tol = 1e-12 * mean * mean;
            bool strict = std::abs(d1) > tol && std::abs(d2) > tol && std::abs(d3) > tol && std::abs(d4) > tol;
            if (strict && d1 * d2 < 0 && d3 * d4 < 0) throw ConfigError("curve_c1alpha_norm: self-intersecting curve");
        }
    }
    std::vector<double> s(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) s[k] = s[k - 1] + seg[k - 1];
    // nonuniform three-point derivative in chord length
    std::vector<Vec2> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        double hm = seg[(k + n - 1) % n], hp = seg[k];
        Vec2 fm = prev(k), f0 = c[k], fp = next(k);
        d[k] = (hm / (hp * (hm + hp))) * fp - (hp / (hm * (hm + hp))) * fm +
               ((hp - hm) / (hm * hp)) * f0;
    }
    double linf = 0, dinf = 0, semi = 0;
    for (std::size_t k = 0; k < n; ++k) {
        linf = std::max(linf, norm(c[k]));
        dinf = std::max(dinf, norm(d[k]));
    }
    const double floor_sep = 2 * mean;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            double ds = s[b] - s[a];
            ds = std::min(ds, total - ds);
            if (ds < floor_sep) continue;
            semi = std::max(semi, norm(d[a] - d[b]) / std::pow(ds, alpha));
        }
    return linf + dinf + semi;
}

}  // namespace striate
