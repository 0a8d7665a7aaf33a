#include "striate/oracles.hpp"

#include "striate/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace striate {

namespace {

double poly(const std::vector<double>& c, double r) {
    double v = 0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * r + c[k];
    return v;
}

// integral of rho * poly(rho) over [a, b]
double poly_moment(const std::vector<double>& c, double a, double b) {
    double v = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
        v += c[k] * (std::pow(b, double(k + 2)) - std::pow(a, double(k + 2))) / double(k + 2);
    return v;
}

// Gauss-Legendre nodes on [0, 1]
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
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

}  // namespace

RadialProfile RadialProfile::piecewise(std::vector<double> breaks, std::vector<std::vector<double>> coef) {
    if (breaks.size() < 2 || coef.size() + 1 != breaks.size())
        throw ConfigError("radial profile: need n+1 breaks for n pieces");
    if (breaks[0] != 0) throw ConfigError("radial profile: first break must be 0");
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i + 1] > breaks[i])) throw ConfigError("radial profile: breaks must increase");
    RadialProfile p;
    p.breaks_ = std::move(breaks);
    p.coef_ = std::move(coef);
    p.support_ = p.breaks_.back();
    for (std::size_t i = 1; i < p.breaks_.size(); ++i) {
        double b = p.breaks_[i];
        double left = poly(p.coef_[i - 1], b);
        double right = i < p.coef_.size() ? poly(p.coef_[i], b) : 0.0;
        if (left != right) p.jumps_.push_back(b);
    }
    p.desc_ = "piecewise";
    return p;
}

RadialProfile RadialProfile::patch(double radius) {
    if (!(radius > 0)) throw ConfigError("patch: radius must be positive");
    auto p = piecewise({0, radius}, {{1.0}});
    std::ostringstream os;
    os << "patch(" << radius << ")";
    p.desc_ = os.str();
    return p;
}

RadialProfile RadialProfile::ring(double r0, double r1) {
    if (!(r0 > 0 && r1 > r0)) throw ConfigError("ring: need 0 < r0 < r1");
    auto p = piecewise({0, r0, r1}, {{0.0}, {1.0}});
    std::ostringstream os;
    os << "ring(" << r0 << "," << r1 << ")";
    p.desc_ = os.str();
    return p;
}

bool RadialProfile::vanishes_near_zero() const {
    if (tabulated()) return table_g_[0] == 0 && table_g_[1] == 0;
    for (double c : coef_[0])
        if (c != 0) return false;
    return true;
}

double RadialProfile::g(double r) const {
    if (r < 0) r = -r;
    if (tabulated()) {
        std::size_t i = std::size_t(r / dr_);
        if (i + 1 >= table_g_.size()) return 0;
        return hermite(i, r);
    }
    if (r >= support_) return 0;
    std::size_t i = std::upper_bound(breaks_.begin(), breaks_.end(), r) - breaks_.begin() - 1;
    return poly(coef_[i], r);
}

double RadialProfile::G(double r) const {
    if (r < 0) r = -r;
    if (tabulated()) {
        std::size_t i = std::size_t(r / dr_);
        if (i + 1 >= table_g_.size()) return table_G_.back();
        return table_G_[i] + cell_moment(i, i * dr_, r);
    }
    double v = 0;
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
        double a = breaks_[i], b = std::min(breaks_[i + 1], r);
        if (b <= a) break;
        v += poly_moment(coef_[i], a, b);
    }
    return v;
}

namespace {

// mass-weighted angular measure of {phi : |x + s e_phi| < b}, |x| = r, integrated against the
// radial mollifier profile over s in (0, eps). The split at s = |r - b| and the quadratic
// substitution remove the square-root endpoint singularity of the angular measure.
double disk_convolution(double r, double b, double eps, const std::vector<double>& ux,
                        const std::vector<double>& uw) {
    auto prof = [&](double s) {
        double t = s / eps;
        return t < 1 ? s * std::exp(-1 / (1 - t * t)) : 0.0;
    };
    auto theta = [&](double s) {
        if (r == 0) return s < b ? 2 * kPi : 0.0;
        double c = (r * r + s * s - b * b) / (2 * r * s);
        return 2 * std::acos(std::clamp(c, -1.0, 1.0));
    };
    double sstar = std::abs(r - b), acc = 0;
    // [0, s*]: angular measure constant
    if (r < b)
        for (std::size_t k = 0; k < ux.size(); ++k) acc += uw[k] * sstar * 2 * kPi * prof(sstar * ux[k]);
    // [s*, eps] with s = s* + (eps - s*) u^2
    double L = eps - sstar;
    for (std::size_t k = 0; k < ux.size(); ++k) {
        double u = ux[k], s = sstar + L * u * u;
        acc += uw[k] * 2 * L * u * theta(s) * prof(s);
    }
    return acc;
}

}  // namespace

RadialProfile RadialProfile::mollified(double eps) const {
    if (!(eps > 0)) throw ConfigError("mollified: eps must be positive");
    if (tabulated()) throw ConfigError("mollified: profile is already tabulated");
    bool constant = true;
    for (auto& c : coef_) constant = constant && c.size() <= 1;

    std::vector<double> ux, uw;
    gauss_legendre(96, ux, uw);
    // mass of s exp(-1/(1-(s/eps)^2)) over (0, eps), times 2 pi
    double mass = 0;
    for (std::size_t k = 0; k < ux.size(); ++k) {
        double u = ux[k], s = eps * u * u;
        double t = s / eps;
        mass += uw[k] * 2 * eps * u * s * std::exp(-1 / (1 - t * t));
    }
    mass *= 2 * kPi;

    auto value = [&](double r) {
        if (constant) {
            // superpose disks: g = sum_j (v_{j-1} - v_j) 1{|x| < b_j}
            double acc = 0;
            for (std::size_t j = 1; j < breaks_.size(); ++j) {
                double vin = coef_[j - 1].empty() ? 0 : coef_[j - 1][0];
                double vout = j < coef_.size() && !coef_[j].empty() ? coef_[j][0] : 0.0;
                if (vin == vout) continue;
                double d = std::abs(r - breaks_[j]) >= eps ? (r < breaks_[j] ? mass : 0.0)
                                                          : disk_convolution(r, breaks_[j], eps, ux, uw);
                acc += (vin - vout) * d;
            }
            return acc / mass;
        }
        // general pieces: plain tensor rule (adequate for continuous profiles)
        const int nphi = 256, ns = 64;
        double acc = 0, m = 0;
        for (int a = 0; a < ns; ++a) {
            double s = eps * (a + 0.5) / ns, t = s / eps;
            double w = s * std::exp(-1 / (1 - t * t));
            double avg = 0;
            for (int k = 0; k < nphi; ++k) {
                double phi = 2 * kPi * (k + 0.5) / nphi;
                avg += g(std::sqrt(r * r + s * s + 2 * r * s * std::cos(phi)));
            }
            acc += w * avg / nphi;
            m += w;
        }
        return acc / m;
    };

    RadialProfile out;
    out.support_ = support_ + eps;
    out.dr_ = std::min(eps / 128, support_ / 4096);
    const std::size_t n = std::size_t(std::ceil(out.support_ / out.dr_)) + 3;
    out.table_g_.assign(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) out.table_g_[i] = value(i * out.dr_);
    // Hermite slopes: 4th-order differences, even extension at r = 0
    out.table_dg_.assign(n, 0);
    auto at = [&](long i) {
        if (i < 0) i = -i;
        return std::size_t(i) < n ? out.table_g_[std::size_t(i)] : 0.0;
    };
    for (std::size_t i = 0; i < n; ++i) {
        long k = long(i);
        out.table_dg_[i] = (at(k - 2) - 8 * at(k - 1) + 8 * at(k + 1) - at(k + 2)) / (12 * out.dr_);
    }
    out.table_G_.assign(n, 0);
    for (std::size_t i = 1; i < n; ++i) out.table_G_[i] = out.table_G_[i - 1] + out.cell_moment(i - 1, (i - 1) * out.dr_, i * out.dr_);
    std::ostringstream os;
    os << desc_ << "*rho_" << eps;
    out.desc_ = os.str();
    return out;
}

double RadialProfile::hermite(std::size_t i, double r) const {
    double t = (r - i * dr_) / dr_;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * table_g_[i] + (t3 - 2 * t2 + t) * dr_ * table_dg_[i] +
           (-2 * t3 + 3 * t2) * table_g_[i + 1] + (t3 - t2) * dr_ * table_dg_[i + 1];
}

// integral of rho g(rho) over [a, b] inside cell i; 3-point Gauss is exact for the quartic
double RadialProfile::cell_moment(std::size_t i, double a, double b) const {
    static const double x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double w[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
    double m = 0.5 * (a + b), h = 0.5 * (b - a), acc = 0;
    for (int k = 0; k < 3; ++k) {
        double r = m + h * x[k];
        acc += w[k] * r * hermite(i, r);
    }
    return acc * h;
}

Vec2 radial_u(const RadialProfile& p, Vec2 x) {
    double r2 = norm2(x);
    if (r2 == 0) return {0, 0};
    return (p.G(std::sqrt(r2)) / r2) * perp(x);
}

Mat2 radial_gradu(const RadialProfile& p, Vec2 x) {
    double r2 = norm2(x);
    if (r2 == 0) {
        if (!p.vanishes_near_zero()) throw DomainError("radial_gradu: x = 0 with g nonzero near 0");
        return {};
    }
    double r = std::sqrt(r2);
    double G = p.G(r), g = p.g(r);
    double x1 = x.x, x2 = x.y;
    Mat2 sym{2 * x1 * x2, x2 * x2 - x1 * x1, x2 * x2 - x1 * x1, -2 * x1 * x2};
    Mat2 rot{-x1 * x2, -x2 * x2, x1 * x1, x1 * x2};
    return (G / (r2 * r2)) * sym + (g / r2) * rot;
}

Mat2 radial_A(const RadialProfile&, const std::function<double(double)>& chi, Vec2 x) {
    double r2 = norm2(x);
    double c = chi(std::sqrt(r2));
    if (c == 0) return {};
    if (r2 == 0) throw DomainError("radial_A: chi nonzero at the origin");
    double x1 = x.x, x2 = x.y;
    return (c / r2) * Mat2{-x1 * x2, -x2 * x2, x1 * x1, x1 * x2};
}

Mat2 radial_corrected(const RadialProfile& p, Vec2 x) {
    double r2 = norm2(x);
    if (r2 == 0) {
        if (!p.vanishes_near_zero()) throw DomainError("radial_corrected: x = 0 with g nonzero near 0");
        return {};
    }
    double G = p.G(std::sqrt(r2));
    double x1 = x.x, x2 = x.y;
    return (G / (r2 * r2)) * Mat2{2 * x1 * x2, x2 * x2 - x1 * x1, x2 * x2 - x1 * x1, -2 * x1 * x2};
}

ShearProfile::ShearProfile(double c, double d, std::vector<double> samples, double C)
    : c_(c), d_(d), C_(C), w_(std::move(samples)) {
    if (!(d > c)) throw ConfigError("shear: need c < d");
    if (w_.size() < 2) throw ConfigError("shear: need at least two samples");
    dx_ = (d - c) / double(w_.size() - 1);
    // trapezoid is exact for the piecewise-linear interpolant
    double total = 0;
    for (std::size_t i = 0; i + 1 < w_.size(); ++i) total += 0.5 * (w_[i] + w_[i + 1]) * dx_;
    double m = total / (d - c);
    for (double& w : w_) w -= m;
    prim_.assign(w_.size(), 0);
    for (std::size_t i = 0; i + 1 < w_.size(); ++i) prim_[i + 1] = prim_[i] + 0.5 * (w_[i] + w_[i + 1]) * dx_;
}

ShearProfile ShearProfile::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("shear: cannot open table file " + path);
    std::vector<double> nums;
    std::string line;
    while (std::getline(in, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        double v;
        while (ls >> v) nums.push_back(v);
    }
    // first two numbers: c d, then the samples
    if (nums.size() < 4) throw ConfigError("shear: table needs c, d and at least two samples");
    return ShearProfile(nums[0], nums[1], std::vector<double>(nums.begin() + 2, nums.end()));
}

ShearProfile ShearProfile::rough(double c, double d, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> w(std::max(samples, 2));
    for (double& v : w) v = U(rng);
    return ShearProfile(c, d, std::move(w));
}

double ShearProfile::W(double x2) const {
    if (x2 < c_ || x2 > d_) return 0;
    double s = (x2 - c_) / dx_;
    std::size_t i = std::min(std::size_t(s), w_.size() - 2);
    double f = s - double(i);
    return (1 - f) * w_[i] + f * w_[i + 1];
}

double ShearProfile::primitive(double x2) const {
    if (x2 <= c_) return 0;
    if (x2 >= d_) return prim_.back();
    double s = (x2 - c_) / dx_;
    std::size_t i = std::min(std::size_t(s), w_.size() - 2);
    double t = (s - double(i)) * dx_;
    double slope = (w_[i + 1] - w_[i]) / dx_;
    return prim_[i] + w_[i] * t + 0.5 * slope * t * t;
}

double ShearProfile::mean() const { return prim_.back() / (d_ - c_); }

ShearFields shear_fields(const ShearProfile& p, Vec2 x) {
    ShearFields f;
    double w = p.W(x.y);
    f.u = {p.C() - p.primitive(x.y), 0};
    f.gradu = {0, -w, 0, 0};
    f.omega = w;
    f.A = {0, -1, 0, 0};
    return f;
}

ScalarField cell_average(const Grid2D& g, const std::function<double(Vec2)>& f, int sub) {
    if (sub < 1) throw ConfigError("cell_average: sub must be >= 1");
    ScalarField out(g, 0.0);
    const double hs = g.h / sub;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            double x0 = g.origin + i * g.h, y0 = g.origin + j * g.h, acc = 0;
            for (int b = 0; b < sub; ++b)
                for (int a = 0; a < sub; ++a) acc += f({x0 + (a + 0.5) * hs, y0 + (b + 0.5) * hs});
            out.v[g.index(i, j)] = acc / (sub * sub);
        }
    return out;
}

namespace {

// int_0^t log sqrt(s^2 + c^2) ds
double log_primitive(double t, double c) {
    if (t == 0) return 0;
    double q = t * t + c * c;
    return t * 0.5 * std::log(q) - t + (c == 0 ? 0 : c * std::atan(t / c));
}

// Exact velocity of the piecewise-constant field: over each cell, K = grad^perp F2 integrates
// to log integrals along the cell edges.
Vec2 cellwise_velocity(const ScalarField& w, Vec2 x) {
    const Grid2D& g = w.grid;
    double ax = 0, ay = 0;
    for (int j = 0; j < g.n; ++j) {
        double a2 = g.origin + j * g.h, b2 = a2 + g.h;
        for (int i = 0; i < g.n; ++i) {
            double v = w.v[g.index(i, j)];
            if (v == 0) continue;
            double a1 = g.origin + i * g.h, b1 = a1 + g.h;
            auto P = [](double c, double t0, double t1) { return log_primitive(t1, c) - log_primitive(t0, c); };
            // int d_1 F2 and int d_2 F2 over the cell, times 2 pi
            double d1 = P(x.x - a1, x.y - b2, x.y - a2) - P(x.x - b1, x.y - b2, x.y - a2);
            double d2 = P(x.y - a2, x.x - b1, x.x - a1) - P(x.y - b2, x.x - b1, x.x - a1);
            ax += v * d1;
            ay += v * d2;
        }
    }
    return {-ay / (2 * kPi), ax / (2 * kPi)};
}

}  // namespace

Vec2 reference_velocity(const ScalarField& omega_cells, Vec2 x) {
    const Grid2D& g = omega_cells.grid;
    if (g.n % 2) throw ConfigError("reference_velocity: grid size must be even");
    Grid2D gc{g.n / 2, g.origin, 2 * g.h};
    ScalarField coarse(gc, 0.0);
    for (int j = 0; j < gc.n; ++j)
        for (int i = 0; i < gc.n; ++i)
            coarse.v[gc.index(i, j)] = 0.25 * (omega_cells.v[g.index(2 * i, 2 * j)] + omega_cells.v[g.index(2 * i + 1, 2 * j)] +
                                               omega_cells.v[g.index(2 * i, 2 * j + 1)] + omega_cells.v[g.index(2 * i + 1, 2 * j + 1)]);
    Vec2 uf = cellwise_velocity(omega_cells, x), uc = cellwise_velocity(coarse, x);
    return (4.0 / 3.0) * uf - (1.0 / 3.0) * uc;
}

Vec2 patch_family_Y0(Vec2 x) {
    double q = norm2(x);
    // (1 - exp(-q/c)) / r, written to stay accurate near 0
    double f = q > 0 ? -std::expm1(-q / 0.05) / std::sqrt(q) : 0.0;
    return f * perp(x);
}

Vec2 patch_family_Z0(Vec2 x) {
    double r = norm(x);
    double s = std::abs(r - 1) / 0.25;
    double chi = bump(s);
    if (chi == 0) return {1, 0};
    double dchi = bump_deriv(s) / 0.25 * (r >= 1 ? 1 : -1);
    return {(1 - chi) - dchi * x.y * x.y / r, dchi * x.x * x.y / r};
}

std::vector<VectorField> patch_family(const Grid2D& g) {
    return {sample<Vec2>(g, patch_family_Y0), sample<Vec2>(g, patch_family_Z0)};
}

}  // namespace striate
