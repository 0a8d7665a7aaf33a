#include "striate/field.hpp"

#include <cstring>
#include <fstream>

namespace striate {

double opnorm(const Mat3& p) {
    Mat3 s = transpose(p) * p;
    // eigenvalues of a symmetric 3x3, trigonometric form
    double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
    double q = trace(s) / 3;
    if (p1 == 0) {
        return std::sqrt(std::max({s(0, 0), s(1, 1), s(2, 2), 0.0}));
    }
    double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
                (s(2, 2) - q) * (s(2, 2) - q) + 2 * p1;
    double pp = std::sqrt(p2 / 6);
    Mat3 b = (1 / pp) * (s - q * Mat3::identity());
    double r = std::clamp(det(b) / 2, -1.0, 1.0);
    double phi = std::acos(r) / 3;
    double e1 = q + 2 * pp * std::cos(phi);
    return std::sqrt(std::max(e1, 0.0));
}

namespace {

inline double cr_weight(double t, int k) {
    // Catmull-Rom weights for nodes -1, 0, 1, 2
    double t2 = t * t, t3 = t2 * t;
    switch (k) {
        case 0: return 0.5 * (-t3 + 2 * t2 - t);
        case 1: return 0.5 * (3 * t3 - 5 * t2 + 2);
        case 2: return 0.5 * (-3 * t3 + 4 * t2 + t);
        default: return 0.5 * (t3 - t2);
    }
}

template <class T>
T cubic_impl(const GridField<T>& f, Vec2 x) {
    const Grid2D& g = f.grid;
    double fx = g.frac(x.x), fy = g.frac(x.y);
    int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
    double tx = fx - i0, ty = fy - j0;
    double wx[4], wy[4];
    for (int k = 0; k < 4; ++k) { wx[k] = cr_weight(tx, k); wy[k] = cr_weight(ty, k); }
    T acc{};
    for (int b = 0; b < 4; ++b) {
        int j = j0 - 1 + b;
        if (j < 0 || j >= g.n) continue;
        T row{};
        for (int a = 0; a < 4; ++a) {
            int i = i0 - 1 + a;
            if (i < 0 || i >= g.n) continue;
            row += wx[a] * f(i, j);
        }
        acc += wy[b] * row;
    }
    return acc;
}

}  // namespace

double interp_cubic(const ScalarField& f, Vec2 x) { return cubic_impl(f, x); }
Vec2 interp_cubic(const VectorField& f, Vec2 x) { return cubic_impl(f, x); }

double interp_linear(const ScalarField& f, Vec2 x) {
    const Grid2D& g = f.grid;
    double fx = g.frac(x.x), fy = g.frac(x.y);
    int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
    double tx = fx - i0, ty = fy - j0;
    auto at = [&](int i, int j) {
        return (i < 0 || j < 0 || i >= g.n || j >= g.n) ? 0.0 : f(i, j);
    };
    return (1 - ty) * ((1 - tx) * at(i0, j0) + tx * at(i0 + 1, j0)) +
           ty * ((1 - tx) * at(i0, j0 + 1) + tx * at(i0 + 1, j0 + 1));
}

namespace {

// derivative along axis (0: x1, 1: x2) of a component accessor
template <class Get>
double deriv(const Grid2D& g, int i, int j, int axis, Get get) {
    int n = g.n;
    int p = axis == 0 ? i : j;
    auto at = [&](int off) { return axis == 0 ? get(i + off, j) : get(i, j + off); };
    if (p >= 2 && p < n - 2)
        return (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) / (12 * g.h);
    if (p >= 1 && p < n - 1) return (at(1) - at(-1)) / (2 * g.h);
    if (p == 0) return (at(1) - at(0)) / g.h;
    return (at(0) - at(-1)) / g.h;
}

}  // namespace

VectorField gradient(const ScalarField& f) {
    VectorField out(f.grid);
    auto get = [&](int i, int j) { return f(i, j); };
    for (int j = 0; j < f.grid.n; ++j)
        for (int i = 0; i < f.grid.n; ++i)
            out(i, j) = {deriv(f.grid, i, j, 0, get), deriv(f.grid, i, j, 1, get)};
    return out;
}

ScalarField divergence(const VectorField& Z) {
    ScalarField out(Z.grid);
    auto gx = [&](int i, int j) { return Z(i, j).x; };
    auto gy = [&](int i, int j) { return Z(i, j).y; };
    for (int j = 0; j < Z.grid.n; ++j)
        for (int i = 0; i < Z.grid.n; ++i)
            out(i, j) = deriv(Z.grid, i, j, 0, gx) + deriv(Z.grid, i, j, 1, gy);
    return out;
}

ScalarField curl(const VectorField& Z) {
    ScalarField out(Z.grid);
    auto gx = [&](int i, int j) { return Z(i, j).x; };
    auto gy = [&](int i, int j) { return Z(i, j).y; };
    for (int j = 0; j < Z.grid.n; ++j)
        for (int i = 0; i < Z.grid.n; ++i)
            out(i, j) = deriv(Z.grid, i, j, 0, gy) - deriv(Z.grid, i, j, 1, gx);
    return out;
}

MatrixField jacobian(const VectorField& Z) {
    MatrixField out(Z.grid);
    auto gx = [&](int i, int j) { return Z(i, j).x; };
    auto gy = [&](int i, int j) { return Z(i, j).y; };
    for (int j = 0; j < Z.grid.n; ++j)
        for (int i = 0; i < Z.grid.n; ++i)
            out(i, j) = {deriv(Z.grid, i, j, 0, gx), deriv(Z.grid, i, j, 1, gx),
                         deriv(Z.grid, i, j, 0, gy), deriv(Z.grid, i, j, 1, gy)};
    return out;
}

double linf(const ScalarField& f) {
    double m = 0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double lp_norm(const ScalarField& f, double p) {
    if (p == 0) return linf(f);
    double s = 0, a = f.grid.h * f.grid.h;
    for (double x : f.v) s += std::pow(std::abs(x), p);
    return std::pow(s * a, 1 / p);
}

void write_snapshot(const std::string& path, const Snapshot& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    char header[32] = {};
    std::memcpy(header, "STRIEUL1", 8);
    std::int32_t n = s.grid.n, nc = s.ncomp;
    std::memcpy(header + 8, &n, 4);
    std::memcpy(header + 12, &nc, 4);
    std::memcpy(header + 16, &s.grid.h, 8);
    std::memcpy(header + 24, &s.grid.origin, 8);
    out.write(header, 32);
    out.write(reinterpret_cast<const char*>(s.data.data()), std::streamsize(s.data.size() * 8));
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    char header[32];
    in.read(header, 32);
    if (!in || std::memcmp(header, "STRIEUL1", 8) != 0) throw ConfigError("bad snapshot header: " + path);
    Snapshot s;
    std::int32_t n, nc;
    std::memcpy(&n, header + 8, 4);
    std::memcpy(&nc, header + 12, 4);
    std::memcpy(&s.grid.h, header + 16, 8);
    std::memcpy(&s.grid.origin, header + 24, 8);
    if (n <= 0 || nc <= 0) throw ConfigError("bad snapshot dims: " + path);
    s.grid.n = n;
    s.ncomp = nc;
    s.data.resize(std::size_t(n) * n * nc);
    in.read(reinterpret_cast<char*>(s.data.data()), std::streamsize(s.data.size() * 8));
    if (!in) throw ConfigError("truncated snapshot: " + path);
    return s;
}

Snapshot to_snapshot(const ScalarField& f) {
    return {f.grid, 1, f.v};
}
Snapshot to_snapshot(const VectorField& f) {
    Snapshot s{f.grid, 2, {}};
    s.data.reserve(f.size() * 2);
    for (auto& v : f.v) { s.data.push_back(v.x); s.data.push_back(v.y); }
    return s;
}
Snapshot to_snapshot(const MatrixField& f) {
    Snapshot s{f.grid, 4, {}};
    s.data.reserve(f.size() * 4);
    for (auto& m : f.v) {
        s.data.push_back(m.a); s.data.push_back(m.b);
        s.data.push_back(m.c); s.data.push_back(m.d);
    }
    return s;
}

}  // namespace striate
