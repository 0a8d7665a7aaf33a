#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "striate/geometry.hpp"

namespace striate {

// Square cell-centered grid: point (i, j) sits at (origin + (i + 1/2) h, origin + (j + 1/2) h),
// i along x1, j along x2. Storage is row major with j as the row.
struct Grid2D {
    int n = 0;
    double origin = 0;  // lower-left corner, same in both coordinates
    double h = 0;

    static Grid2D centered(int n, double half_width) {
        return {n, -half_width, 2 * half_width / n};
    }
    double coord(int i) const { return origin + (i + 0.5) * h; }
    Vec2 point(int i, int j) const { return {coord(i), coord(j)}; }
    Vec2 point(std::size_t k) const { return point(int(k % n), int(k / n)); }
    std::size_t index(int i, int j) const { return std::size_t(j) * n + i; }
    std::size_t size() const { return std::size_t(n) * n; }
    double upper() const { return origin + n * h; }
    // fractional index of a coordinate (0 at the first cell center)
    double frac(double x) const { return (x - origin) / h - 0.5; }
};

template <class T>
struct GridField {
    Grid2D grid;
    std::vector<T> v;

    GridField() = default;
    explicit GridField(const Grid2D& g, T fill = T{}) : grid(g), v(g.size(), fill) {}

    T& operator()(int i, int j) { return v[grid.index(i, j)]; }
    const T& operator()(int i, int j) const { return v[grid.index(i, j)]; }
    T& operator[](std::size_t k) { return v[k]; }
    const T& operator[](std::size_t k) const { return v[k]; }
    std::size_t size() const { return v.size(); }
};

using ScalarField = GridField<double>;
using VectorField = GridField<Vec2>;
using MatrixField = GridField<Mat2>;

template <class T, class F>
GridField<T> sample(const Grid2D& g, F&& f) {
    GridField<T> out(g);
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = f(g.point(k));
    return out;
}

// Bicubic (Catmull-Rom) interpolation of a scalar field; zero outside the grid,
// so fields must vanish near the border.
double interp_cubic(const ScalarField& f, Vec2 x);
Vec2 interp_cubic(const VectorField& f, Vec2 x);
double interp_linear(const ScalarField& f, Vec2 x);

// Centered differences of 4th order in the interior, 2nd order at the two outermost layers.
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& Z);
ScalarField curl(const VectorField& Z);
MatrixField jacobian(const VectorField& Z);  // (i, j) entry = d_j Z^i

double linf(const ScalarField& f);
double lp_norm(const ScalarField& f, double p);  // p = 0 means infinity

// Binary snapshot: 8-byte magic, int32 n, int32 ncomp, f64 spacing, f64 origin,
// then row-major float64 with interleaved components.
struct Snapshot {
    Grid2D grid;
    int ncomp = 1;
    std::vector<double> data;
};
void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);
Snapshot to_snapshot(const ScalarField& f);
Snapshot to_snapshot(const VectorField& f);
Snapshot to_snapshot(const MatrixField& f);

}  // namespace striate
