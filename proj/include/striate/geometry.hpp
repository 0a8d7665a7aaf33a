#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace striate {

constexpr double kPi = 3.14159265358979323846;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct NumericalAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PropertyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0, y = 0;
};
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline Vec2& operator-=(Vec2& a, Vec2 b) { a.x -= b.x; a.y -= b.y; return a; }
inline Vec2& operator*=(Vec2& a, double s) { a.x *= s; a.y *= s; return a; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
// x^perp = (-x2, x1)
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

// row major [[a, b], [c, d]]
struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;
    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 cols(Vec2 c1, Vec2 c2) { return {c1.x, c2.x, c1.y, c2.y}; }
    Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
    double operator()(int i, int j) const {
        return i == 0 ? (j == 0 ? a : b) : (j == 0 ? c : d);
    }
};
// the rotation generator [[0,-1],[1,0]]
inline Mat2 J2() { return {0, -1, 1, 0}; }
inline Mat2 operator+(Mat2 p, Mat2 q) { return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d}; }
inline Mat2 operator-(Mat2 p, Mat2 q) { return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d}; }
inline Mat2 operator*(double s, Mat2 p) { return {s * p.a, s * p.b, s * p.c, s * p.d}; }
inline Mat2& operator+=(Mat2& p, Mat2 q) { p = p + q; return p; }
inline Vec2 operator*(Mat2 m, Vec2 v) { return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y}; }
inline Mat2 operator*(Mat2 p, Mat2 q) {
    return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d,
            p.c * q.a + p.d * q.c, p.c * q.b + p.d * q.d};
}
inline Mat2 transpose(Mat2 m) { return {m.a, m.c, m.b, m.d}; }
inline double det(Mat2 m) { return m.a * m.d - m.b * m.c; }
inline double trace(Mat2 m) { return m.a + m.d; }
inline Mat2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }
inline Mat2 inverse(Mat2 m) {
    double dt = det(m);
    return {m.d / dt, -m.b / dt, -m.c / dt, m.a / dt};
}
inline double max_abs(Mat2 m) {
    return std::max(std::max(std::abs(m.a), std::abs(m.b)), std::max(std::abs(m.c), std::abs(m.d)));
}

// Largest singular value, closed form.
inline double opnorm(Mat2 m) {
    double e = 0.5 * (m.a + m.d), f = 0.5 * (m.a - m.d);
    double g = 0.5 * (m.c + m.b), h = 0.5 * (m.c - m.b);
    return std::sqrt(e * e + h * h) + std::sqrt(f * f + g * g);
}
inline double opnorm(Vec2 v) { return norm(v); }
inline double opnorm(double s) { return std::abs(s); }

struct Vec3 {
    double x = 0, y = 0, z = 0;
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};
inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct Mat3 {
    std::array<double, 9> m{};  // row major
    double operator()(int i, int j) const { return m[3 * i + j]; }
    double& operator()(int i, int j) { return m[3 * i + j]; }
    static Mat3 identity() { Mat3 r; r(0, 0) = r(1, 1) = r(2, 2) = 1; return r; }
    static Mat3 cols(Vec3 c1, Vec3 c2, Vec3 c3) {
        Mat3 r;
        for (int i = 0; i < 3; ++i) { r(i, 0) = c1[i]; r(i, 1) = c2[i]; r(i, 2) = c3[i]; }
        return r;
    }
    Vec3 col(int j) const { return {m[j], m[3 + j], m[6 + j]}; }
};
inline Mat3 operator+(const Mat3& p, const Mat3& q) { Mat3 r; for (int k = 0; k < 9; ++k) r.m[k] = p.m[k] + q.m[k]; return r; }
inline Mat3 operator-(const Mat3& p, const Mat3& q) { Mat3 r; for (int k = 0; k < 9; ++k) r.m[k] = p.m[k] - q.m[k]; return r; }
inline Mat3 operator*(double s, const Mat3& p) { Mat3 r; for (int k = 0; k < 9; ++k) r.m[k] = s * p.m[k]; return r; }
inline Vec3 operator*(const Mat3& p, Vec3 v) {
    return {p(0, 0) * v.x + p(0, 1) * v.y + p(0, 2) * v.z,
            p(1, 0) * v.x + p(1, 1) * v.y + p(1, 2) * v.z,
            p(2, 0) * v.x + p(2, 1) * v.y + p(2, 2) * v.z};
}
inline Mat3 operator*(const Mat3& p, const Mat3& q) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = p(i, 0) * q(0, j) + p(i, 1) * q(1, j) + p(i, 2) * q(2, j);
    return r;
}
inline Mat3 transpose(const Mat3& p) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = p(j, i);
    return r;
}
inline Mat3 outer(Vec3 u, Vec3 v) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = u[i] * v[j];
    return r;
}
inline double det(const Mat3& p) {
    return dot(p.col(0), cross(p.col(1), p.col(2)));
}
inline double trace(const Mat3& p) { return p(0, 0) + p(1, 1) + p(2, 2); }
inline double max_abs(const Mat3& p) {
    double r = 0;
    for (double v : p.m) r = std::max(r, std::abs(v));
    return r;
}
// cofactor matrix: M cof(M)^T = det(M) I
inline Mat3 cofactor(const Mat3& p) {
    Vec3 c0 = p.col(0), c1 = p.col(1), c2 = p.col(2);
    return Mat3::cols(cross(c1, c2), cross(c2, c0), cross(c0, c1));
}

// Largest singular value via the eigenvalues of the symmetric M^T M.
double opnorm(const Mat3& p);

}  // namespace striate
