#include "striate/striated_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace striate {

std::vector<double> wedge(const std::vector<std::vector<double>>& vs) {
    if (vs.empty()) throw ConfigError("wedge: no vectors");
    const std::size_t d = vs[0].size();
    for (auto& v : vs)
        if (v.size() != d) throw ConfigError("wedge: vectors of different dimension");
    if (vs.size() + 1 != d) throw ConfigError("wedge: need d - 1 vectors in R^d");
    if (d == 2) {
        Vec2 w = wedge(Vec2{vs[0][0], vs[0][1]});
        return {w.x, w.y};
    }
    if (d == 3) {
        Vec3 w = wedge(Vec3{vs[0][0], vs[0][1], vs[0][2]}, Vec3{vs[1][0], vs[1][1], vs[1][2]});
        return {w.x, w.y, w.z};
    }
    throw ConfigError("wedge: only d = 2, 3");
}

double family_infimum(const std::vector<VectorField>& family, const std::vector<char>* mask) {
    if (family.empty()) throw ConfigError("family_infimum: empty family");
    const std::size_t N = family[0].size();
    for (auto& Y : family)
        if (Y.size() != N) throw ConfigError("family_infimum: members on different grids");
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < N; ++k) {
        if (mask && !(*mask)[k]) continue;
        double sup = 0;
        for (auto& Y : family) sup = std::max(sup, norm(Y[k]));
        inf = std::min(inf, sup);
    }
    return inf;
}

double family_infimum(const std::vector<std::vector<Vec3>>& family) {
    if (family.empty()) throw ConfigError("family_infimum: empty family");
    const std::size_t N = family[0].size();
    for (auto& Y : family)
        if (Y.size() != N) throw ConfigError("family_infimum: members of different length");
    double inf1 = std::numeric_limits<double>::infinity(), inf2 = inf1;
    for (std::size_t k = 0; k < N; ++k) {
        double s1 = 0, s2 = 0;
        for (std::size_t a = 0; a < family.size(); ++a) {
            s1 = std::max(s1, norm(family[a][k]));
            for (std::size_t b = a + 1; b < family.size(); ++b)
                s2 = std::max(s2, norm(cross(family[a][k], family[b][k])));
        }
        inf1 = std::min(inf1, s1);
        inf2 = std::min(inf2, s2);
    }
    return std::min(inf1, inf2);
}

// ---------------------------------------------------------------- Serfati lemma

SerfatiResult serfati_bound_2d(Mat2 B, Mat2 M) {
    if (std::abs(B.b - B.c) > 1e-12 * std::max(1.0, max_abs(B))) throw ConfigError("serfati: B not symmetric");
    double dt = det(M);
    if (dt == 0) throw DomainError("serfati: singular M");
    SerfatiResult r;
    double m = opnorm(M);
    r.lhs = opnorm(B);
    r.P1 = 2 * m * m * m;
    r.P2 = 1;
    r.bound = r.P1 / (dt * dt) * norm(B * M.col(0)) + std::abs(trace(B));
    r.holds = r.lhs <= r.bound * (1 + 1e-9);
    return r;
}

double serfati_rhs_2d_literal(Mat2 B, Mat2 M) {
    double m = opnorm(M);
    return 2 * m * m * m / std::abs(det(M)) * norm(B * M.col(0)) + std::abs(trace(B));
}

namespace {

// Columns as plain arrays so the same code serves d = 2 and d = 3.
struct Cols {
    int d;
    double c[3][3];  // c[j][i] = entry i of column j
};

double cnorm(const double* v, int d) {
    double s = 0;
    for (int i = 0; i < d; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

SerfatiResult general_impl(const Cols& M, const Cols& cof, double dt, const double B[3][3], double lhs) {
    const int d = M.d;
    double tr = 0, bscale = 0;
    for (int i = 0; i < d; ++i) tr += B[i][i];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            bscale = std::max(bscale, std::abs(B[i][j]));
            if (std::abs(B[i][j] - B[j][i]) > 1e-12 * std::max(1.0, bscale))
                throw ConfigError("serfati: B not symmetric");
        }
    if (dt == 0) throw DomainError("serfati: singular M");
    double md = cnorm(M.c[d - 1], d), cd = cnorm(cof.c[d - 1], d);
    double diff = 0;
    for (int i = 0; i < d; ++i) diff += std::pow(M.c[d - 1][i] - cof.c[d - 1][i], 2);
    if (std::sqrt(diff) > 1e-9 * std::max(cd, 1e-300)) throw ConfigError("serfati: last column is not the cofactor column");
    double inner = 3 * md * md;
    for (int i = 0; i < d - 1; ++i) inner += cnorm(M.c[i], d) * cnorm(cof.c[i], d);
    SerfatiResult r;
    r.lhs = lhs;
    double sum = 0;
    for (int k = 0; k < d - 1; ++k) {
        double bm[3] = {0, 0, 0};
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) bm[i] += B[i][j] * M.c[k][j];
        double ck = cnorm(cof.c[k], d) * inner;
        r.P1 = std::max(r.P1, ck);
        sum += cnorm(bm, d);
    }
    r.P2 = md * md;
    r.bound = r.P1 / (dt * dt) * sum + r.P2 / std::abs(dt) * std::abs(tr);
    r.holds = r.lhs <= r.bound * (1 + 1e-9);
    return r;
}

}  // namespace

SerfatiResult serfati_bound_general(Mat2 B, Mat2 M) {
    Cols Mc{2, {{M.a, M.c, 0}, {M.b, M.d, 0}, {0, 0, 0}}};
    // cof(M) = det(M) M^-T
    Cols cof{2, {{M.d, -M.b, 0}, {-M.c, M.a, 0}, {0, 0, 0}}};
    double Bm[3][3] = {{B.a, B.b, 0}, {B.c, B.d, 0}, {0, 0, 0}};
    return general_impl(Mc, cof, det(M), Bm, opnorm(B));
}

SerfatiResult serfati_bound_general(const Mat3& B, const Mat3& M) {
    Mat3 C = cofactor(M);
    Cols Mc{3, {}}, cof{3, {}};
    double Bm[3][3];
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            Mc.c[j][i] = M(i, j);
            cof.c[j][i] = C(i, j);
            Bm[i][j] = B(i, j);
        }
    return general_impl(Mc, cof, det(M), Bm, opnorm(B));
}

FuzzReport serfati_fuzz(int dim, std::uint64_t trials, std::uint64_t seed) {
    if (dim != 2 && dim != 3) throw ConfigError("lemma fuzz: dimension must be 2 or 3");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1), E(-2, 2);
    std::normal_distribution<double> N(0, 1);
    FuzzReport rep;
    rep.dim = dim;
    rep.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        double bs = std::pow(10.0, 1.5 * E(rng)), ms = std::pow(10.0, E(rng));
        SerfatiResult r;
        if (dim == 2) {
            double b12 = U(rng);
            Mat2 B{U(rng) * bs, b12 * bs, b12 * bs, U(rng) * bs};
            Mat2 M{N(rng) * ms, N(rng) * ms, N(rng) * ms, N(rng) * ms};
            double sc = max_abs(M);
            if (std::abs(det(M)) < 1e-12 * sc * sc) {
                ++rep.degenerate;
                continue;
            }
            r = serfati_bound_2d(B, M);
            if (r.lhs > serfati_rhs_2d_literal(B, M) * (1 + 1e-9)) ++rep.literal_violations;
        } else {
            Mat3 B;
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) B(i, j) = B(j, i) = U(rng) * bs;
            Vec3 m1{N(rng) * ms, N(rng) * ms, N(rng) * ms}, m2{N(rng) * ms, N(rng) * ms, N(rng) * ms};
            Mat3 M = Mat3::cols(m1, m2, cross(m1, m2));
            double sc = std::max(norm(m1), norm(m2));
            if (std::abs(det(M)) < 1e-12 * sc * sc * sc * sc) {
                ++rep.degenerate;
                continue;
            }
            r = serfati_bound_general(B, M);
        }
        if (!r.holds) ++rep.violations;
        if (r.bound > 0) rep.worst_ratio = std::max(rep.worst_ratio, r.lhs / r.bound);
    }
    return rep;
}

double gradient_linf_bound(const std::vector<Vec2>& Y, Mat2 Omega, const std::vector<Vec2>& Ygradu) {
    if (Y.size() != Ygradu.size() || Y.empty()) throw ConfigError("gradient_linf_bound: size mismatch");
    std::size_t best = 0;
    for (std::size_t k = 1; k < Y.size(); ++k)
        if (norm(Y[k]) > norm(Y[best])) best = k;
    double y = norm(Y[best]);
    if (y == 0) throw DomainError("gradient_linf_bound: degenerate family at x");
    // M = (Y | Y^perp): |M| = |Y|, det M = |Y|^2, tr B = 2 div u = 0
    Vec2 BY = 2.0 * Ygradu[best] - Omega * Y[best];
    double bnorm = 2 * y * y * y / (y * y * y * y) * norm(BY);
    return 0.5 * bnorm + 0.5 * opnorm(Omega);
}

// ---------------------------------------------------------------- partition of unity

Partition2D::Partition2D(double R, double lo, double hi, double delta) : R_(R), lo_(lo), hi_(hi), delta_(delta) {
    if (!(R > 0) || !(hi > lo)) throw ConfigError("partition: need R > 0 and a nonempty box");
    if (!(delta > 0 && delta < 0.25)) throw ConfigError("partition: delta must lie in (0, 1/4)");
    const double w = 0.5 + delta_;
    row0_ = int(std::floor(lo / R - w));
    int row1 = int(std::ceil(hi / R + w));
    for (int j = row0_; j <= row1; ++j) {
        double y0 = R * (j - w), y1 = R * (j + w);
        bool keep = y1 > lo && y0 < hi;
        double off = 0.5 * j;
        int c0 = int(std::floor(lo / R - off - w)), c1 = int(std::ceil(hi / R - off + w));
        col0_.push_back(c0);
        first_.push_back(int(bumps_.size()));
        int count = 0;
        if (keep)
            for (int k = c0; k <= c1; ++k) {
                double x0 = R * (k + off - w), x1 = R * (k + off + w);
                if (!(x1 > lo && x0 < hi)) {
                    if (count == 0) {
                        ++col0_.back();
                        continue;
                    }
                    break;
                }
                bumps_.push_back({j, k, x0, x1, y0, y1});
                ++count;
            }
        ncol_.push_back(count);
    }
    nrow_ = int(ncol_.size());
}

double Partition2D::psi(double t) const {
    double a = std::abs(t);
    if (a <= 0.5 - delta_) return 1;
    if (a >= 0.5 + delta_) return 0;
    double s = (0.5 + delta_ - a) / (2 * delta_);
    double e0 = std::exp(-1 / s), e1 = std::exp(-1 / (1 - s));
    return e0 / (e0 + e1);
}

long Partition2D::find(int row, int col) const {
    int r = row - row0_;
    if (r < 0 || r >= nrow_) return -1;
    int c = col - col0_[r];
    if (c < 0 || c >= ncol_[r]) return -1;
    return first_[r] + c;
}

double Partition2D::value(std::size_t n, Vec2 x) const {
    const Bump& b = bumps_.at(n);
    // same rounding order as active()
    return psi(x.y / R_ - b.row) * psi((x.x / R_ - 0.5 * b.row) - b.col);
}

std::vector<std::pair<std::size_t, double>> Partition2D::active(Vec2 x) const {
    std::vector<std::pair<std::size_t, double>> out;
    double t2 = x.y / R_;
    int jc = int(std::floor(t2 + 0.5));
    for (int j = jc - 1; j <= jc + 1; ++j) {
        double py = psi(t2 - j);
        if (py == 0) continue;
        double t1 = x.x / R_ - 0.5 * j;
        int kc = int(std::floor(t1 + 0.5));
        for (int k = kc - 1; k <= kc + 1; ++k) {
            double px = psi(t1 - k);
            if (px == 0) continue;
            long n = find(j, k);
            if (n >= 0) out.emplace_back(std::size_t(n), py * px);
        }
    }
    return out;
}

std::string Partition2D::manifest(const std::vector<int>* labels) const {
    std::string s = "# bump,row,col,x0,x1,y0,y1,member\n";
    char buf[256];
    for (std::size_t n = 0; n < bumps_.size(); ++n) {
        const Bump& b = bumps_[n];
        std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g,%.17g,%.17g,%.17g,%d\n", n, b.row, b.col, b.x0, b.x1, b.y0,
                      b.y1, labels ? (*labels)[n] : -1);
        s += buf;
    }
    return s;
}

Partition2D partition_of_unity_2d(double R, const Grid2D& box) {
    if (R < 4 * box.h) throw ConfigError("partition_of_unity_2d: R below four grid spacings");
    return Partition2D(R, box.origin, box.upper());
}

std::vector<int> select_members(const std::vector<VectorField>& family, const Partition2D& P, double I) {
    if (family.empty()) throw ConfigError("select_members: empty family");
    const Grid2D& g = family[0].grid;
    const std::size_t nb = P.bumps().size(), nm = family.size();
    std::vector<double> minmag(nb * nm, std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < g.size(); ++k)
        for (auto [n, v] : P.active(g.point(k))) {
            if (v <= 0) continue;
            for (std::size_t m = 0; m < nm; ++m) minmag[n * nm + m] = std::min(minmag[n * nm + m], norm(family[m][k]));
        }
    std::vector<int> labels(nb, 0);
    for (std::size_t n = 0; n < nb; ++n) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < nm; ++m)
            if (minmag[n * nm + m] > minmag[n * nm + best]) best = m;
        if (!(minmag[n * nm + best] > I / 2))
            throw DomainError("select_members: no member exceeds I/2 on bump " + std::to_string(n));
        labels[n] = int(best);
    }
    return labels;
}

Mat2 correction_block(Vec2 Y) {
    double q = norm2(Y);
    if (q == 0) throw DomainError("correction_block: Y vanishes");
    return (1 / q) * Mat2{Y.x * Y.y, -Y.x * Y.x, Y.y * Y.y, -Y.x * Y.y};
}

namespace {

template <class F>
MatrixField assemble(const std::vector<VectorField>& family, const Partition2D& P, const std::vector<int>& labels,
                     const VectorField* eta_inv, F&& block) {
    if (family.empty()) throw ConfigError("correction matrix: empty family");
    if (labels.size() != P.bumps().size()) throw ConfigError("correction matrix: one label per bump required");
    const Grid2D& g = family[0].grid;
    if (eta_inv && eta_inv->size() != g.size()) throw ConfigError("correction matrix: inverse map on another grid");
    MatrixField A(g);
    bool bad = false;
#pragma omp parallel for schedule(static)
    for (long k = 0; k < long(g.size()); ++k) {
        Vec2 X = eta_inv ? (*eta_inv)[k] : g.point(std::size_t(k));
        Mat2 acc;
        for (auto [n, v] : P.active(X)) {
            Vec2 Y = family[labels[n]][k];
            if (norm2(Y) == 0) {
                bad = true;
                continue;
            }
            acc += v * block(Y);
        }
        A[k] = acc;
    }
    if (bad) throw DomainError("correction matrix: selected member vanishes on its bump support");
    return A;
}

}  // namespace

MatrixField correction_matrix_2d(const std::vector<VectorField>& family, const Partition2D& P,
                                 const std::vector<int>& labels, const VectorField* eta_inv) {
    return assemble(family, P, labels, eta_inv, [](Vec2 Y) { return correction_block(Y); });
}

MatrixField projector_sum_2d(const std::vector<VectorField>& family, const Partition2D& P,
                             const std::vector<int>& labels, const VectorField* eta_inv) {
    return assemble(family, P, labels, eta_inv, [](Vec2 Y) { return (1 / norm2(Y)) * outer(Y, Y); });
}

// ---------------------------------------------------------------- 3D

Mat3 q_map(Vec3 p) {
    Mat3 Q;
    Q(0, 1) = -p.z;
    Q(0, 2) = p.y;
    Q(1, 0) = p.z;
    Q(1, 2) = -p.x;
    Q(2, 0) = -p.y;
    Q(2, 1) = p.x;
    return Q;
}

Vec3 q_inverse(const Mat3& W) {
    double s = max_abs(W);
    if (max_abs(W + transpose(W)) > 1e-12 * s) throw DomainError("q_inverse: matrix is not antisymmetric");
    return {W(2, 1), W(0, 2), W(1, 0)};
}

Frame3 orthonormal_frame(Vec3 Y1, Vec3 Y2) {
    double n1 = norm(Y1);
    if (n1 == 0) throw DomainError("orthonormal_frame: Y1 vanishes");
    Vec3 e1 = (1 / n1) * Y1;
    Vec3 v = Y2 - dot(Y2, e1) * e1;
    double n2 = norm(v);
    if (!(n2 > 1e-14 * norm(Y2))) throw DomainError("orthonormal_frame: parallel inputs");
    Vec3 e2 = (1 / n2) * v;
    return {e1, e2, cross(e1, e2)};
}

Mat3 correction_matrix_3d(Vec3 Y1, Vec3 Y2, double I) {
    if (norm(cross(Y1, Y2)) < I / 4) throw DomainError("correction_matrix_3d: |Y1 x Y2| below I/4");
    Frame3 f = orthonormal_frame(Y1, Y2);
    return outer(f.e1, f.e1) + outer(f.e2, f.e2);
}

std::vector<Mat3> correction_matrix_3d(const std::vector<Vec3>& Y1, const std::vector<Vec3>& Y2, double I) {
    if (Y1.size() != Y2.size()) throw ConfigError("correction_matrix_3d: size mismatch");
    std::vector<Mat3> out(Y1.size());
    for (std::size_t k = 0; k < Y1.size(); ++k) out[k] = correction_matrix_3d(Y1[k], Y2[k], I);
    return out;
}

double agoal_residual(const Mat3& A, Vec3 Y1, Vec3 Y2, const Mat3& Omega) {
    Frame3 f = orthonormal_frame(Y1, Y2);
    Vec3 w = q_inverse(Omega);
    Mat3 PV = q_map(dot(w, f.e1) * f.e1 + dot(w, f.e2) * f.e2);
    Vec3 n = cross(Y1, Y2);
    double r = 0;
    r = std::max(r, norm(A * (PV * Y1)));
    r = std::max(r, norm(A * (PV * Y2)));
    r = std::max(r, norm(A * (Omega * n) - Omega * n));
    r = std::max(r, norm(A * Y1 - Y1));
    r = std::max(r, norm(A * Y2 - Y2));
    return r;
}

double a3_identity_residual(const Mat3& G, Vec3 Y1, Vec3 Y2) {
    Frame3 f = orthonormal_frame(Y1, Y2);
    Vec3 w = q_inverse(G - transpose(G));
    return std::abs(dot(w, f.e3) - (dot(G * f.e1, f.e2) - dot(G * f.e2, f.e1)));
}

double graduT_identity_3d(const Mat3& G, Vec3 Y1, Vec3 Y2) {
    if (std::abs(trace(G)) > 1e-10 * std::max(1.0, max_abs(G))) throw DomainError("graduT_identity_3d: grad u is not trace free");
    Vec3 lhs = transpose(G) * cross(Y1, Y2);
    Vec3 rhs = cross(Y2, G * Y1) + cross(G * Y2, Y1);
    return norm(lhs - rhs);
}

MatrixField corrected_gradient(const MatrixField& gradU, const ScalarField& omega, const MatrixField& A) {
    if (gradU.size() != omega.size() || gradU.size() != A.size() || gradU.grid.n != omega.grid.n)
        throw ConfigError("corrected_gradient: shape mismatch");
    MatrixField out(gradU.grid);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = gradU[k] - omega[k] * A[k];
    return out;
}

Mat3 corrected_gradient(const Mat3& gradU, const Mat3& A, const Mat3& Omega) { return gradU - A * Omega; }

}  // namespace striate
