#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "striate/field.hpp"

namespace striate {

// d - 1 vectors in R^d: Y^perp in 2D, Y1 x Y2 in 3D
inline Vec2 wedge(Vec2 y1) { return perp(y1); }
inline Vec3 wedge(Vec3 y1, Vec3 y2) { return cross(y1, y2); }
std::vector<double> wedge(const std::vector<std::vector<double>>& vs);

// min over samples of max over members of |Y|. Empty family throws; an optional mask
// restricts the samples.
double family_infimum(const std::vector<VectorField>& family, const std::vector<char>* mask = nullptr);
// 3D: members sampled at common points; min of the |Y| branch and the |Y x Y'| branch.
double family_infimum(const std::vector<std::vector<Vec3>>& family);

struct SerfatiResult {
    double lhs = 0;    // |B|
    double bound = 0;
    double P1 = 0, P2 = 0;
    bool holds = true;
};

// |B| <= 2 |M|^3 / |det M|^2 |B M1| + |tr B| for symmetric B, invertible M
SerfatiResult serfati_bound_2d(Mat2 B, Mat2 M);
// right-hand side with |det M| to the first power
double serfati_rhs_2d_literal(Mat2 B, Mat2 M);

// Constructive bound for M whose last column is its last cofactor column:
//   |B| <= P1(M)/det(M)^2 sum_{i<d} |B M_i| + P2(M)/|det M| |tr B|
// from B = cof(M) D cof(M)^T / det(M)^2, D = M^T B M, with D_dd replaced through
//   M_d . B M_d = det(M) tr B - sum_{i<d} cof_i . B M_i.
// P1 is homogeneous of degree 4d - 5 and P2 of degree 2d - 2 in M_1..M_{d-1}.
SerfatiResult serfati_bound_general(Mat2 B, Mat2 M);
SerfatiResult serfati_bound_general(const Mat3& B, const Mat3& M);

struct FuzzReport {
    int dim = 2;
    std::uint64_t trials = 0;
    std::uint64_t violations = 0;
    std::uint64_t literal_violations = 0;  // 2D only: first-power determinant form
    std::uint64_t degenerate = 0;          // |det M| below 1e-12 of its scale; skipped
    double worst_ratio = 0;                // max |B| / bound
};
FuzzReport serfati_fuzz(int dim, std::uint64_t trials, std::uint64_t seed);

// |grad u(x)| <= |B|/2 + |Omega|/2 with B = grad u + grad u^T, B Y = 2 (Y . grad u) - Omega Y,
// tr B = 0; the member of largest magnitude supplies M = (Y | Y^perp).
double gradient_linf_bound(const std::vector<Vec2>& Y, Mat2 Omega, const std::vector<Vec2>& Ygradu);

// Brick partition of unity at scale R: phi_jk(x) = psi(x2/R - j) psi(x1/R - k - j/2), with
// psi(t) + psi(t - 1) = 1, psi = 1 on |t| <= 1/2 - delta, 0 for |t| >= 1/2 + delta.
// Rows are offset by half a cell so at most three bumps meet at any point.
struct Bump {
    int row = 0, col = 0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // support box
};

class Partition2D {
public:
    Partition2D(double R, double lo, double hi, double delta = 0.125);
    double R() const { return R_; }
    const std::vector<Bump>& bumps() const { return bumps_; }
    double value(std::size_t n, Vec2 x) const;
    // (index, value) of the bumps nonzero at x
    std::vector<std::pair<std::size_t, double>> active(Vec2 x) const;
    std::string manifest(const std::vector<int>* labels = nullptr) const;

private:
    double R_, lo_, hi_, delta_;
    int row0_ = 0, nrow_ = 0;
    std::vector<int> col0_, ncol_, first_;
    std::vector<Bump> bumps_;
    double psi(double t) const;
    long find(int row, int col) const;
};

// Throws ConfigError when R is below four grid spacings.
Partition2D partition_of_unity_2d(double R, const Grid2D& box);

// Greedy member choice per bump: the member maximizing min |Y| over the grid points where
// the bump is positive, lowest label on ties. Throws DomainError if the best is <= I/2.
std::vector<int> select_members(const std::vector<VectorField>& family, const Partition2D& P, double I);

// A_n = |Y|^-2 [[Y1 Y2, -Y1^2], [Y2^2, -Y1 Y2]]; A_n Y = 0, A_n Y^perp = -Y.
Mat2 correction_block(Vec2 Y);

// A(x) = sum_n phi_n(eta^-1(x)) A_n(Y_n(x)) with Y_n the selected members at the current
// time. eta_inv null means the identity map.
MatrixField correction_matrix_2d(const std::vector<VectorField>& family, const Partition2D& P,
                                 const std::vector<int>& labels, const VectorField* eta_inv = nullptr);
// sum_n phi_n(eta^-1) |Y_n|^-2 Y_n (x) Y_n, so that omega A = (this) Omega
MatrixField projector_sum_2d(const std::vector<VectorField>& family, const Partition2D& P,
                             const std::vector<int>& labels, const VectorField* eta_inv = nullptr);

// 3D
Mat3 q_map(Vec3 phi);
Vec3 q_inverse(const Mat3& Omega);  // DomainError unless antisymmetric to 1e-12 relative

struct Frame3 {
    Vec3 e1, e2, e3;
};
// modified Gram-Schmidt; DomainError for parallel inputs
Frame3 orthonormal_frame(Vec3 Y1, Vec3 Y2);

// A = e1 (x) e1 + e2 (x) e2 from the orthonormalized pair. DomainError if |Y1 x Y2| < I/4.
Mat3 correction_matrix_3d(Vec3 Y1, Vec3 Y2, double I);
std::vector<Mat3> correction_matrix_3d(const std::vector<Vec3>& Y1, const std::vector<Vec3>& Y2, double I);

// Largest residual among A P_V Omega Y_j = 0, A Omega (Y1 x Y2) = Omega (Y1 x Y2) and
// A Y_j = Y_j, with V = span{Y1, Y2}.
double agoal_residual(const Mat3& A, Vec3 Y1, Vec3 Y2, const Mat3& Omega);

// |omega . e3 - ((grad u e1) . e2 - (grad u e2) . e1)| in the orthonormalized frame.
double a3_identity_residual(const Mat3& gradU, Vec3 Y1, Vec3 Y2);

// |(grad u)^T (Y1 x Y2) - [Y2 x (grad u Y1) + (grad u Y2) x Y1]|; DomainError if tr grad u != 0.
double graduT_identity_3d(const Mat3& gradU, Vec3 Y1, Vec3 Y2);

// grad u - omega A (2D)
MatrixField corrected_gradient(const MatrixField& gradU, const ScalarField& omega, const MatrixField& A);
// grad u - A Omega (3D, pointwise)
Mat3 corrected_gradient(const Mat3& gradU, const Mat3& A, const Mat3& Omega);

}  // namespace striate
