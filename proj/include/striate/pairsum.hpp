#pragma once

#include <cstddef>
#include <vector>

// All-pairs inner loops. Sources with zero weight should be dropped by the caller.

namespace striate::pairsum {

struct Sources {
    std::vector<double> x, y, w;
    std::size_t size() const { return w.size(); }
    void push(double px, double py, double pw) { x.push_back(px); y.push_back(py); w.push_back(pw); }
};

// out = sum_j w_j (t - y_j) / |t - y_j|^2, pairs closer than sqrt(r2_skip) dropped
void radial(const double* tx, const double* ty, std::size_t nt, const Sources& s,
            double r2_skip, double* outx, double* outy);

// same, each term scaled by the mollifier mass inside |t - y_j| / delta (vortex blobs)
void radial_blob(const double* tx, const double* ty, std::size_t nt, const Sources& s,
                 double delta, double* outx, double* outy);

// p = sum_j w_j 2 d1 d2 / |d|^4, q = sum_j w_j (d2^2 - d1^2) / |d|^4, d = t - y_j;
// 2pi grad K = [[p, q], [q, -p]] when summed against omega
void hessian_like(const double* tx, const double* ty, std::size_t nt, const Sources& s,
                  double r2_skip, double* p, double* q);

}  // namespace striate::pairsum
