#include "striate/pairsum.hpp"

#include "striate/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace striate::pairsum {

void radial(const double* tx, const double* ty, std::size_t nt, const Sources& s,
            double r2_skip, double* outx, double* outy) {
    const double* sx = s.x.data();
    const double* sy = s.y.data();
    const double* w = s.w.data();
    const std::size_t ns = s.size();
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t t = 0; t < nt; ++t) {
        const double px = tx[t], py = ty[t];
        double ax = 0, ay = 0;
#pragma omp simd reduction(+ : ax, ay)
        for (std::size_t j = 0; j < ns; ++j) {
            double dx = px - sx[j], dy = py - sy[j];
            double r2 = dx * dx + dy * dy;
            double c = r2 > r2_skip ? w[j] / r2 : 0.0;
            ax += c * dx;
            ay += c * dy;
        }
        outx[t] = ax;
        outy[t] = ay;
    }
}

void radial_blob(const double* tx, const double* ty, std::size_t nt, const Sources& s,
                 double delta, double* outx, double* outy) {
    const double* sx = s.x.data();
    const double* sy = s.y.data();
    const double* w = s.w.data();
    const std::size_t ns = s.size();
    const double d2 = delta * delta;

    // bins of width delta for the few pairs inside a blob core
    double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
    for (std::size_t j = 0; j < ns; ++j) {
        xmin = std::min(xmin, sx[j]); xmax = std::max(xmax, sx[j]);
        ymin = std::min(ymin, sy[j]); ymax = std::max(ymax, sy[j]);
    }
    const int bx = ns ? int((xmax - xmin) / delta) + 1 : 1;
    const int by = ns ? int((ymax - ymin) / delta) + 1 : 1;
    std::vector<std::size_t> start(std::size_t(bx) * by + 1, 0), order(ns);
    auto bin_of = [&](double x, double y) {
        return std::size_t(int((y - ymin) / delta)) * bx + std::size_t(int((x - xmin) / delta));
    };
    for (std::size_t j = 0; j < ns; ++j) ++start[bin_of(sx[j], sy[j]) + 1];
    for (std::size_t b = 0; b + 1 < start.size(); ++b) start[b + 1] += start[b];
    {
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t j = 0; j < ns; ++j) order[fill[bin_of(sx[j], sy[j])]++] = j;
    }

#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t t = 0; t < nt; ++t) {
        const double px = tx[t], py = ty[t];
        double ax = 0, ay = 0;
#pragma omp simd reduction(+ : ax, ay)
        for (std::size_t j = 0; j < ns; ++j) {
            double dx = px - sx[j], dy = py - sy[j];
            double r2 = dx * dx + dy * dy;
            double c = r2 >= d2 ? w[j] / r2 : 0.0;
            ax += c * dx;
            ay += c * dy;
        }
        int ci = int(std::floor((px - xmin) / delta)), cj = int(std::floor((py - ymin) / delta));
        for (int bj = std::max(cj - 1, 0); bj <= std::min(cj + 1, by - 1); ++bj)
            for (int bi = std::max(ci - 1, 0); bi <= std::min(ci + 1, bx - 1); ++bi) {
                std::size_t b = std::size_t(bj) * bx + bi;
                for (std::size_t k = start[b]; k < start[b + 1]; ++k) {
                    std::size_t j = order[k];
                    double dx = px - sx[j], dy = py - sy[j];
                    double r2 = dx * dx + dy * dy;
                    if (r2 < d2 && r2 > 0) {
                        double c = w[j] * mollifier_mass(std::sqrt(r2 / d2)) / r2;
                        ax += c * dx;
                        ay += c * dy;
                    }
                }
            }
        outx[t] = ax;
        outy[t] = ay;
    }
}

void hessian_like(const double* tx, const double* ty, std::size_t nt, const Sources& s,
                  double r2_skip, double* p, double* q) {
    const double* sx = s.x.data();
    const double* sy = s.y.data();
    const double* w = s.w.data();
    const std::size_t ns = s.size();
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t t = 0; t < nt; ++t) {
        const double px = tx[t], py = ty[t];
        double ap = 0, aq = 0;
#pragma omp simd reduction(+ : ap, aq)
        for (std::size_t j = 0; j < ns; ++j) {
            double dx = px - sx[j], dy = py - sy[j];
            double r2 = dx * dx + dy * dy;
            double c = r2 > r2_skip ? w[j] / (r2 * r2) : 0.0;
            ap += c * 2 * dx * dy;
            aq += c * (dy * dy - dx * dx);
        }
        p[t] = ap;
        q[t] = aq;
    }
}

}  // namespace striate::pairsum
