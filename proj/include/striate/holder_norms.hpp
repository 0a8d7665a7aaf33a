#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "striate/field.hpp"

namespace striate {

struct Shell {
    double min_sep = 0;  // 0: default of two grid spacings
    double max_sep = 0;  // 0: default of the domain diameter
};

struct HolderReport {
    double alpha = 0.5;
    double linf = 0;
    double seminorm = 0;
    std::size_t pairs_used = 0;
    double shell_min = 0, shell_max = 0;
    double norm() const { return linf + seminorm; }
    std::string csv_row() const;
    static std::string csv_header();
};

enum class PairMode { Auto, Exhaustive, Sampled };

struct HolderOptions {
    Shell shell;
    PairMode mode = PairMode::Auto;
    std::uint64_t seed = 12345;
    int per_shell = 64;                     // random offsets per dyadic shell in sampled mode
    int near_cells = 8;                     // sampled mode is exhaustive up to this many cells
    std::size_t exhaustive_limit = 20000;   // Auto switches to sampled above this many samples
};

// Difference quotients over grid pairs. With `positions`, pairs are still enumerated by
// lattice offsets but separations are measured between the given points (Lagrangian markers).
// `mask` (optional, same size as the field) restricts both endpoints.
HolderReport holder_report(const ScalarField& f, double alpha, const HolderOptions& opt = {},
                           const std::vector<char>* mask = nullptr,
                           const std::vector<Vec2>* positions = nullptr);
HolderReport holder_report(const VectorField& f, double alpha, const HolderOptions& opt = {},
                           const std::vector<char>* mask = nullptr,
                           const std::vector<Vec2>* positions = nullptr);
HolderReport holder_report(const MatrixField& f, double alpha, const HolderOptions& opt = {},
                           const std::vector<char>* mask = nullptr,
                           const std::vector<Vec2>* positions = nullptr);

// Unstructured samples: exhaustive up to exhaustive_limit points, otherwise seeded random pairs.
HolderReport holder_report_points(const std::vector<Vec2>& pts, const std::vector<double>& vals,
                                  double alpha, const HolderOptions& opt = {});

template <class T>
HolderReport local_holder(const GridField<T>& f, const std::vector<char>& mask, double beta,
                          const HolderOptions& opt = {}) {
    std::size_t c = 0;
    for (char m : mask) c += m != 0;
    if (c < 2) throw ConfigError("local_holder: mask selects fewer than two points");
    return holder_report(f, beta, opt, &mask);
}

struct NegHolderReport {
    double alpha = 0.5;
    double value = 0;
    std::string method = "potential_estimate";
    HolderReport potential;  // report of v = grad F2 * div Z
};

// v = grad F2 * div Z by midpoint quadrature (self cell skipped); returns the C^alpha norm of v.
// div Z defaults to 4th-order centered differences of Z.
NegHolderReport neg_holder_estimate(const VectorField& Z, double alpha,
                                    const ScalarField* divZ = nullptr,
                                    const HolderOptions& opt = {});
VectorField neg_holder_potential(const ScalarField& divZ);

// |gamma|_inf + |gamma'|_inf + seminorm of gamma' in arc length. Closed curve by default;
// a nonzero period makes sample n equal to sample 0 shifted by it.
double curve_c1alpha_norm(const std::vector<Vec2>& curve, double alpha, Vec2 period = {});

}  // namespace striate
