#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "striate/biot_savart.hpp"
#include "striate/flow_transport.hpp"
#include "striate/oracles.hpp"
#include "striate/striated_algebra.hpp"

namespace striate {

// Plain `key = value` lines, `#` comments, `[section]` headers (cosmetic: keys are unique).
// Unknown keys, malformed values and out-of-range settings raise ConfigError.
struct RunConfig {
    int N = 128;
    double L = 1.5;
    double alpha = 0.5;
    double dt = 0.01;
    double T = 1.0;
    std::string profile = "patch(1)";
    std::vector<std::string> family{"tangent", "core(0.8)"};
    double eps = 0;          // initial-data mollification; 0 selects 6 spacings
    double blob = 0;         // vortex-blob radius; 0 selects 4 spacings
    double partition_R = 0.25;
    int cadence = 10;        // diagnostic rows per unit time
    std::uint64_t seed = 12345;
    double volume_tol = 1e-3;
    int curve_points = 256;
    std::string output;      // directory for CSV and snapshots; empty writes nothing

    double h() const { return 2 * L / N; }
    double eps_value() const { return eps > 0 ? eps : 6 * h(); }
    double blob_value() const { return blob > 0 ? blob : 4 * h(); }
    void validate() const;
};
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string to_text(const RunConfig& c);

// The data a run starts from, built from the profile and family specs.
struct InitialData {
    Grid2D grid;
    ScalarField omega0;                         // omega_{0,eps} on the grid
    std::function<double(Vec2)> omega0_fn;      // closed form of omega_{0,eps} when available
    std::optional<RadialProfile> radial;        // mollified profile for radial data
    double omega0_linf = 0;
    std::vector<std::string> member_names;
    std::vector<VectorFn> family;               // Y0 members in closed form
    std::vector<Vec2> curve0;                   // boundary level curve of the patch, if any
};
InitialData initial_data(const RunConfig& c);

struct DiagnosticsRow {
    double t = 0;
    double gradu_linf = 0, u_linf = 0, V = 0, V_current = 0;
    double Y_calpha = 0, divY_calpha = 0, div_omegaY_neg = 0, Ygradu_calpha = 0;
    double grad_eta = 0, grad_eta_inv = 0, IY = 0;
    double A_calpha = 0, corrected_calpha = 0, boundary_c1alpha = 0;
    double omega_l1 = 0, omega_l2 = 0, omega_linf = 0, volume_drift = 0;

    // column names carry the bound each column is measured against, as name[bound]
    static const std::vector<std::string>& header();
    std::vector<double> values() const;
};
// NumericalAbort naming the first non-finite column
void check_row(const DiagnosticsRow& r);
std::string csv_header();
std::string csv_line(const std::vector<double>& values);  // %.17g, comma separated
std::string to_csv(const std::vector<DiagnosticsRow>& rows);

// What a row hook sees: the committed state at an output time.
struct RunView {
    const RunConfig& config;
    const InitialData& data;
    const FlowState& state;
    const BlobVelocity& velocity;
    const ScalarField& omega;
    const std::vector<VectorField>& family;
    const DiagnosticsRow& row;
};
using RowHook = std::function<void(const RunView&)>;

struct RunResult {
    std::vector<DiagnosticsRow> rows;
    double I0 = 0;
};
// Mollified data, RK4 blob flow, pushed family, one row per output time. Snapshots of omega
// and the family at t in {0, T/2, T} when an output directory is set. NumericalAbort on
// non-finite diagnostics (no row is written); ConfigError on CFL violation.
RunResult run(const RunConfig& c, const RowHook& hook = {});

enum class EnvelopeShape { exp, double_exp };
struct EnvelopeFit {
    EnvelopeShape shape = EnvelopeShape::exp;
    double rate = 0;     // c1
    double prefactor = 0;  // c2 (exp) or c3 (double_exp)
    double slack = 10;
    bool within_envelope = true;
    double worst = 0;    // max y / envelope over the whole series
    double envelope(double t) const;
};
// Fits y <= prefactor * e^{rate t} or prefactor * exp(rate e^{rate t}) on the first quarter of
// the series (rate >= 0; the prefactor is the smallest that covers the fitted samples), then
// checks every sample against slack times the envelope. ConfigError on fewer than 4 samples or
// a strictly decreasing series.
EnvelopeFit envelope_fit(const std::vector<double>& t, const std::vector<double>& y, EnvelopeShape shape,
                         double slack = 10);

enum class GronwallDirection { forward, reverse };
struct GronwallResult {
    bool hypothesis = false;
    bool conclusion = false;  // only meaningful when the hypothesis holds
    double worst_hypothesis = 0, worst_conclusion = 0;  // largest violations, relative
};
// Trapezoid integrals on the sample times; tol absorbs the quadrature error (relative to h).
// ConfigError when h is not monotone or g is negative.
GronwallResult gronwall_check(const std::vector<double>& t, const std::vector<double>& f,
                              const std::vector<double>& g, const std::vector<double>& h,
                              GronwallDirection dir, double tol = 1e-4);

struct EquivalenceRow {
    std::string instance, member;
    int N = 0;
    double ygradu = 0;     // ||Y . grad u||_{C^alpha}
    double div_neg = 0;    // ||div(omega Y)||_{C^{alpha-1}} estimate
    double scale = 0;      // ||omega||_{L1 cap Linf} ||Y||_{C^alpha}, the common additive term
    double forward = 0;    // ygradu / (div_neg + scale)
    double backward = 0;   // div_neg / (ygradu + scale)
};
// patch + tangent member, smooth vorticity + smooth field, shear + e1; N and 2N of the config.
// Each side is controlled by the other plus the common term, so both ratios stay bounded.
std::vector<EquivalenceRow> equivalence_report(const RunConfig& c);
std::string to_csv(const std::vector<EquivalenceRow>& rows);

struct LemmaFuzzReport {
    FuzzReport fuzz;
    double min_slack = 0;  // 1 - max |B| / bound
};
// PropertyViolation on any violation
LemmaFuzzReport lemma_fuzz(int dim, std::uint64_t trials, std::uint64_t seed);

// profile and family constructors, exposed for tests
struct ProfileSpec {
    std::string kind;  // patch, ring, bump, perturbed, zero, shear
    std::vector<double> args;
    std::string file;  // shear table
};
ProfileSpec parse_profile(const std::string& s);

}  // namespace striate
