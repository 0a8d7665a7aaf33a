#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "striate/field.hpp"

namespace striate {

using VectorFn = std::function<Vec2(Vec2)>;
using ScalarFn2 = std::function<double(Vec2)>;

// Lagrangian state on a reference lattice; the lattice doubles as the Eulerian grid.
struct FlowState {
    double t = 0;
    VectorField markers;   // eta(t, x_i)
    MatrixField grad_eta;  // lattice differences of the markers
    VectorField inv;       // eta^-1(t, x) on the grid, valid when inv_t == t
    double inv_t = -1;
    struct Step {
        double t0, dt;
    };
    std::vector<Step> steps;  // completed steps, in order; the inverse map retraces them

    const Grid2D& grid() const { return markers.grid; }
    bool inverse_current() const { return inv_t == t; }
};

FlowState initial_state(const Grid2D& g);

class VelocityProvider {
public:
    virtual ~VelocityProvider() = default;
    // velocity at the markers (stage positions at time t); stage 0..3 of the RK4 step
    virtual std::vector<Vec2> at_markers(double t, int stage, const std::vector<Vec2>& pos) = 0;
    // velocity at x for a time already visited (used by back-tracking)
    virtual Vec2 at(double t, Vec2 x) const = 0;
    // forget anything recorded after time t (step retried with a smaller dt)
    virtual void rollback(double) {}
    // make at(s.t, .) available before back-tracking from the current state
    virtual void prepare(const FlowState&) {}
};

// u(t, x) given in closed form
class PrescribedVelocity : public VelocityProvider {
public:
    explicit PrescribedVelocity(std::function<Vec2(double, Vec2)> u) : u_(std::move(u)) {}
    std::vector<Vec2> at_markers(double t, int stage, const std::vector<Vec2>& pos) override;
    Vec2 at(double t, Vec2 x) const override { return u_(t, x); }

private:
    std::function<Vec2(double, Vec2)> u_;
};

// Vortex blobs carried by the markers: u(x) = sum_i K_delta(x - eta_i) omega0(x_i) s^2.
// The velocity is summed on a stride-2 grid over the box and a stride-4 ring out to the
// safety box, then interpolated bicubically. Grids at step starts and midpoints are kept for
// back-tracking. Markers leaving the safety box abort the run.
class BlobVelocity : public VelocityProvider {
public:
    // safety_half_width 0 selects sqrt(2) times the box half-width plus a quarter of it
    BlobVelocity(const FlowState& s0, const ScalarField& omega0, double delta, double safety_half_width = 0);
    std::vector<Vec2> at_markers(double t, int stage, const std::vector<Vec2>& pos) override;
    Vec2 at(double t, Vec2 x) const override;
    void rollback(double t) override;

    // direct summation at arbitrary points from marker positions
    std::vector<Vec2> direct(const std::vector<Vec2>& markers, const std::vector<Vec2>& pts) const;
    void prepare(const FlowState& s) override;
    double delta() const { return delta_; }
    double safety() const { return safety_; }
    std::size_t sources() const { return idx_.size(); }

private:
    struct Grids {
        double t;
        VectorField fine, coarse;
    };
    std::vector<std::size_t> idx_;
    std::vector<double> w_;
    double delta_, safety_;
    Grid2D fine_, coarse_;
    std::vector<Grids> hist_;
    Grids build(double t, const std::vector<Vec2>& pos) const;
    Vec2 interp(const Grids& G, Vec2 x) const;
    const Grids* find(double t) const;
    void keep(Grids&& G);
};

struct AdvanceOptions {
    double volume_tol = 1e-3;
    int max_halvings = 4;
};

// One RK4 step of every marker, then grad_eta. If |det grad eta - 1| exceeds volume_tol the
// step is retried as two half steps (up to max_halvings deep); beyond that NumericalAbort.
void advance(FlowState& s, VelocityProvider& u, double dt, const AdvanceOptions& opt = {});

double volume_drift(const FlowState& s);  // max |det grad eta - 1|
double grad_eta_linf(const FlowState& s);
double grad_eta_inv_linf(const FlowState& s);  // needs the inverse map

// eta^-1(t, .) on the grid by retracing the recorded steps backwards from each grid point.
void compute_inverse(FlowState& s, VelocityProvider& u);
// |eta(eta^-1(x)) - x| over grid points whose preimage lies inside the lattice
double inverse_identity_defect(const FlowState& s);

// Y(t, eta(t, x_i)) = grad eta(t, x_i) Y0(x_i), aligned with the markers
std::vector<Vec2> pushforward_markers(const VectorFn& Y0, const FlowState& s);
// Y(t, x) = (grad eta^-1(t, x))^-1 Y0(eta^-1(t, x)) on the grid
VectorField pushforward(const VectorFn& Y0, const FlowState& s);
VectorField pushforward(const VectorField& Y0, const FlowState& s);

// f(t, x) = f0(eta^-1(t, x)), bicubic on the initial grid
ScalarField transport_scalar(const ScalarField& f0, const FlowState& s);
ScalarField transport_scalar(const ScalarFn2& f0, const FlowState& s);

// discrete convolution with rho_delta, weights normalized to sum 1, edge values replicated.
// ConfigError when delta is below the spacing.
ScalarField mollify(const ScalarField& f, double delta);
VectorField mollify(const VectorField& f, double delta);

struct ConvergenceRow {
    double delta;
    double distance;  // C^alpha norm of mollify(f, delta) - f
    double seminorm;  // Holder seminorm of mollify(f, delta)
};
std::vector<ConvergenceRow> convergence_study(const ScalarField& f, const std::vector<double>& deltas,
                                              double alpha);

// R0 = omega_eps Y0 + rho_eps * grad F2 * div(omega0 Y0) - rho_eps * (omega0 Y0), with
// omega_eps = rho_eps * omega0. ConfigError when div_wY is null.
VectorField r0_correction(const ScalarField& omega0, const VectorField& Y0, double eps, const ScalarField* div_wY);
// (rho_eps * omega0) Y0 - rho_eps * (omega0 Y0)
VectorField mollifier_commutator(const ScalarField& omega0, const VectorField& Y0, double eps);

}  // namespace striate
