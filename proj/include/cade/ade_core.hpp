#pragma once

#include <optional>

#include "cade/grid.hpp"

namespace cade {

/// Coefficients of u_t - eta1 * lap(u) + eta2 * u = f.
struct OperatorCoeffs {
    double eta1 = 1.0;  // diffusion, > 0
    double eta2 = 0.0;  // reaction, >= 0

    void validate() const;
};

/// Optional pointwise bounds psi <= u <= phi. Entries may be -inf / +inf.
struct SweepBounds {
    std::optional<ScalarField> lower;
    std::optional<ScalarField> upper;

    /// Throws InvalidArgument on grid mismatch, NaN, or lower > upper.
    void validate(const GridSpec& grid) const;
    bool empty() const { return !lower && !upper; }
};

/// Sweep orderings averaged per step. Four is 2D only; in 1D it acts as two.
enum class SweepCount { two = 2, four = 4 };

/// zeta = (1 + D*dt*eta1/dx^2 + dt*eta2/2)^-1 with D the grid dimension.
double zeta(const OperatorCoeffs& coeffs, double dt, double dx, int dim);

/// One constrained alternating-direction-explicit step.
///
/// Each sweep visits interior nodes in a fixed order and uses the already
/// updated value of the trailing neighbour along every axis, the old value of
/// the centre and leading neighbours, and clamps the result into
/// [lower, upper]. The sweeps are averaged. Without bounds this is plain ADE.
/// Boundary nodes of the result carry `g`.
///
/// The stepper checks the bounds once on construction; step() rejects NaN in
/// u_n or f.
class CadeStepper {
public:
    CadeStepper(const OperatorCoeffs& coeffs, SweepBounds bounds, BoundaryData g, double dt,
                SweepCount sweeps = SweepCount::two);

    ScalarField step(const ScalarField& u_n, const ScalarField& f) const;

    const SweepBounds& bounds() const { return bounds_; }
    const BoundaryData& boundary() const { return g_; }
    double dt() const { return dt_; }
    double zeta() const { return zeta_; }

private:
    void sweep_1d(const ScalarField& u_n, const ScalarField& f, bool forward,
                  ScalarField& out) const;
    void sweep_2d(const ScalarField& u_n, const ScalarField& f, int sx, int sy,
                  ScalarField& out) const;
    double clamp(std::size_t k, double v) const;

    OperatorCoeffs coeffs_;
    SweepBounds bounds_;
    BoundaryData g_;
    double dt_;
    SweepCount sweeps_;
    double zeta_;
    double ratio_;     // dt * eta1 / dx^2
    double reaction_;  // dt * eta2 / 2
};

ScalarField cade_step(const OperatorCoeffs& coeffs, const ScalarField& u_n, const ScalarField& f,
                      const SweepBounds& bounds, const BoundaryData& g, double dt,
                      SweepCount sweeps = SweepCount::two);

}  // namespace cade
