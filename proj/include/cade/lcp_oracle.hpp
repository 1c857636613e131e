#pragma once

#include <cstdint>
#include <stdexcept>

#include "cade/ade_core.hpp"
#include "cade/grid.hpp"

namespace cade {

/// Discrete complementarity system, with A u = -eta1 lap_h(u) + eta2 u:
///   max(min(A u - f, u - lower), u - upper) = 0   (interior)
///   u = g                                       (boundary)
/// Absent bounds drop out. With only a lower bound this is
/// min(A u - f, u - lower) = 0.
struct LcpInstance {
    OperatorCoeffs coeffs;
    ScalarField f;
    SweepBounds bounds;
    BoundaryData g;

    const GridSpec& grid() const { return f.grid(); }
    void validate() const;
};

/// Raised when projected Gauss-Seidel hits its sweep cap.
class OracleNotConverged : public std::runtime_error {
public:
    OracleNotConverged(int sweeps, double last_update, double residual);
    int sweeps() const { return sweeps_; }
    double last_update() const { return last_update_; }
    double residual() const { return residual_; }

private:
    int sweeps_;
    double last_update_;
    double residual_;
};

/// Reference solver: projected Gauss-Seidel in lexicographic order, swept until
/// the sup-norm change of one sweep drops below `tol`.
ScalarField oracle_solve(const LcpInstance& inst, double tol = 1e-13, int cap = 2'000'000);

/// Sup over interior nodes of |max(min(A u - f, u - lower), u - upper)|.
double complementarity_residual(const ScalarField& u, const LcpInstance& inst);

/// Random well-posed instance for oracle cross-checks: eta = (1, 0), f uniform
/// in [-20, 20], smooth random boundary data, and a smooth random lower bound
/// lying below the boundary data. With `with_upper` a smooth upper bound above
/// both is added. Grid is [0,1] or [0,1]^2 with `cells` per axis.
LcpInstance random_instance(std::uint64_t seed, int cells, int dim, bool with_upper = false);

}  // namespace cade
