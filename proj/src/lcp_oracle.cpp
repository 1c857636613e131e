#include "cade/lcp_oracle.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace cade {

void LcpInstance::validate() const {
    coeffs.validate();
    require_same_grid(g.grid(), f.grid(), "boundary data");
    if (f.has_nan()) throw InvalidArgument("source contains NaN");
    bounds.validate(f.grid());
}

namespace {

std::string describe(int sweeps, double update, double residual) {
    std::ostringstream os;
    os << "projected Gauss-Seidel did not converge in " << sweeps
       << " sweeps (last update " << update << ", residual " << residual << ")";
    return os.str();
}

}  // namespace

OracleNotConverged::OracleNotConverged(int sweeps, double last_update, double residual)
    : std::runtime_error(describe(sweeps, last_update, residual)),
      sweeps_(sweeps),
      last_update_(last_update),
      residual_(residual) {}

ScalarField oracle_solve(const LcpInstance& inst, double tol, int cap) {
    inst.validate();
    const GridSpec& grid = inst.grid();
    const double h2 = grid.dx() * grid.dx();
    const double diag = 2.0 * grid.dim() * inst.coeffs.eta1 / h2 + inst.coeffs.eta2;
    const double off = inst.coeffs.eta1 / h2;
    const auto* lower = inst.bounds.lower ? &*inst.bounds.lower : nullptr;
    const auto* upper = inst.bounds.upper ? &*inst.bounds.upper : nullptr;

    ScalarField u = interp_boundary_lift(inst.g);
    auto project = [&](std::size_t k, double v) {
        if (lower) v = std::max((*lower)[k], v);
        if (upper) v = std::min((*upper)[k], v);
        return v;
    };
    for (std::size_t k = 0; k < u.size(); ++k)
        if (!grid.is_boundary(k)) u[k] = project(k, u[k]);

    const int mx = grid.cells(0);
    const int my = grid.dim() == 2 ? grid.cells(1) : 2;
    double update = 0.0;
    for (int sweep = 1; sweep <= cap; ++sweep) {
        update = 0.0;
        for (int j = (grid.dim() == 2 ? 1 : 0); j < (grid.dim() == 2 ? my : 1); ++j) {
            for (int i = 1; i < mx; ++i) {
                const std::size_t k = grid.index(i, j);
                double nbrs = u(i - 1, j) + u(i + 1, j);
                if (grid.dim() == 2) nbrs += u(i, j - 1) + u(i, j + 1);
                const double v = project(k, (inst.f[k] + off * nbrs) / diag);
                update = std::max(update, std::abs(v - u[k]));
                u[k] = v;
            }
        }
        if (update < tol) return u;
    }
    throw OracleNotConverged(cap, update, complementarity_residual(u, inst));
}

double complementarity_residual(const ScalarField& u, const LcpInstance& inst) {
    require_same_grid(u.grid(), inst.grid(), "residual field");
    const ScalarField lap = laplacian_h(u);
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u.grid().is_boundary(k)) continue;
        double r = -inst.coeffs.eta1 * lap[k] + inst.coeffs.eta2 * u[k] - inst.f[k];
        if (inst.bounds.lower) r = std::min(r, u[k] - (*inst.bounds.lower)[k]);
        if (inst.bounds.upper) r = std::max(r, u[k] - (*inst.bounds.upper)[k]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

namespace {

// a0 + sum_k a_k sin(k pi x + b_k) (times the same in y for 2D), k = 1..3.
std::function<double(double, double)> smooth_random(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> amp(-scale, scale);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::array<double, 4> ax{}, ay{};
    std::array<double, 4> px{}, py{};
    for (int k = 0; k < 4; ++k) {
        ax[k] = amp(rng);
        ay[k] = amp(rng);
        px[k] = phase(rng);
        py[k] = phase(rng);
    }
    return [ax, ay, px, py](double x, double y) {
        double sx = ax[0];
        double sy = ay[0];
        for (int k = 1; k < 4; ++k) {
            sx += ax[k] * std::sin(k * std::numbers::pi * x + px[k]);
            sy += ay[k] * std::sin(k * std::numbers::pi * y + py[k]);
        }
        return sx + sy;
    };
}

}  // namespace

LcpInstance random_instance(std::uint64_t seed, int cells, int dim, bool with_upper) {
    std::mt19937_64 rng(seed);
    const GridSpec grid = dim == 1 ? GridSpec::line(0.0, 1.0, cells)
                                   : GridSpec::square(0.0, 1.0, cells);
    LcpInstance inst;
    inst.coeffs = OperatorCoeffs{1.0, 0.0};

    std::uniform_real_distribution<double> unif(-20.0, 20.0);
    inst.f = ScalarField(grid);
    for (std::size_t k = 0; k < inst.f.size(); ++k) inst.f[k] = unif(rng);

    const ScalarField gfield = ScalarField::sample(grid, smooth_random(rng, 0.5));
    inst.g = BoundaryData::trace(gfield);

    ScalarField psi = ScalarField::sample(grid, smooth_random(rng, 1.0));
    double excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < psi.size(); ++k)
        if (grid.is_boundary(k)) excess = std::max(excess, psi[k] - gfield[k]);
    for (auto& v : psi.values()) v -= excess + 0.05;
    inst.bounds.lower = psi;

    if (with_upper) {
        // Pointwise max keeps phi above psi and the boundary data while leaving
        // it low enough to bind somewhere.
        ScalarField phi = ScalarField::sample(grid, smooth_random(rng, 0.25));
        for (std::size_t k = 0; k < phi.size(); ++k) {
            phi[k] = std::max(phi[k], psi[k] + 0.1);
            if (grid.is_boundary(k)) phi[k] = std::max(phi[k], gfield[k] + 0.05);
        }
        inst.bounds.upper = phi;
    }
    return inst;
}

}  // namespace cade
