#include "cade/ade_core.hpp"

#include <algorithm>
#include <cmath>

namespace cade {

void OperatorCoeffs::validate() const {
    if (!(eta1 > 0.0) || !std::isfinite(eta1)) throw InvalidArgument("eta1 must be > 0");
    if (!(eta2 >= 0.0) || !std::isfinite(eta2)) throw InvalidArgument("eta2 must be >= 0");
}

void SweepBounds::validate(const GridSpec& grid) const {
    if (lower) {
        require_same_grid(lower->grid(), grid, "lower bound");
        if (lower->has_nan()) throw InvalidArgument("lower bound contains NaN");
    }
    if (upper) {
        require_same_grid(upper->grid(), grid, "upper bound");
        if (upper->has_nan()) throw InvalidArgument("upper bound contains NaN");
    }
    if (lower && upper) {
        for (std::size_t k = 0; k < lower->size(); ++k)
            if ((*lower)[k] > (*upper)[k])
                throw InvalidArgument("lower bound exceeds upper bound at node " +
                                      std::to_string(k));
    }
}

double zeta(const OperatorCoeffs& coeffs, double dt, double dx, int dim) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
    if (!(dx > 0.0)) throw InvalidArgument("dx must be > 0");
    coeffs.validate();
    return 1.0 / (1.0 + dim * dt * coeffs.eta1 / (dx * dx) + dt * coeffs.eta2 / 2.0);
}

CadeStepper::CadeStepper(const OperatorCoeffs& coeffs, SweepBounds bounds, BoundaryData g,
                         double dt, SweepCount sweeps)
    : coeffs_(coeffs), bounds_(std::move(bounds)), g_(std::move(g)), dt_(dt), sweeps_(sweeps) {
    coeffs_.validate();
    const GridSpec& grid = g_.grid();
    bounds_.validate(grid);
    zeta_ = cade::zeta(coeffs_, dt_, grid.dx(), grid.dim());
    ratio_ = dt_ * coeffs_.eta1 / (grid.dx() * grid.dx());
    reaction_ = dt_ * coeffs_.eta2 / 2.0;
}

double CadeStepper::clamp(std::size_t k, double v) const {
    if (bounds_.lower) v = std::max((*bounds_.lower)[k], v);
    if (bounds_.upper) v = std::min((*bounds_.upper)[k], v);
    return v;
}

void CadeStepper::sweep_1d(const ScalarField& u_n, const ScalarField& f, bool forward,
                           ScalarField& out) const {
    const int m = u_n.grid().cells(0);
    const int s = forward ? 1 : -1;
    const int first = forward ? 1 : m - 1;
    for (int n = 0, i = first; n < m - 1; ++n, i += s) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        const double bracket = out[k - s] - u_n[k] + u_n[k + s];
        const double v = zeta_ * (u_n[k] + dt_ * f[k] + ratio_ * bracket - reaction_ * u_n[k]);
        out[k] = clamp(static_cast<std::size_t>(k), v);
    }
}

// sx, sy give the traversal direction along each axis; the trailing neighbour
// along x is (i - sx, j) and along y is (i, j - sy).
void CadeStepper::sweep_2d(const ScalarField& u_n, const ScalarField& f, int sx, int sy,
                           ScalarField& out) const {
    const GridSpec& g = u_n.grid();
    const int mx = g.cells(0);
    const int my = g.cells(1);
    const auto stride = static_cast<std::ptrdiff_t>(g.nodes(0));
    const std::ptrdiff_t tx = -sx;
    const std::ptrdiff_t ty = -sy * stride;
    for (int nj = 0, j = sy > 0 ? 1 : my - 1; nj < my - 1; ++nj, j += sy) {
        for (int ni = 0, i = sx > 0 ? 1 : mx - 1; ni < mx - 1; ++ni, i += sx) {
            const auto k = static_cast<std::ptrdiff_t>(g.index(i, j));
            const double bracket = out[k + tx] + out[k + ty] - 2.0 * u_n[k] + u_n[k - tx] +
                                   u_n[k - ty];
            const double v =
                zeta_ * (u_n[k] + dt_ * f[k] + ratio_ * bracket - reaction_ * u_n[k]);
            out[k] = clamp(static_cast<std::size_t>(k), v);
        }
    }
}

ScalarField CadeStepper::step(const ScalarField& u_n, const ScalarField& f) const {
    const GridSpec& grid = g_.grid();
    require_same_grid(u_n.grid(), grid, "u_n");
    require_same_grid(f.grid(), grid, "source");
    if (u_n.has_nan()) throw InvalidArgument("u_n contains NaN");
    if (f.has_nan()) throw InvalidArgument("source contains NaN");

    ScalarField result(grid);
    if (grid.dim() == 1) {
        ScalarField a = u_n;
        ScalarField b = u_n;
        g_.apply(a);
        g_.apply(b);
        sweep_1d(u_n, f, true, a);
        sweep_1d(u_n, f, false, b);
        for (std::size_t k = 0; k < result.size(); ++k) result[k] = 0.5 * (a[k] + b[k]);
    } else {
        static constexpr int dirs2[2][2] = {{1, 1}, {-1, -1}};
        static constexpr int dirs4[4][2] = {{1, 1}, {-1, -1}, {-1, 1}, {1, -1}};
        const int count = sweeps_ == SweepCount::four ? 4 : 2;
        const auto* dirs = count == 4 ? dirs4 : dirs2;
        ScalarField work(grid);
        for (int s = 0; s < count; ++s) {
            work = u_n;
            g_.apply(work);
            sweep_2d(u_n, f, dirs[s][0], dirs[s][1], work);
            for (std::size_t k = 0; k < result.size(); ++k) result[k] += work[k];
        }
        const double inv = 1.0 / count;
        for (std::size_t k = 0; k < result.size(); ++k) result[k] *= inv;
    }
    g_.apply(result);
    return result;
}

ScalarField cade_step(const OperatorCoeffs& coeffs, const ScalarField& u_n, const ScalarField& f,
                      const SweepBounds& bounds, const BoundaryData& g, double dt,
                      SweepCount sweeps) {
    return CadeStepper(coeffs, bounds, g, dt, sweeps).step(u_n, f);
}

}  // namespace cade
