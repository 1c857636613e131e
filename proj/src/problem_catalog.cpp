#include "cade/problem_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace cade {

namespace {

using std::numbers::pi;

constexpr double kPlateauTol = 1e-9;

// psi1 and psi2 are defined on [0, 0.5] and mirrored.
double mirror(double x) { return x <= 0.5 ? x : 1.0 - x; }

double psi1(double x) {
    const double t = mirror(x);
    return t <= 0.25 ? 100.0 * t * t : 100.0 * t * (1.0 - t) - 12.5;
}

double psi2(double x) {
    const double t = mirror(x);
    return t <= 0.25 ? 10.0 * std::sin(2.0 * pi * t) : 5.0 * std::cos(pi * (4.0 * t - 1.0)) + 5.0;
}

double psi3(double x) {
    const double s = std::sin(pi * (x + 1.0) * (x + 1.0));
    return 10.0 * s * s;
}

double exact_psi1(double x) {
    const double t = mirror(x);
    const double contact = 1.0 / (2.0 * std::numbers::sqrt2);
    return t <= contact ? (100.0 - 50.0 * std::numbers::sqrt2) * t : 100.0 * t * (1.0 - t) - 12.5;
}

double psi5(double x, double y) {
    const double r2 = x * x + y * y;
    return r2 <= 1.0 ? std::sqrt(1.0 - r2) : -1.0;
}

double exact_psi5(double x, double y, double rstar) {
    const double r = std::hypot(x, y);
    if (r <= rstar) return std::sqrt(1.0 - r * r);
    return -(rstar * rstar) * std::log(r / 2.0) / std::sqrt(1.0 - rstar * rstar);
}

double exact_twophase_sym(double x) {
    if (x <= -0.5) return -4.0 * x * x - 4.0 * x - 1.0;
    if (x >= 0.5) return 4.0 * x * x - 4.0 * x + 1.0;
    return 0.0;
}

// Disjoint bumps on [0,1]^2. The disk and the segment are rasterised so they
// stay visible on coarse grids: the disk also claims the node nearest its
// centre, and the segment claims every node whose dual cell it crosses.
ScalarField sample_psi4(const GridSpec& grid) {
    const double h = grid.dx();
    ScalarField out(grid);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto [i, j] = grid.ij(k);
        const double x = grid.coord(0, i);
        const double y = grid.coord(1, j);
        double v = 0.0;
        const bool segment = std::abs(y - 0.57) <= 0.5 * h && x + 0.5 * h > 0.075 &&
                             x - 0.5 * h < 0.13;
        const bool disk = (x - 0.6) * (x - 0.6) + (y - 0.25) * (y - 0.25) < 0.001 ||
                          (std::abs(x - 0.6) <= 0.5 * h && std::abs(y - 0.25) <= 0.5 * h);
        if (segment || disk) v = 4.5;
        if (std::abs(x - 0.5) + std::abs(y - 0.6) < 0.04) v = 5.0;
        out[k] = v;
    }
    return out;
}

ProblemSpec base(std::string name, ProblemKind kind, const GridSpec& grid) {
    ProblemSpec p;
    p.name = std::move(name);
    p.kind = kind;
    p.grid = grid;
    p.f = ScalarField(grid, 0.0);
    return p;
}

ScalarField sample1d(const GridSpec& grid, double (*fn)(double)) {
    return ScalarField::sample(grid, [fn](double x, double) { return fn(x); });
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::linear: return "linear";
        case ProblemKind::nonlinear: return "nonlinear";
        case ProblemKind::double_obstacle: return "double";
        case ProblemKind::two_phase: return "two-phase";
    }
    return "unknown";
}

ProblemKind parse_problem_kind(std::string_view text) {
    if (text == "linear") return ProblemKind::linear;
    if (text == "nonlinear") return ProblemKind::nonlinear;
    if (text == "double") return ProblemKind::double_obstacle;
    if (text == "two-phase") return ProblemKind::two_phase;
    throw InvalidArgument("unknown problem kind '" + std::string(text) + "'");
}

void ProblemSpec::validate() const {
    require_same_grid(f.grid(), grid, "source");
    require_same_grid(g.grid(), grid, "boundary data");
    if (!f.all_finite()) throw InvalidArgument("source must be finite");
    if (psi) {
        require_same_grid(psi->grid(), grid, "psi");
        if (psi->has_nan()) throw InvalidArgument("psi contains NaN");
    }
    if (phi) {
        require_same_grid(phi->grid(), grid, "phi");
        if (phi->has_nan()) throw InvalidArgument("phi contains NaN");
    }
    if (psi && phi)
        for (std::size_t k = 0; k < psi->size(); ++k)
            if ((*psi)[k] > (*phi)[k]) throw InvalidArgument("psi exceeds phi");
    if (exact) require_same_grid(exact->grid(), grid, "exact solution");
    if (kind == ProblemKind::two_phase && (mu1 < 0.0 || mu2 < 0.0))
        throw InvalidArgument("two-phase forces must be nonnegative");
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "psi1",     "psi2",     "psi3",         "psi4",         "psi5",       "psi6",
        "psi6-radial", "double1d", "double2d", "twophase-sym", "twophase-asym", "line1d"};
    return names;
}

bool is_preset(std::string_view name) {
    const auto& names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

ProblemSpec preset(std::string_view name, int cells) {
    if (name == "psi1" || name == "psi2" || name == "psi3") {
        const auto grid = GridSpec::line(0.0, 1.0, cells);
        auto p = base(std::string(name), ProblemKind::linear, grid);
        if (name == "psi1") {
            p.psi = sample1d(grid, psi1);
            p.g = BoundaryData::constant(grid, 0.0);
            p.exact = exact_solution(name, grid);
        } else if (name == "psi2") {
            p.psi = sample1d(grid, psi2);
            p.g = BoundaryData::constant(grid, 0.0);
        } else {
            p.psi = sample1d(grid, psi3);
            p.g = BoundaryData::from_function(grid, [](double x, double) {
                return x < 0.5 ? 5.0 : 10.0;
            });
        }
        return p;
    }
    if (name == "psi4") {
        const auto grid = GridSpec::square(0.0, 1.0, cells);
        auto p = base("psi4", ProblemKind::linear, grid);
        p.psi = sample_psi4(grid);
        p.g = BoundaryData::constant(grid, 0.0);
        return p;
    }
    if (name == "psi5") {
        const auto grid = GridSpec::square(-2.0, 2.0, cells);
        auto p = base("psi5", ProblemKind::linear, grid);
        p.psi = ScalarField::sample(grid, psi5);
        p.exact = exact_solution(name, grid);
        p.g = BoundaryData::trace(*p.exact);
        return p;
    }
    if (name == "psi6" || name == "psi6-radial") {
        const auto grid = GridSpec::square(0.0, 1.0, cells);
        auto p = base(std::string(name), ProblemKind::nonlinear, grid);
        if (name == "psi6") {
            p.psi = ScalarField::sample(grid, [](double x, double y) {
                const double s = (x - 0.5) * (x - 0.5) + y - 0.5;
                return std::max(0.0, 0.6 - 8.0 * s * s);
            });
        } else {
            p.psi = ScalarField::sample(grid, [](double x, double y) {
                return std::max(0.0, 0.6 - 8.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
            });
        }
        p.g = BoundaryData::constant(grid, 0.0);
        return p;
    }
    if (name == "double1d") {
        const auto grid = GridSpec::line(0.0, 1.0, cells);
        auto p = base("double1d", ProblemKind::double_obstacle, grid);
        p.psi = ScalarField::sample(grid, [](double x, double) {
            return std::max(0.7 - 15.0 * (x - 0.3) * (x - 0.3), 0.0);
        });
        p.phi = ScalarField::sample(grid, [](double x, double) {
            return std::min(15.0 * (x - 0.7) * (x - 0.7) + 0.3, 1.0);
        });
        p.g = BoundaryData::from_function(grid, [](double x, double) { return x < 0.5 ? 0.0 : 1.0; });
        return p;
    }
    if (name == "double2d") {
        const auto grid = GridSpec::square(0.0, 1.0, cells);
        auto p = base("double2d", ProblemKind::double_obstacle, grid);
        p.psi = ScalarField::sample(grid, [](double x, double y) {
            return std::max(0.0, 0.95 - 35.0 * ((x - 0.25) * (x - 0.25) + (y - 0.25) * (y - 0.25)));
        });
        p.phi = ScalarField::sample(grid, [](double x, double y) {
            return std::min(1.0, 35.0 * ((x - 0.75) * (x - 0.75) + (y - 0.75) * (y - 0.75)));
        });
        p.g = BoundaryData::constant(grid, 0.5);
        return p;
    }
    if (name == "twophase-sym" || name == "twophase-asym") {
        const auto grid = GridSpec::line(-1.0, 1.0, cells);
        auto p = base(std::string(name), ProblemKind::two_phase, grid);
        p.g = BoundaryData::from_function(grid, [](double x, double) { return x < 0.0 ? -1.0 : 1.0; });
        if (name == "twophase-sym") {
            p.mu1 = p.mu2 = 8.0;
            p.exact = exact_solution(name, grid);
        } else {
            p.mu1 = 2.0;
            p.mu2 = 1.0;
        }
        return p;
    }
    if (name == "line1d") {
        // No obstacle and linear data: the discrete solution is exact up to round-off.
        const auto grid = GridSpec::line(0.0, 1.0, cells);
        auto p = base("line1d", ProblemKind::linear, grid);
        p.psi = ScalarField(grid, -std::numeric_limits<double>::infinity());
        p.g = BoundaryData::from_function(grid, [](double x, double) { return x; });
        p.exact = exact_solution(name, grid);
        return p;
    }
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

PresetDefaults preset_defaults(std::string_view name) {
    if (!is_preset(name)) throw InvalidArgument("unknown preset '" + std::string(name) + "'");
    PresetDefaults d;
    if (name == "psi4" || name == "psi5" || name == "double2d") {
        d.dt_factor = 1.0;
    } else if (name == "psi6" || name == "psi6-radial") {
        d.dt_factor = 10.0;
        d.alpha = 0.01;
        d.tol = 1e-10;
    } else if (name == "twophase-sym" || name == "twophase-asym") {
        d.dt_factor = 0.1;
        d.alpha = 500.0;
        d.tol = 1e-10;
    }
    return d;
}

bool has_exact_solution(std::string_view name) {
    return name == "psi1" || name == "psi5" || name == "twophase-sym" || name == "line1d";
}

ScalarField exact_solution(std::string_view name, const GridSpec& grid) {
    if (name == "psi1") return sample1d(grid, exact_psi1);
    if (name == "psi5") {
        const double rstar = solve_rstar();
        return ScalarField::sample(grid, [rstar](double x, double y) { return exact_psi5(x, y, rstar); });
    }
    if (name == "twophase-sym") return sample1d(grid, exact_twophase_sym);
    if (name == "line1d") return sample1d(grid, [](double x) { return x; });
    throw InvalidArgument("no closed-form solution for '" + std::string(name) + "'");
}

double solve_rstar() {
    auto residual = [](double r) { return r * r * (1.0 - std::log(r / 2.0)) - 1.0; };
    double lo = 0.5;
    double hi = 0.9;
    double flo = residual(lo);
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> free_boundary_1d(const ScalarField& u, double level) {
    const GridSpec& grid = u.grid();
    if (grid.dim() != 1) throw InvalidArgument("free_boundary_1d needs a 1D field");
    std::vector<double> out;
    const int m = grid.cells(0);
    auto d = [&](int i) { return u(i) - level; };
    auto flat = [&](int i) { return std::abs(d(i)) <= kPlateauTol; };
    for (int i = 0; i <= m; ++i) {
        if (flat(i)) {
            // Plateau run [i, e]: report its end nodes.
            int e = i;
            while (e + 1 <= m && flat(e + 1)) ++e;
            out.push_back(grid.coord(0, i));
            if (e != i) out.push_back(grid.coord(0, e));
            i = e;
            continue;
        }
        if (i < m && !flat(i + 1) && (d(i) < 0.0) != (d(i + 1) < 0.0)) {
            const double t = d(i) / (d(i) - d(i + 1));
            out.push_back(grid.coord(0, i) + t * grid.dx());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cade
