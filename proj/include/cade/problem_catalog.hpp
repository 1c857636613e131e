#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cade/grid.hpp"

namespace cade {

enum class ProblemKind { linear, nonlinear, double_obstacle, two_phase };

std::string_view to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view text);

/// A fully sampled problem instance.
struct ProblemSpec {
    std::string name;
    ProblemKind kind = ProblemKind::linear;
    GridSpec grid;
    std::optional<ScalarField> psi;  // lower obstacle
    std::optional<ScalarField> phi;  // upper obstacle
    ScalarField f;
    BoundaryData g;
    double mu1 = 0.0;  // two-phase forces
    double mu2 = 0.0;
    std::optional<ScalarField> exact;

    /// Throws InvalidArgument if fields disagree with the grid or psi > phi.
    void validate() const;
};

/// Solver parameters a preset suggests; the CLI applies them unless overridden.
struct PresetDefaults {
    double dt_factor = 0.1;  // dt = dt_factor * dx
    double alpha = 1.0;
    double gamma = 1.0;
    double tol = 1e-11;
    int max_outer = 200000;
};

const std::vector<std::string>& preset_names();
bool is_preset(std::string_view name);

/// Builds a benchmark problem with `cells` subdivisions per axis.
/// Names: psi1 psi2 psi3 psi4 psi5 psi6 psi6-radial double1d double2d
/// twophase-sym twophase-asym.
ProblemSpec preset(std::string_view name, int cells);
PresetDefaults preset_defaults(std::string_view name);

/// Closed-form solution sampled on `grid` (psi1, psi5, twophase-sym, line1d).
ScalarField exact_solution(std::string_view name, const GridSpec& grid);
bool has_exact_solution(std::string_view name);

/// Root in (0, 1) of r^2 (1 - log(r / 2)) = 1, by bisection.
double solve_rstar();

/// Positions where u crosses `level` (linear interpolation between nodes) and
/// the end nodes of every run where |u - level| <= 1e-9, sorted ascending.
std::vector<double> free_boundary_1d(const ScalarField& u, double level = 0.0);

}  // namespace cade
