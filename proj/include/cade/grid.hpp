#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cade {

/// Thrown for malformed grids, mismatched fields and other invalid input.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Node-centred uniform Cartesian grid on an interval or a square.
///
/// Axis k has cells[k] subdivisions and cells[k]+1 nodes, indexed 0..M.
/// Nodes are stored with the x index running fastest.
class GridSpec {
public:
    GridSpec() = default;

    static GridSpec line(double a, double b, int cells);
    static GridSpec square(double a, double b, int cells);
    /// General constructor; validates and throws InvalidArgument.
    GridSpec(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
             std::array<int, 2> cells);

    int dim() const { return dim_; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    int cells(int axis) const { return cells_[axis]; }
    int nodes(int axis) const { return cells_[axis] + 1; }
    std::size_t node_count() const;
    double dx() const { return dx_; }

    double coord(int axis, int i) const { return lo_[axis] + i * dx_; }

    std::size_t index(int i) const { return static_cast<std::size_t>(i); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nodes(0)) +
               static_cast<std::size_t>(i);
    }
    /// Inverse of index(); j is 0 in 1D.
    std::array<int, 2> ij(std::size_t k) const;

    bool is_boundary(std::size_t k) const;

    bool operator==(const GridSpec& other) const = default;

    /// `# grid dim=<d> extent=<a0,b0[,a1,b1]> cells=<M0[,M1]>`
    std::string header() const;
    static GridSpec parse_header(const std::string& line);

private:
    int dim_ = 1;
    std::array<double, 2> lo_{0.0, 0.0};
    std::array<double, 2> hi_{1.0, 1.0};
    std::array<int, 2> cells_{2, 0};
    double dx_ = 0.5;
};

/// Real value per grid node.
///
/// Obstacle fields may hold -inf/+inf meaning "no bound at this node";
/// every other field is expected to be finite.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& grid, double fill = 0.0);
    ScalarField(const GridSpec& grid, std::vector<double> values);

    /// Samples fn(x, y) at every node (y = 0 in 1D).
    static ScalarField sample(const GridSpec& grid,
                              const std::function<double(double, double)>& fn);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator()(int i, int j = 0) { return values_[grid_.index(i, j)]; }
    double operator()(int i, int j = 0) const { return values_[grid_.index(i, j)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool all_finite() const;
    bool has_nan() const;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Real D-vector per node (D = grid dim), component-major storage.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const GridSpec& grid, double fill = 0.0);

    const GridSpec& grid() const { return grid_; }
    int components() const { return grid_.dim(); }

    double& operator()(int component, std::size_t k) {
        return values_[static_cast<std::size_t>(component) * grid_.node_count() + k];
    }
    double operator()(int component, std::size_t k) const {
        return values_[static_cast<std::size_t>(component) * grid_.node_count() + k];
    }
    std::span<double> component(int c);
    std::span<const double> component(int c) const;

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Dirichlet data. Only boundary entries are meaningful; interior slots hold 0.
class BoundaryData {
public:
    BoundaryData() = default;
    /// Takes the boundary trace of `field`.
    static BoundaryData trace(const ScalarField& field);
    static BoundaryData from_function(const GridSpec& grid,
                                      const std::function<double(double, double)>& fn);
    static BoundaryData constant(const GridSpec& grid, double value);

    const GridSpec& grid() const { return values_.grid(); }
    double at(std::size_t k) const { return values_[k]; }
    /// 1D endpoint values.
    double left() const { return values_[0]; }
    double right() const { return values_[values_.size() - 1]; }

    /// Overwrites the boundary nodes of `u` with this data.
    void apply(ScalarField& u) const;
    /// True when every boundary node of `u` equals the data bitwise.
    bool matches(const ScalarField& u) const;

private:
    ScalarField values_;
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

/// Central-difference Laplacian at interior nodes; boundary entries are 0.
ScalarField laplacian_h(const ScalarField& u);

/// Central differences inside, first-order one-sided differences on the boundary.
VectorField gradient_h(const ScalarField& u);

/// Central-difference divergence at every node. Neighbours outside the grid are
/// reflection ghosts (p[-1] = p[1], p[M+1] = p[M-1]), i.e. zero normal derivative.
ScalarField divergence_h(const VectorField& p);

/// Linear (1D) or bilinear transfinite (2D) interpolation of the boundary data.
ScalarField interp_boundary_lift(const BoundaryData& g);

/// Field dump: header line then CSV rows (one per grid line in 2D).
void write_field(std::ostream& os, const ScalarField& u);
ScalarField read_field(std::istream& is);

}  // namespace cade
