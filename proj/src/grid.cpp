#include "cade/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace cade {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

double parse_double(const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw InvalidArgument("not a number: '" + text + "'");
    }
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) throw InvalidArgument("not a number: '" + text + "'");
    return v;
}

// Shortest decimal that round-trips.
std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

GridSpec::GridSpec(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                   std::array<int, 2> cells)
    : dim_(dim), lo_(lo), hi_(hi), cells_(cells) {
    if (dim != 1 && dim != 2) throw InvalidArgument("grid dim must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        if (cells[a] < 2) throw InvalidArgument("grid needs at least 2 cells per axis");
        if (!(hi[a] > lo[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a]))
            throw InvalidArgument("grid extent must be a finite interval with b > a");
    }
    dx_ = (hi[0] - lo[0]) / cells[0];
    if (dim == 1) {
        lo_[1] = hi_[1] = 0.0;
        cells_[1] = 0;
    } else {
        const double dy = (hi[1] - lo[1]) / cells[1];
        if (std::abs(dy - dx_) > 64 * std::numeric_limits<double>::epsilon() * dx_)
            throw InvalidArgument("2D grid requires square cells (dx == dy)");
    }
}

GridSpec GridSpec::line(double a, double b, int cells) {
    return GridSpec(1, {a, 0.0}, {b, 0.0}, {cells, 0});
}

GridSpec GridSpec::square(double a, double b, int cells) {
    return GridSpec(2, {a, a}, {b, b}, {cells, cells});
}

std::size_t GridSpec::node_count() const {
    std::size_t n = static_cast<std::size_t>(nodes(0));
    if (dim_ == 2) n *= static_cast<std::size_t>(nodes(1));
    return n;
}

std::array<int, 2> GridSpec::ij(std::size_t k) const {
    if (dim_ == 1) return {static_cast<int>(k), 0};
    const auto nx = static_cast<std::size_t>(nodes(0));
    return {static_cast<int>(k % nx), static_cast<int>(k / nx)};
}

bool GridSpec::is_boundary(std::size_t k) const {
    const auto [i, j] = ij(k);
    if (i == 0 || i == cells_[0]) return true;
    return dim_ == 2 && (j == 0 || j == cells_[1]);
}

std::string GridSpec::header() const {
    std::ostringstream os;
    os << "# grid dim=" << dim_ << " extent=" << format_double(lo_[0]) << ','
       << format_double(hi_[0]);
    if (dim_ == 2) os << ',' << format_double(lo_[1]) << ',' << format_double(hi_[1]);
    os << " cells=" << cells_[0];
    if (dim_ == 2) os << ',' << cells_[1];
    return os.str();
}

GridSpec GridSpec::parse_header(const std::string& line) {
    std::istringstream is(line);
    std::string hash, tag;
    is >> hash >> tag;
    if (hash != "#" || tag != "grid") throw InvalidArgument("missing '# grid' header");
    int dim = 0;
    std::vector<double> extent;
    std::vector<int> cells;
    std::string kv;
    while (is >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InvalidArgument("bad header token '" + kv + "'");
        const auto key = kv.substr(0, eq);
        const auto val = kv.substr(eq + 1);
        if (key == "dim") {
            dim = static_cast<int>(parse_double(val));
        } else if (key == "extent") {
            for (const auto& s : split(val, ',')) extent.push_back(parse_double(s));
        } else if (key == "cells") {
            for (const auto& s : split(val, ',')) cells.push_back(static_cast<int>(parse_double(s)));
        } else {
            throw InvalidArgument("unknown header key '" + key + "'");
        }
    }
    if (dim == 1 && extent.size() == 2 && cells.size() == 1)
        return GridSpec::line(extent[0], extent[1], cells[0]);
    if (dim == 2 && extent.size() == 4 && cells.size() == 2)
        return GridSpec(2, {extent[0], extent[2]}, {extent[1], extent[3]}, {cells[0], cells[1]});
    throw InvalidArgument("inconsistent grid header");
}

ScalarField::ScalarField(const GridSpec& grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw InvalidArgument("value count does not match grid node count");
}

ScalarField ScalarField::sample(const GridSpec& grid,
                                const std::function<double(double, double)>& fn) {
    ScalarField out(grid);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto [i, j] = grid.ij(k);
        const double y = grid.dim() == 2 ? grid.coord(1, j) : 0.0;
        out[k] = fn(grid.coord(0, i), y);
    }
    return out;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool ScalarField::has_nan() const {
    return std::any_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); });
}

VectorField::VectorField(const GridSpec& grid, double fill)
    : grid_(grid), values_(grid.node_count() * static_cast<std::size_t>(grid.dim()), fill) {}

std::span<double> VectorField::component(int c) {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * grid_.node_count(),
                                              grid_.node_count());
}

std::span<const double> VectorField::component(int c) const {
    return std::span<const double>(values_).subspan(
        static_cast<std::size_t>(c) * grid_.node_count(), grid_.node_count());
}

BoundaryData BoundaryData::trace(const ScalarField& field) {
    BoundaryData g;
    g.values_ = ScalarField(field.grid());
    for (std::size_t k = 0; k < field.size(); ++k)
        if (field.grid().is_boundary(k)) g.values_[k] = field[k];
    return g;
}

BoundaryData BoundaryData::from_function(const GridSpec& grid,
                                         const std::function<double(double, double)>& fn) {
    return trace(ScalarField::sample(grid, fn));
}

BoundaryData BoundaryData::constant(const GridSpec& grid, double value) {
    return trace(ScalarField(grid, value));
}

void BoundaryData::apply(ScalarField& u) const {
    require_same_grid(u.grid(), grid(), "boundary data");
    for (std::size_t k = 0; k < u.size(); ++k)
        if (u.grid().is_boundary(k)) u[k] = values_[k];
}

bool BoundaryData::matches(const ScalarField& u) const {
    if (!(u.grid() == grid())) return false;
    for (std::size_t k = 0; k < u.size(); ++k)
        if (u.grid().is_boundary(k) && u[k] != values_[k]) return false;
    return true;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw InvalidArgument(std::string("grid mismatch: ") + what);
}

ScalarField laplacian_h(const ScalarField& u) {
    const GridSpec& g = u.grid();
    ScalarField out(g);
    const double inv = 1.0 / (g.dx() * g.dx());
    const int mx = g.cells(0);
    if (g.dim() == 1) {
        for (int i = 1; i < mx; ++i) out(i) = (u(i - 1) - 2.0 * u(i) + u(i + 1)) * inv;
        return out;
    }
    const int my = g.cells(1);
    for (int j = 1; j < my; ++j)
        for (int i = 1; i < mx; ++i)
            out(i, j) = (u(i - 1, j) + u(i + 1, j) + u(i, j - 1) + u(i, j + 1) - 4.0 * u(i, j)) * inv;
    return out;
}

VectorField gradient_h(const ScalarField& u) {
    const GridSpec& g = u.grid();
    VectorField p(g);
    const double h = g.dx();
    auto diff = [h](int i, int m, auto&& at) {
        if (i == 0) return (at(1) - at(0)) / h;
        if (i == m) return (at(m) - at(m - 1)) / h;
        return (at(i + 1) - at(i - 1)) / (2.0 * h);
    };
    for (std::size_t k = 0; k < u.size(); ++k) {
        const auto [i, j] = g.ij(k);
        p(0, k) = diff(i, g.cells(0), [&](int ii) { return u(ii, j); });
        if (g.dim() == 2) p(1, k) = diff(j, g.cells(1), [&](int jj) { return u(i, jj); });
    }
    return p;
}

ScalarField divergence_h(const VectorField& p) {
    const GridSpec& g = p.grid();
    ScalarField out(g);
    const double inv2h = 1.0 / (2.0 * g.dx());
    const int mx = g.cells(0);
    // Zero-Neumann ghosts: index -1 reads node 1, index M+1 reads node M-1.
    auto ghost = [](int n, int m) { return n < 0 ? -n : (n > m ? 2 * m - n : n); };
    if (g.dim() == 1) {
        for (int i = 0; i <= mx; ++i)
            out(i) = (p(0, g.index(ghost(i + 1, mx))) - p(0, g.index(ghost(i - 1, mx)))) * inv2h;
        return out;
    }
    const int my = g.cells(1);
    for (int j = 0; j <= my; ++j) {
        for (int i = 0; i <= mx; ++i) {
            const double ddx =
                p(0, g.index(ghost(i + 1, mx), j)) - p(0, g.index(ghost(i - 1, mx), j));
            const double ddy =
                p(1, g.index(i, ghost(j + 1, my))) - p(1, g.index(i, ghost(j - 1, my)));
            out(i, j) = (ddx + ddy) * inv2h;
        }
    }
    return out;
}

ScalarField interp_boundary_lift(const BoundaryData& bd) {
    const GridSpec& g = bd.grid();
    ScalarField u(g);
    const int mx = g.cells(0);
    if (g.dim() == 1) {
        for (int i = 0; i <= mx; ++i) {
            const double s = static_cast<double>(i) / mx;
            u(i) = (1.0 - s) * bd.left() + s * bd.right();
        }
        bd.apply(u);
        return u;
    }
    const int my = g.cells(1);
    auto gv = [&](int i, int j) { return bd.at(g.index(i, j)); };
    for (int j = 1; j < my; ++j) {
        const double t = static_cast<double>(j) / my;
        for (int i = 1; i < mx; ++i) {
            const double s = static_cast<double>(i) / mx;
            const double edges = (1.0 - s) * gv(0, j) + s * gv(mx, j) + (1.0 - t) * gv(i, 0) +
                                 t * gv(i, my);
            const double corners = (1.0 - s) * (1.0 - t) * gv(0, 0) + s * (1.0 - t) * gv(mx, 0) +
                                   (1.0 - s) * t * gv(0, my) + s * t * gv(mx, my);
            u(i, j) = edges - corners;
        }
    }
    bd.apply(u);
    return u;
}

void write_field(std::ostream& os, const ScalarField& u) {
    const GridSpec& g = u.grid();
    os << g.header() << '\n';
    const int nx = g.nodes(0);
    const int ny = g.dim() == 2 ? g.nodes(1) : 1;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (i) os << ',';
            os << format_double(u[g.index(i, j)]);
        }
        os << '\n';
    }
}

ScalarField read_field(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("empty field file");
    const GridSpec g = GridSpec::parse_header(line);
    std::vector<double> values;
    values.reserve(g.node_count());
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (static_cast<int>(cells.size()) != g.nodes(0))
            throw InvalidArgument("field row " + std::to_string(rows) + " has wrong length");
        for (const auto& c : cells) {
            if (c == "inf") values.push_back(std::numeric_limits<double>::infinity());
            else if (c == "-inf") values.push_back(-std::numeric_limits<double>::infinity());
            else values.push_back(parse_double(c));
            if (std::isnan(values.back()))
                throw InvalidArgument("field row " + std::to_string(rows) + " contains NaN");
        }
        ++rows;
    }
    const int expected_rows = g.dim() == 2 ? g.nodes(1) : 1;
    if (rows != expected_rows) throw InvalidArgument("field file has wrong number of rows");
    return ScalarField(g, std::move(values));
}

}  // namespace cade
