#pragma once

#include <iosfwd>
#include <vector>

#include "cade/grid.hpp"

namespace cade {

/// sqrt(sum (u - u*)^2 dx^dim).
double error_l2(const ScalarField& u, const ScalarField& u_star);
/// max |u - u*|.
double error_linf(const ScalarField& u, const ScalarField& u_star);

struct ConvergenceStudy {
    std::vector<int> levels;   // cells per axis, strictly increasing
    std::vector<double> dx;
    std::vector<double> errors_l2;
    std::vector<double> errors_linf;

    void add(int cells, double spacing, double l2, double linf);
};

struct OrderFit {
    double order_l2;
    double order_linf;
};

/// Observed order per norm: log(e_first / e_last) / log(dx_first / dx_last),
/// the convention behind the published refinement tables.
/// Throws InvalidArgument with fewer than two levels or non-positive errors.
OrderFit fit_order(const ConvergenceStudy& study);

double endpoint_order(const std::vector<double>& dx, const std::vector<double>& errors);

/// Least-squares slope of log(errors) against log(dx) over all points.
double fit_log_slope(const std::vector<double>& dx, const std::vector<double>& errors);

/// log2(e_k / e_{k+1}) / log2(dx_k / dx_{k+1}) for consecutive levels.
std::vector<double> pairwise_orders(const std::vector<double>& dx,
                                    const std::vector<double>& errors);

/// Least-squares line y = a + b x with coefficient of determination.
struct LinearFit {
    double intercept;
    double slope;
    double r2;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// `M,dx,l2,linf` rows.
void write_study_csv(std::ostream& os, const ConvergenceStudy& study);

}  // namespace cade
