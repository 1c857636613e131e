#include "cade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cade {

double error_l2(const ScalarField& u, const ScalarField& u_star) {
    require_same_grid(u.grid(), u_star.grid(), "error_l2");
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double d = u[k] - u_star[k];
        sum += d * d;
    }
    const double cell = std::pow(u.grid().dx(), u.grid().dim());
    return std::sqrt(sum * cell);
}

double error_linf(const ScalarField& u, const ScalarField& u_star) {
    require_same_grid(u.grid(), u_star.grid(), "error_linf");
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) worst = std::max(worst, std::abs(u[k] - u_star[k]));
    return worst;
}

void ConvergenceStudy::add(int cells, double spacing, double l2, double linf) {
    if (!levels.empty() && cells <= levels.back())
        throw InvalidArgument("convergence levels must be strictly increasing");
    levels.push_back(cells);
    dx.push_back(spacing);
    errors_l2.push_back(l2);
    errors_linf.push_back(linf);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear_fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("linear_fit: abscissae are all equal");
    const double slope = sxy / sxx;
    const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return {my - slope * mx, slope, r2};
}

double fit_log_slope(const std::vector<double>& dx, const std::vector<double>& errors) {
    if (dx.size() != errors.size() || dx.size() < 2)
        throw InvalidArgument("order fit needs at least two levels");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
            throw InvalidArgument("order fit needs positive finite errors");
        lx.push_back(std::log(dx[i]));
        ly.push_back(std::log(errors[i]));
    }
    return linear_fit(lx, ly).slope;
}

double endpoint_order(const std::vector<double>& dx, const std::vector<double>& errors) {
    if (dx.size() != errors.size() || dx.size() < 2)
        throw InvalidArgument("order fit needs at least two levels");
    for (double e : errors)
        if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("order fit needs positive finite errors");
    return std::log(errors.front() / errors.back()) / std::log(dx.front() / dx.back());
}

OrderFit fit_order(const ConvergenceStudy& study) {
    return {endpoint_order(study.dx, study.errors_l2), endpoint_order(study.dx, study.errors_linf)};
}

std::vector<double> pairwise_orders(const std::vector<double>& dx,
                                    const std::vector<double>& errors) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < dx.size(); ++i)
        out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(dx[i] / dx[i + 1]));
    return out;
}

void write_study_csv(std::ostream& os, const ConvergenceStudy& study) {
    const auto old = os.precision(17);
    os << "M,dx,l2,linf\n";
    for (std::size_t i = 0; i < study.levels.size(); ++i)
        os << study.levels[i] << ',' << study.dx[i] << ',' << study.errors_l2[i] << ','
           << study.errors_linf[i] << '\n';
    os.precision(old);
}

}  // namespace cade
