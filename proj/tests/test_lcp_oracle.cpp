#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cade/lcp_oracle.hpp"
#include "cade/problem_catalog.hpp"

namespace cade {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LcpInstance unobstructed_line(int cells) {
    const auto g = GridSpec::line(0.0, 1.0, cells);
    LcpInstance inst;
    inst.f = ScalarField(g);
    inst.bounds.lower = ScalarField(g, -kInf);
    inst.g = BoundaryData::from_function(g, [](double x, double) { return x; });
    return inst;
}

TEST(Oracle, HarmonicLine) {
    const auto inst = unobstructed_line(32);
    const auto u = oracle_solve(inst);
    for (int i = 0; i <= 32; ++i) EXPECT_NEAR(u(i), inst.grid().coord(0, i), 1e-10);
}

TEST(Oracle, Psi1IsSecondOrderAccurate) {
    const auto p = preset("psi1", 64);
    LcpInstance inst;
    inst.f = p.f;
    inst.bounds.lower = p.psi;
    inst.g = p.g;
    const auto u = oracle_solve(inst);
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) worst = std::max(worst, std::abs(u[k] - (*p.exact)[k]));
    const double h = p.grid.dx();
    EXPECT_LT(worst, 20.0 * h * h);
}

TEST(Oracle, OutputSatisfiesComplementarityNodewise) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto inst = random_instance(seed, 16, 1);
        const auto u = oracle_solve(inst);
        const auto& g = inst.grid();
        const double h2 = g.dx() * g.dx();
        for (int i = 1; i < 16; ++i) {
            const double stencil = -(u(i - 1) - 2.0 * u(i) + u(i + 1)) / h2 - inst.f(i);
            const double gap = u(i) - (*inst.bounds.lower)(i);
            EXPECT_GE(gap, 0.0);
            EXPECT_GE(stencil, -1e-8);
            EXPECT_TRUE(std::abs(stencil) < 1e-8 || std::abs(gap) < 1e-10) << "seed " << seed << " i " << i;
        }
    }
}

TEST(Oracle, FeasibleWithBothBounds) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        for (int dim : {1, 2}) {
            const auto inst = random_instance(seed, dim == 1 ? 16 : 8, dim, true);
            const auto u = oracle_solve(inst);
            EXPECT_TRUE(inst.g.matches(u));
            for (std::size_t k = 0; k < u.size(); ++k) {
                EXPECT_GE(u[k], (*inst.bounds.lower)[k]);
                EXPECT_LE(u[k], (*inst.bounds.upper)[k]);
            }
        }
    }
}

TEST(Oracle, ResidualIsBoundedByTolerance) {
    const double tol = 1e-13;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int dim = 1 + static_cast<int>(seed % 2);
        const auto inst = random_instance(seed, dim == 1 ? 16 : 8, dim, seed % 3 == 0);
        const auto u = oracle_solve(inst, tol);
        const double h = inst.grid().dx();
        EXPECT_LE(complementarity_residual(u, inst), 10.0 * tol / (h * h));
    }
}

TEST(Oracle, SymmetricInstanceGivesSymmetricSolution) {
    for (std::uint64_t seed = 3; seed <= 8; ++seed) {
        const int dim = seed % 2 ? 1 : 2;
        auto inst = random_instance(seed, dim == 1 ? 16 : 8, dim, true);
        const std::size_t n = inst.grid().node_count();
        auto symmetrise = [n](ScalarField& s, bool up) {
            for (std::size_t k = 0; k < n / 2 + 1; ++k) {
                const double v = up ? std::max(s[k], s[n - 1 - k]) : std::min(s[k], s[n - 1 - k]);
                s[k] = s[n - 1 - k] = v;
            }
        };
        symmetrise(inst.f, true);
        symmetrise(*inst.bounds.lower, false);
        symmetrise(*inst.bounds.upper, true);
        ScalarField gfield(inst.grid());
        for (std::size_t k = 0; k < n; ++k) gfield[k] = inst.g.at(k);
        symmetrise(gfield, true);
        inst.g = BoundaryData::trace(gfield);
        const auto u = oracle_solve(inst, 1e-14);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(u[k], u[n - 1 - k], 1e-12);
    }
}

TEST(Oracle, CapRaisesNotConverged) {
    const auto inst = random_instance(1, 16, 1);
    try {
        oracle_solve(inst, 1e-13, 2);
        FAIL() << "expected OracleNotConverged";
    } catch (const OracleNotConverged& e) {
        EXPECT_EQ(e.sweeps(), 2);
        EXPECT_GT(e.last_update(), 0.0);
    }
}

TEST(Residual, ZeroWhereObstacleIsSuperharmonic) {
    const auto g = GridSpec::line(0.0, 1.0, 16);
    LcpInstance inst;
    inst.f = ScalarField(g);
    inst.bounds.lower = ScalarField::sample(g, [](double x, double) { return 1.0 - (x - 0.4) * (x - 0.4); });
    inst.g = BoundaryData::trace(*inst.bounds.lower);
    EXPECT_EQ(complementarity_residual(*inst.bounds.lower, inst), 0.0);
}

TEST(Residual, AffineLiftIsDiscreteHarmonic) {
    const auto inst = unobstructed_line(20);
    EXPECT_LT(complementarity_residual(interp_boundary_lift(inst.g), inst), 1e-9);
}

TEST(Residual, DetectsViolations) {
    const auto inst = random_instance(4, 16, 1);
    auto u = oracle_solve(inst);
    u[8] += 0.1;
    EXPECT_GT(complementarity_residual(u, inst), 1.0);
}

TEST(RandomInstance, DeterministicAndConsistent) {
    for (int dim : {1, 2}) {
        const auto a = random_instance(42, 8, dim, true);
        const auto b = random_instance(42, 8, dim, true);
        for (std::size_t k = 0; k < a.f.size(); ++k) {
            EXPECT_EQ(a.f[k], b.f[k]);
            EXPECT_EQ((*a.bounds.lower)[k], (*b.bounds.lower)[k]);
            EXPECT_EQ((*a.bounds.upper)[k], (*b.bounds.upper)[k]);
            EXPECT_LE((*a.bounds.lower)[k], (*a.bounds.upper)[k]);
            if (a.grid().is_boundary(k)) {
                EXPECT_LT((*a.bounds.lower)[k], a.g.at(k));
                EXPECT_GT((*a.bounds.upper)[k], a.g.at(k));
            }
        }
    }
    EXPECT_THROW(random_instance(1, 1, 1), InvalidArgument);
}

}  // namespace
}  // namespace cade
